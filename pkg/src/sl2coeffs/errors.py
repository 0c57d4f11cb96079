"""Exception hierarchy shared by all modules."""


class Sl2Error(Exception):
    """Base class for library errors."""


class DomainError(Sl2Error, ValueError):
    """An argument lies outside the domain of the requested operation."""


class PoleError(DomainError):
    """The requested value sits on a pole."""


class RouteError(Sl2Error, ValueError):
    """The requested evaluation route does not apply to the query."""


class ConvergenceError(Sl2Error, ArithmeticError):
    """A series or iteration did not reach its tolerance."""


class AccuracyError(Sl2Error, ArithmeticError):
    """No available method met the requested accuracy."""
