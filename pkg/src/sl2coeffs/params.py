"""Representation parameters, series classification and uniform norm formulas.

A character of the universal cover is a pair ``chi = (ell, eps)`` with complex
``ell`` and real ``eps``.  Basis indices live in ``eps + Z``.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import DomainError, PoleError

__all__ = [
    "ReprParams",
    "SeriesKind",
    "Classification",
    "classify",
    "is_index",
    "in_complementary_window",
    "ub_norm_11_squared",
    "ub_norm_min",
    "optimal_weight_ratio",
]

# tolerance used when deciding that a float sits on a lattice point
LATTICE_TOL = 1e-12


class SeriesKind(enum.Enum):
    PRINCIPAL = "Principal"
    DISCRETE_PLUS = "DiscretePlus"
    DISCRETE_MINUS = "DiscreteMinus"
    COMPLEMENTARY = "Complementary"
    UNIFORMLY_BOUNDED_ONLY = "UniformlyBoundedOnly"
    INVALID = "Invalid"

    @classmethod
    def parse(cls, text: str) -> "SeriesKind":
        key = text.strip().lower().replace("_", "").replace("-", "")
        aliases = {
            "principal": cls.PRINCIPAL,
            "discrete": cls.DISCRETE_PLUS,
            "discreteplus": cls.DISCRETE_PLUS,
            "discreteminus": cls.DISCRETE_MINUS,
            "complementary": cls.COMPLEMENTARY,
            "general": cls.UNIFORMLY_BOUNDED_ONLY,
            "uniformlyboundedonly": cls.UNIFORMLY_BOUNDED_ONLY,
            "invalid": cls.INVALID,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown series kind {text!r}") from None


@dataclass(frozen=True)
class ReprParams:
    """The character ``chi = (ell, eps)``.

    ``eps`` is stored exactly as given.  Use :meth:`reduced` to move it into
    ``(-1/2, 1/2]``; the accompanying integer shift must then be applied to
    index offsets by the caller.
    """

    ell: complex
    eps: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "ell", complex(self.ell))
        object.__setattr__(self, "eps", float(self.eps))

    @classmethod
    def principal(cls, lam: float, eps: float = 0.0) -> "ReprParams":
        return cls(complex(-0.5, lam), eps)

    @property
    def lam(self) -> float:
        """Imaginary part of ``ell``; the spectral parameter on the principal line."""
        return self.ell.imag

    @property
    def is_real(self) -> bool:
        return self.ell.imag == 0.0

    def reduced(self) -> tuple["ReprParams", int]:
        """Return ``(p, k)`` with ``p.eps = eps - k`` in ``(-1/2, 1/2]``."""
        k = math.ceil(self.eps - 0.5)
        return ReprParams(self.ell, self.eps - k), k


class Classification(NamedTuple):
    kind: SeriesKind
    reducible: bool = False


def is_index(value: float, base: complex, *, nonneg: bool = True) -> bool:
    """True when ``value - base`` is a (nonnegative) integer up to ``LATTICE_TOL``."""
    d = complex(value) - complex(base)
    if abs(d.imag) > LATTICE_TOL:
        return False
    k = round(d.real)
    return abs(d.real - k) <= LATTICE_TOL and (k >= 0 or not nonneg)


def in_complementary_window(ell: float, eps: float) -> bool:
    """``-1 < ell < 0`` and ``|eps| < 1/2 - |1/2 + ell|``."""
    return -1.0 < ell < 0.0 and abs(eps) < 0.5 - abs(0.5 + ell)


def classify(p: ReprParams, indices: Iterable[float] | None = None) -> Classification:
    """Assign a series tag to ``p``.

    Parameters
    ----------
    p : ReprParams
    indices : iterable of float, optional
        Actual index values (not offsets) the caller intends to use.  The
        discrete-series tags are only returned when every index lies in
        ``-ell + N0`` (plus branch) or ``ell - N0`` (minus branch).

    Returns
    -------
    Classification
        ``(kind, reducible)``; ``reducible`` is set only at ``ell = -1/2``
        with ``eps`` in ``1/2 + Z``.
    """
    ell, eps = p.ell, p.eps
    if not (math.isfinite(ell.real) and math.isfinite(ell.imag) and math.isfinite(eps)):
        return Classification(SeriesKind.INVALID)
    if abs(ell.real + 0.5) <= LATTICE_TOL:
        reducible = ell.imag == 0.0 and is_index(eps, 0.5, nonneg=False)
        return Classification(SeriesKind.PRINCIPAL, reducible)
    idx = None if indices is None else [float(v) for v in indices]
    if p.is_real and ell.real < 0.0 and idx:
        if all(is_index(v, -ell) for v in idx):
            return Classification(SeriesKind.DISCRETE_PLUS)
        if all(is_index(ell, v) for v in idx):
            return Classification(SeriesKind.DISCRETE_MINUS)
    if p.is_real and in_complementary_window(ell.real, eps):
        return Classification(SeriesKind.COMPLEMENTARY)
    if -1.0 < ell.real < 0.0:
        return Classification(SeriesKind.UNIFORMLY_BOUNDED_ONLY)
    return Classification(SeriesKind.INVALID)


def _check_strip(ell: float) -> float:
    ell = float(ell)
    if not -1.0 < ell < 0.0:
        raise DomainError(f"ell must lie in (-1, 0), got {ell}")
    return ell


def ub_norm_11_squared(ell: float, eps: float) -> float:
    """Squared uniform norm of the representation with equal weights ``a = b = 1``.

    Parameters
    ----------
    ell : float in (-1, 0)
    eps : float

    Returns
    -------
    float
        ``1 + (2/sin^2 pi ell)(cos^2 pi ell sin^2 pi eps
        + |cos pi ell sin pi eps| sqrt(1 - cos^2 pi ell cos^2 pi eps))``.
    """
    ell = _check_strip(ell)
    c, s = math.cos(math.pi * ell), math.sin(math.pi * ell)
    se, ce = math.sin(math.pi * eps), math.cos(math.pi * eps)
    rad = max(0.0, 1.0 - c * c * ce * ce)
    return 1.0 + 2.0 / (s * s) * (c * c * se * se + abs(c * se) * math.sqrt(rad))


def ub_norm_min(ell: float, eps: float) -> float:
    """Uniform norm minimised over the weights ``(a, b)``.

    Valid where ``sin^2 pi eps >= sin^2 pi ell``; inside the complementary
    window the representation is unitarisable and the minimum is 1.

    Raises
    ------
    DomainError
        If ``ell`` is outside ``(-1, 0)`` or the radicand is negative.
    """
    ell = _check_strip(ell)
    sl = abs(math.sin(math.pi * ell))
    se = abs(math.sin(math.pi * eps))
    rad = se * se - sl * sl
    if rad < -1e-15:
        raise DomainError(
            f"eps={eps} lies in the complementary window of ell={ell}; the norm is 1 there"
        )
    return (se + math.sqrt(max(rad, 0.0))) / sl


def optimal_weight_ratio(ell: complex, eps: float) -> float:
    """Weight ratio ``b/a = |sin pi(ell - eps) / sin pi(ell + eps)|`` attaining the minimal norm.

    Raises
    ------
    PoleError
        When ``sin pi(ell + eps)`` vanishes.
    """
    ell = complex(ell)
    num = cmath.sin(math.pi * (ell - eps))
    den = cmath.sin(math.pi * (ell + eps))
    if abs(den) < 1e-14:
        raise PoleError(f"sin(pi(ell+eps)) vanishes at ell={ell}, eps={eps}")
    return abs(num / den)

