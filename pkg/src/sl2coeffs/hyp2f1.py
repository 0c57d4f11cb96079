"""Gauss hypergeometric function on the negative real axis.

Only real ``z <= 0`` is supported, which is what the coefficient formula needs
(``z = (1 - x)/2`` with ``x >= 1``).  The series is summed after the Pfaff map
``z -> z/(z-1)``, which lands in ``[0, 1)``.

Large parameters make the terms alternate and cancel.  When the
double-precision pass reports a relative error above ``MP_TRIGGER``, the
selected branch is re-summed in decimal arithmetic whose precision grows
with the observed cancellation.
"""
from __future__ import annotations

import cmath
import decimal
import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError
from .gammakit import is_nonpositive_integer

__all__ = ["Hyp2F1Query", "hyp2f1", "hyp2f1_with_error", "MAX_MAPPED_ARG", "MAX_TERMS"]

MAX_MAPPED_ARG = 0.995
MAX_TERMS = 100_000
RTOL = 1e-13
MP_TRIGGER = 1e-12
MP_MAX_DIGITS = 160
_EPS = 2.2e-16


@dataclass(frozen=True)
class Hyp2F1Query:
    a: complex
    b: complex
    c: complex
    z: float


def _nonpos_int(a: complex) -> int | None:
    if is_nonpositive_integer(a):
        return -int(round(complex(a).real))
    return None


def _series(a, b, c, w, max_terms=MAX_TERMS, terms_cap=None):
    """Sum ``2F1(a, b; c; w)`` termwise.

    Returns ``(value, est_rel_error)``.  When ``terms_cap`` is given the sum
    is finite (polynomial case) and taken verbatim.
    """
    s = 1 + 0j
    t = 1 + 0j
    abs_sum = 1.0
    n_max = max_terms if terms_cap is None else terms_cap
    k = 0
    while k < n_max:
        t *= (a + k) * (b + k) / ((c + k) * (k + 1)) * w
        s += t
        at = abs(t)
        abs_sum += at
        k += 1
        if terms_cap is None and at <= RTOL * 0.01 * abs(s) and k > 2:
            # tail of a series with ratio ~w is bounded by |t| w/(1-w)
            ratio = abs((a + k) * (b + k) / ((c + k) * (k + 1))) * w
            if ratio < 1:
                tail = at * ratio / (1 - ratio)
                if tail <= RTOL * 0.1 * abs(s):
                    return s, _EPS * abs_sum / max(abs(s), 1e-300) * 4 + tail / abs(s)
        if at == 0.0 and terms_cap is None:
            return s, _EPS * abs_sum / max(abs(s), 1e-300) * 4
    if terms_cap is not None:
        return s, _EPS * abs_sum / max(abs(s), 1e-300) * 4
    raise ConvergenceError(f"2F1 series did not converge in {max_terms} terms (w={w})")


class _DC:
    """Minimal complex arithmetic on pairs of Decimals."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re, self.im = re, im

    @classmethod
    def of(cls, z: complex) -> "_DC":
        z = complex(z)
        return cls(decimal.Decimal(z.real), decimal.Decimal(z.imag))

    def __add__(self, o):
        return _DC(self.re + o.re, self.im + o.im)

    def __mul__(self, o):
        return _DC(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def div(self, o):
        d = o.re * o.re + o.im * o.im
        return _DC((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)

    def scale(self, r):
        return _DC(self.re * r, self.im * r)

    def abs_f(self) -> float:
        return math.hypot(float(self.re), float(self.im))

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))


def _series_mp(a, b, c, w, digits, terms_cap=None, max_terms=MAX_TERMS):
    """Decimal re-summation of ``2F1(a, b; c; w)``; returns ``(value, est_rel_error)``."""
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        unit = decimal.Decimal(10) ** (1 - digits)
        A, B, C = _DC.of(a), _DC.of(b), _DC.of(c)
        W = decimal.Decimal(w)
        one = _DC(decimal.Decimal(1), decimal.Decimal(0))
        s, t = one, one
        abs_sum = 1.0
        n_max = max_terms if terms_cap is None else terms_cap
        k = 0
        while k < n_max:
            K = _DC(decimal.Decimal(k), decimal.Decimal(0))
            num = (A + K) * (B + K)
            den = (C + K).scale(decimal.Decimal(k + 1))
            t = (t * num).div(den).scale(W)
            t_abs = t.abs_f()
            s = s + t
            abs_sum += t_abs
            k += 1
            if terms_cap is None and k > 2:
                s_abs = s.abs_f()
                if t_abs <= RTOL * 1e-3 * s_abs:
                    ratio = abs((a + k) * (b + k) / ((c + k) * (k + 1))) * w
                    if ratio < 1 and t_abs * ratio / (1 - ratio) <= RTOL * 1e-3 * s_abs:
                        break
            if t_abs == 0.0:
                break
        else:
            if terms_cap is None:
                raise ConvergenceError(f"2F1 series did not converge in {max_terms} terms (w={w})")
        s_abs = max(s.abs_f(), 1e-300)
        est = float(unit) * (k + 1) * abs_sum / s_abs + _EPS
        return s.to_complex(), est


def _resum(a, b, c, w, terms_cap, est_double):
    """Grow the decimal precision until cancellation is absorbed."""
    digits = 34 + max(0, int(math.log10(max(est_double, 1e-16) / _EPS)))
    best = None
    while digits <= MP_MAX_DIGITS:
        val, est = _series_mp(a, b, c, w, digits, terms_cap)
        if best is None or est < best[1]:
            best = (val, est)
        if est <= 1e-15:
            break
        digits += 10 + int(math.log10(est / 1e-16))
    return best


def hyp2f1_with_error(a: complex, b: complex, c: complex, z: float) -> tuple[complex, float]:
    """``2F1(a, b; c; z)`` for real ``z <= 0`` together with an error estimate.

    Returns
    -------
    value : complex
    est_rel_error : float
        Rounding estimate ``eps * sum|terms| / |sum|`` plus the truncated tail.

    Raises
    ------
    DomainError
        For ``z > 0`` or ``c`` at a nonpositive integer without earlier
        termination.
    ConvergenceError
        When the mapped argument exceeds ``MAX_MAPPED_ARG`` or the series
        needs more than ``MAX_TERMS`` terms.
    """
    a, b, c = complex(a), complex(b), complex(c)
    z = float(z)
    if z > 0:
        raise DomainError(f"hyp2f1 only supports real z <= 0, got {z}")
    if z == 0.0:
        return 1 + 0j, 0.0
    na, nb, nc = _nonpos_int(a), _nonpos_int(b), _nonpos_int(c)
    cap = min(v for v in (na, nb, None) if v is not None) if (na is not None or nb is not None) else None
    if nc is not None and (cap is None or cap > nc):
        raise DomainError(f"c={c} is a nonpositive integer and the series does not terminate first")
    if cap is not None:
        val, err = _series(a, b, c, z, terms_cap=cap)
        if err > MP_TRIGGER:
            val, err = _resum(a, b, c, z, cap, err)
        return val, err

    w = z / (z - 1.0)
    logs = math.log1p(-z)
    candidates = []
    for p, q in ((a, b), (b, a)):
        # Pfaff: F(p, q; c; z) = (1-z)^(-p) F(p, c-q; c; w)
        pre = cmath.exp(-p * logs)
        np_, nq = _nonpos_int(p), _nonpos_int(c - q)
        cap2 = None
        if np_ is not None or nq is not None:
            cap2 = min(v for v in (np_, nq) if v is not None)
        if cap2 is None and w > MAX_MAPPED_ARG:
            continue
        try:
            val, err = _series(p, c - q, c, w, terms_cap=cap2)
        except ConvergenceError:
            continue
        candidates.append((err, pre, (p, c - q, cap2), val))
        if w <= 0.9 and err < 1e-12:
            break
    if not candidates:
        raise ConvergenceError(
            f"Pfaff-mapped argument {w:.6f} exceeds {MAX_MAPPED_ARG}; use an asymptotic route"
        )
    err, pre, (p, q2, cap2), val = min(candidates, key=lambda t: t[0])
    if err > MP_TRIGGER:
        val, err = _resum(p, q2, c, w, cap2, err)
    return pre * val, err


def hyp2f1(a, b=None, c=None, z=None) -> complex:
    """Gauss hypergeometric function ``2F1(a, b; c; z)`` for real ``z <= 0``.

    Accepts either four scalars or a single :class:`Hyp2F1Query`.

    Examples
    --------
    >>> abs(hyp2f1(-1, 2.0, 3.0, -0.5) - (1 + 2 * 0.5 / 3)) < 1e-15
    True
    """
    if isinstance(a, Hyp2F1Query):
        a, b, c, z = a.a, a.b, a.c, a.z
    return hyp2f1_with_error(a, b, c, z)[0]
