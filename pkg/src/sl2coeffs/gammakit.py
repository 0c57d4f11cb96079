"""Gamma-function toolkit: log-gamma, reciprocal gamma, binomials, gamma ratios
and the regularized incomplete gamma functions with their first-term uniform
approximation.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import special

from .errors import DomainError, PoleError
from .params import LATTICE_TOL

__all__ = [
    "log_gamma",
    "recip_gamma",
    "is_nonpositive_integer",
    "binomial_general",
    "pochhammer",
    "GammaRatioExpansion",
    "gamma_ratio",
    "inc_gamma_pq",
    "TemmeApprox",
    "inc_gamma_temme1",
]


def is_nonpositive_integer(z: complex, tol: float = LATTICE_TOL) -> bool:
    """True when ``z`` is (within ``tol``) one of ``0, -1, -2, ...``."""
    z = complex(z)
    if z.imag != 0.0 or z.real > 0.5:
        return False
    return abs(z.real - round(z.real)) <= tol


def log_gamma(z: complex) -> complex:
    """Principal branch of ``log Gamma(z)``.

    Raises
    ------
    PoleError
        At nonpositive integers.
    """
    if is_nonpositive_integer(z):
        raise PoleError(f"log_gamma has a pole at {z}")
    return complex(special.loggamma(complex(z)))


def recip_gamma(z: complex) -> complex:
    """``1/Gamma(z)``, extended by zero at ``0, -1, -2, ...``.

    The zeros are returned exactly whenever ``z`` is real and within ``1e-12``
    of a nonpositive integer.
    """
    if is_nonpositive_integer(z):
        return 0j
    return cmath.exp(-log_gamma(z))


def pochhammer(a: complex, k: int) -> complex:
    """Rising factorial ``(a)_k = a (a+1) ... (a+k-1)`` as a finite product."""
    if k < 0:
        raise DomainError("pochhammer needs k >= 0")
    out = 1 + 0j
    a = complex(a)
    for j in range(k):
        out *= a + j
    return out


def binomial_general(a: complex, k: int) -> complex:
    """Generalized binomial ``a(a-1)...(a-k+1)/k!`` for integer ``k >= 0``.

    Never routed through gamma quotients, so it stays finite where
    ``Gamma(a+1)`` has poles.
    """
    k = int(k)
    if k < 0:
        raise DomainError("binomial_general needs k >= 0")
    out = 1 + 0j
    a = complex(a)
    for j in range(k):
        out *= (a - j) / (j + 1)
    return out


@dataclass(frozen=True)
class GammaRatioExpansion:
    """``Gamma(m)/Gamma(m+delta)`` and its two-term large-``m`` expansion.

    Attributes
    ----------
    leading : complex
        ``m**(-delta)``.
    correction : complex
        ``1 + c1/m`` with ``c1 = delta (1 - delta) / 2``.
    exact : complex
        ``exp(log_gamma(m) - log_gamma(m + delta))``.
    """

    m: float
    delta: complex
    leading: complex
    correction: complex
    exact: complex
    error_order: str = "O(1/m^2)"

    @property
    def approx(self) -> complex:
        return self.leading * self.correction

    @property
    def rel_error(self) -> float:
        return abs(self.approx - self.exact) / abs(self.exact)


def gamma_ratio(m: float, delta: complex) -> GammaRatioExpansion:
    """Expand ``Gamma(m)/Gamma(m+delta)`` for large ``m``.

    Parameters
    ----------
    m : float
        Positive.
    delta : complex
    """
    m = float(m)
    if m <= 0:
        raise DomainError("gamma_ratio needs m > 0")
    delta = complex(delta)
    leading = cmath.exp(-delta * math.log(m))
    correction = 1 + delta * (1 - delta) / (2 * m)
    if is_nonpositive_integer(m + delta):
        exact = 0j
    else:
        exact = cmath.exp(log_gamma(m) - log_gamma(m + delta))
    return GammaRatioExpansion(m, delta, leading, correction, exact)


def inc_gamma_pq(a: float, x: float) -> tuple[float, float]:
    """Regularized incomplete gamma functions ``(P(a, x), Q(a, x))``.

    Thin wrapper over :func:`scipy.special.gammainc` and
    :func:`scipy.special.gammaincc` (series below ``x = a + 1``, continued
    fraction above, uniform asymptotics for large ``a``).
    """
    a, x = float(a), float(x)
    if not a > 0 or x < 0:
        raise DomainError(f"inc_gamma_pq needs a > 0 and x >= 0, got a={a}, x={x}")
    return float(special.gammainc(a, x)), float(special.gammaincc(a, x))


@dataclass(frozen=True)
class TemmeApprox:
    """First-term uniform approximation of ``P`` (``which='P'``) or ``Q``.

    ``error_scale`` is the claimed relative error scale; the absolute error
    is expected to be at most a modest constant times
    ``prefactor * error_scale``.
    """

    value: float
    which: Literal["P", "Q"]
    error_scale: float
    prefactor: float


def inc_gamma_temme1(a: float, x: float) -> TemmeApprox:
    """First term of the uniform expansion of the incomplete gamma ratios.

    With ``lam = x/a`` and ``pre = (lam e^(1-lam))^a / sqrt(2 pi a)``:
    ``P ~ pre/(1-lam)`` for ``lam < 1`` and ``Q ~ pre/(lam-1)`` for ``lam > 1``.
    """
    a, x = float(a), float(x)
    if not (a > 0 and x > 0):
        raise DomainError("inc_gamma_temme1 needs a > 0 and x > 0")
    lam = x / a
    if abs(lam - 1.0) < 1e-14:
        raise PoleError("inc_gamma_temme1 is singular at x = a")
    pre = math.exp(a * (math.log(lam) + 1.0 - lam) - 0.5 * math.log(2 * math.pi * a))
    if lam < 1:
        return TemmeApprox(pre / (1 - lam), "P", 1.0 / ((1 - lam) ** 3 * a), pre)
    return TemmeApprox(pre / (lam - 1), "Q", 1.0 / ((lam - 1) ** 3 * a) + 1.0 / a, pre)


def log_gamma_array(z: np.ndarray) -> np.ndarray:
    """Vectorized principal ``log Gamma`` without pole checks (internal helper)."""
    return special.loggamma(np.asarray(z, dtype=complex))
