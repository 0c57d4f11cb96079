"""Matrix coefficients ``frak P^ell_{mn}(x)`` and their normalized versions.

The coefficient of the diagonal element ``diag(e^tau, e^-tau)`` in the basis
``e_m`` is ``frak P^ell_{m n}(x)`` with ``x = cosh 2 tau >= 1``.  Routes:

``Hypergeometric``
    ``binom(ell-n, m-n) ((x-1)/2)^{(m-n)/2} ((x+1)/2)^{-(m+n)/2}
    2F1(-ell-n, ell+1-n; m-n+1; (1-x)/2)`` for ``m - n >= 0``.
``GammaAverage``
    A gamma-weighted average of ``W_{n, ell+1/2}(2t/x)``.
``Jacobi``
    A Jacobi polynomial closed form when ``ell + m`` and ``n - m`` are in N0,
    summed exactly in rational arithmetic.
``MatrixElement``
    The defining integral of the matrix element over the line model,
    trapezoidal in ``log|t|``.  Valid for every index pair; used for
    ``m = n = 0`` at very large ``x`` where the other routes do not apply.

Negative ``m - n`` is handled by ``P_{mn} = P_{-m,-n}`` and the transpose
identity ``P^ell_{mn} = (-1)^{m-n} P^{-ell-1}_{nm}``.
"""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import gammaln, gammasgn, loggamma

from .errors import AccuracyError, ConvergenceError, DomainError, RouteError
from .gammakit import binomial_general, is_nonpositive_integer, recip_gamma
from .hyp2f1 import hyp2f1_with_error
from .params import ReprParams, SeriesKind, in_complementary_window, is_index
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, gamma_average
from .whittaker import whittaker_w_array

__all__ = [
    "CoeffIndex",
    "CoeffQuery",
    "EvalResult",
    "ROUTES",
    "frak_p",
    "frak_p_value",
    "frak_p_gamma_average",
    "cal_p",
    "cal_p_value",
    "normalization_factor",
    "coeff_column",
    "AUTO_X_FACTOR",
]

ROUTES = ("Hypergeometric", "GammaAverage", "Jacobi", "MatrixElement", "Auto")
AUTO_X_FACTOR = 50.0
_EPS = 2.2e-16


@dataclass(frozen=True)
class CoeffIndex:
    """Index pair ``(m, n) = (m_off + eps, n_off + eps)`` with exact integer offsets."""

    m_off: int
    n_off: int
    eps: float = 0.0

    def __post_init__(self):
        if int(self.m_off) != self.m_off or int(self.n_off) != self.n_off:
            raise DomainError("index offsets must be integers")
        object.__setattr__(self, "m_off", int(self.m_off))
        object.__setattr__(self, "n_off", int(self.n_off))
        object.__setattr__(self, "eps", float(self.eps))

    @classmethod
    def from_values(cls, m: float, n: float, eps: float = 0.0) -> "CoeffIndex":
        """Build from actual index values; both must lie in ``eps + Z``."""
        mo, no = m - eps, n - eps
        if abs(mo - round(mo)) > 1e-9 or abs(no - round(no)) > 1e-9:
            raise DomainError(f"indices ({m}, {n}) do not lie in eps + Z with eps={eps}")
        return cls(int(round(mo)), int(round(no)), eps)

    @property
    def m(self) -> float:
        return self.m_off + self.eps

    @property
    def n(self) -> float:
        return self.n_off + self.eps

    @property
    def diff(self) -> int:
        """``m - n`` as an exact integer."""
        return self.m_off - self.n_off

    def negated(self) -> "CoeffIndex":
        return CoeffIndex(-self.m_off, -self.n_off, -self.eps)

    def transposed(self) -> "CoeffIndex":
        return CoeffIndex(self.n_off, self.m_off, self.eps)


@dataclass(frozen=True)
class CoeffQuery:
    params: ReprParams
    idx: CoeffIndex
    x: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        if not self.x >= 1.0:
            raise DomainError(f"x must be >= 1, got {self.x}")

    @classmethod
    def make(cls, ell: complex, m: float, n: float, x: float, eps: float | None = None) -> "CoeffQuery":
        """Convenience constructor from actual index values.

        ``eps`` defaults to the fractional part of ``n``.
        """
        if eps is None:
            eps = n - math.floor(n)
        return cls(ReprParams(ell, eps), CoeffIndex.from_values(m, n, eps), x)


@dataclass(frozen=True)
class EvalResult:
    value: complex
    method: str
    est_rel_error: float


# ------------------------------------------------------------------ routes
# Internally a query is (ell, m, n, d, x) with d = m - n an exact integer.

def _hyp_route(ell, m, n, d, x):
    if d < 0:
        m, n, d = -m, -n, -d
    if x == 1.0:
        return (1 + 0j if d == 0 else 0j), 0.0
    binom = binomial_general(ell - n, d)
    if binom == 0:
        return 0j, 0.0
    F, err = hyp2f1_with_error(-ell - n, ell + 1 - n, d + 1, (1 - x) / 2)
    logpow = 0.5 * d * (math.log(x - 1) - math.log(x + 1)) - n * math.log((x + 1) / 2)
    return complex(binom * math.exp(logpow) * F), err + 4 * _EPS * (d + 1)


def _jacobi_form(ell, m, n, d):
    """Find a symmetry image with ``ell + m`` and ``n - m`` in N0.

    Returns ``(ell', m', n', sign)`` or None.
    """
    sign_t = -1 if d % 2 else 1
    for L, mm, nn, sg in (
        (ell, m, n, 1),
        (ell, -m, -n, 1),
        (-ell - 1, n, m, sign_t),
        (-ell - 1, -n, -m, sign_t),
    ):
        if is_index(L + mm, 0.0) and is_index(nn - mm, 0.0):
            return L, mm, nn, sg
    return None


def _jacobi_route(ell, m, n, d, x):
    form = _jacobi_form(ell, m, n, d)
    if form is None:
        raise RouteError("Jacobi route needs ell+m and n-m in N0 after symmetry reduction")
    L, mm, nn, sg = form
    if x == 1.0:
        return (1 + 0j if d == 0 else 0j), 0.0
    N = int(round((L + mm).real))
    al = int(round((nn - mm).real))  # >= 0
    be = Fraction(-(mm + nn).real)
    # P_N^(al,be)(x) = ((x+1)/2)^N sum_s C(N+al, N-s) C(N+be, s) u^s, summed
    # exactly in rationals: for large negative be the terms cancel badly
    X = Fraction(x)
    u = (X - 1) / (X + 1)
    total = Fraction(0)
    cb = Fraction(1)  # C(N+be, s)
    for s in range(N + 1):
        total += math.comb(N + al, N - s) * cb * u**s
        cb = cb * (N + be - s) / (s + 1)
    logpre = (
        mm * math.log(2)
        + 0.5 * al * math.log(x - 1)
        + 0.5 * be * math.log(x + 1)
        + N * math.log((x + 1) / 2)
    )
    val = sg * cmath.exp(complex(logpre)) * float(total)
    est = 4 * _EPS * (abs(logpre) + N + 4)
    return complex(val), est


def _gamma_average_form(ell, m, n, d):
    """Symmetry image ``(L, N, M, sign)`` with ``M - N`` in N0, ``M > 0``
    and ``M + 1/2 > |Re(L + 1/2)|``; the query equals ``sign * P^L_{N M}``.
    """
    sign_t = -1 if d % 2 else 1
    cands = []
    if d <= 0:  # q - p >= 0 with (p, q) = (m, n)
        cands.append((ell, m, n, 1))
        cands.append((-ell - 1, -n, -m, sign_t))
    if d >= 0:
        cands.append((ell, -m, -n, 1))
        cands.append((-ell - 1, n, m, sign_t))
    ok = [c for c in cands if c[2] > 0 and c[2] + 0.5 > abs((c[0] + 0.5).real)]
    if not ok:
        return None
    return max(ok, key=lambda c: c[2])


def _gamma_average_route(ell, m, n, d, x, cfg: QuadratureConfig = DEFAULT_CONFIG):
    form = _gamma_average_form(ell, m, n, d)
    if form is None:
        raise RouteError(
            "gamma-average route needs a symmetry image with M > 0 and M + 1/2 > |Re(ell + 1/2)|"
        )
    if x == 1.0:
        return (1 + 0j if d == 0 else 0j), 0.0
    L, N, M, sg = form
    rg = recip_gamma(L + N + 1)
    if rg == 0:
        return 0j, 0.0
    if is_nonpositive_integer(M - L):
        return 0j, 0.0
    rho = L + 0.5
    log_ratio = loggamma(M) - loggamma(M - L)
    logpre = 0.5 * (M - N) * math.log(x - 1) + 0.5 * (M + N) * math.log(x + 1) - M * math.log(x)
    kappa = M + 0.5 - abs(rho.real)

    def f(t):
        return whittaker_w_array(N, rho, 2.0 * t / x)

    avg = gamma_average(f, M, kappa=kappa, cfg=cfg)
    val = sg * rg * cmath.exp(log_ratio + logpre) * avg.value
    return complex(val), avg.est_rel_error + 1e-14


def _matrix_element_route(ell, m, n, d, x):
    """Line-model matrix element, ``t = +-e^s`` trapezoid."""
    if x == 1.0:
        return (1 + 0j if d == 0 else 0j), 0.0
    two_tau = math.acosh(x)
    log_a2 = two_tau  # a^2 = e^{2 tau}
    s_lo, s_hi = -two_tau - 40.0, 40.0
    base = -two_tau * ell - 1j * math.pi * (n - m)

    def integrand(s):
        u = np.exp(s)
        th1 = np.arctan(np.exp(s + log_a2))
        th2 = np.arctan(u)
        mag = ell * np.logaddexp(0.0, 2 * (s + log_a2)) - (ell + 1) * np.logaddexp(0.0, 2 * s) + s
        pos = np.exp(base + mag + 2j * (n * th1 - m * th2))
        neg = np.exp(base + mag - 2j * (n * th1 - m * th2))
        return (pos + neg) / math.pi

    h = min(0.2, 1.0 / (1.0 + abs(m) + abs(n)))
    prev = None
    rel = math.inf
    for _ in range(8):
        s = np.arange(s_lo, s_hi + h, h)
        v = integrand(s)
        total = h * v.sum()
        absum = h * np.abs(v).sum()
        if prev is not None:
            rel = abs(total - prev) / max(abs(total), 1e-300)
            if rel <= 1e-12:
                break
        prev = total
        h /= 2
    est = rel + 8 * _EPS * absum / max(abs(total), 1e-300)
    return complex(total), float(est)


_ROUTE_FUNCS = {
    "Hypergeometric": _hyp_route,
    "GammaAverage": _gamma_average_route,
    "Jacobi": _jacobi_route,
    "MatrixElement": _matrix_element_route,
}


def _auto(ell, m, n, d, x):
    if x == 1.0:
        return (1 + 0j if d == 0 else 0j), 0.0, "Identity"
    order = []
    if x <= AUTO_X_FACTOR * max(1.0, abs(m)):
        order.append("Hypergeometric")
    order += ["GammaAverage", "Hypergeometric", "MatrixElement"]
    seen = set()
    best = None
    for r in order:
        if r in seen:
            continue
        seen.add(r)
        try:
            v, e = _ROUTE_FUNCS[r](ell, m, n, d, x)
        except (RouteError, ConvergenceError):
            continue
        if e <= 1e-9:
            return v, e, r
        if best is None or e < best[1]:
            best = (v, e, r)
    if best is None:
        raise AccuracyError(f"no route evaluated P^{ell}_{{{m},{n}}}({x})")
    return best


def frak_p_value(ell: complex, m: float, n: float, d: int, x: float, method: str = "Auto") -> EvalResult:
    """Low-level entry on actual index values with ``d = m - n`` given exactly."""
    ell = complex(ell)
    x = float(x)
    if not x >= 1.0:
        raise DomainError(f"x must be >= 1, got {x}")
    if method == "Auto":
        v, e, r = _auto(ell, m, n, d, x)
        return EvalResult(v, r, e)
    try:
        func = _ROUTE_FUNCS[method]
    except KeyError:
        raise ValueError(f"unknown route {method!r}; choose from {ROUTES}") from None
    v, e = func(ell, m, n, d, x)
    return EvalResult(v, method, e)


def frak_p(q: CoeffQuery, method: str = "Auto") -> EvalResult:
    """Matrix coefficient ``frak P^ell_{mn}(x)``.

    Parameters
    ----------
    q : CoeffQuery
    method : {"Hypergeometric", "GammaAverage", "Jacobi", "MatrixElement", "Auto"}
        ``Auto`` uses the hypergeometric series for ``x <= 50 max(1, |m|)``
        and the gamma average otherwise, falling back along the list when a
        route does not apply.

    Returns
    -------
    EvalResult

    Raises
    ------
    DomainError
        For ``x < 1``.
    RouteError
        When a forced route does not apply.
    ConvergenceError
        From the hypergeometric series at large ``x``.
    """
    return frak_p_value(q.params.ell, q.idx.m, q.idx.n, q.idx.diff, q.x, method)


def frak_p_gamma_average(q: CoeffQuery, cfg: QuadratureConfig = DEFAULT_CONFIG) -> EvalResult:
    """``frak P`` through the gamma-average of a Whittaker function.

    Raises
    ------
    RouteError
        When no symmetry image satisfies the route's preconditions.
    AccuracyError
        When neither quadrature rule reaches ``1e-9``.
    """
    ell = q.params.ell
    v, e = _gamma_average_route(ell, q.idx.m, q.idx.n, q.idx.diff, q.x, cfg)
    if e > 1e-9:
        raise AccuracyError(f"gamma-average quadrature only reached {e:.1e}")
    return EvalResult(v, "GammaAverage", e)


# ----------------------------------------------------------- normalization

def _log_abs_gamma(z: float) -> tuple[float, float]:
    return float(gammaln(z)), float(gammasgn(z))


def normalization_factor(ell: float, m: float, n: float) -> float:
    """``[Gamma(n-ell) Gamma(ell+m+1) / (Gamma(m-ell) Gamma(ell+n+1))]^{1/2}``.

    Raises
    ------
    DomainError
        If the quotient is not positive (indices outside the unitary regimes).
    """
    ell = float(ell)
    args = (n - ell, ell + m + 1, m - ell, ell + n + 1)
    if any(is_nonpositive_integer(a) for a in args):
        raise DomainError(f"normalization hits a gamma pole at ell={ell}, m={m}, n={n}")
    (l1, s1), (l2, s2), (l3, s3), (l4, s4) = (_log_abs_gamma(a) for a in args)
    if s1 * s2 * s3 * s4 <= 0:
        raise DomainError(f"normalization quotient is negative at ell={ell}, m={m}, n={n}")
    return math.exp(0.5 * (l1 + l2 - l3 - l4))


def _unitary_branch(p: ReprParams, m: float, n: float) -> SeriesKind:
    ell = p.ell
    if ell.imag != 0 or ell.real >= 0:
        raise DomainError("normalized coefficients need real ell < 0")
    if is_index(m, -ell) and is_index(n, -ell):
        return SeriesKind.DISCRETE_PLUS
    if is_index(ell, m) and is_index(ell, n):
        return SeriesKind.DISCRETE_MINUS
    if in_complementary_window(ell.real, p.eps):
        return SeriesKind.COMPLEMENTARY
    raise DomainError(
        f"indices ({m}, {n}) fit neither discrete branch and (ell, eps)=({ell.real}, {p.eps}) "
        "is outside the complementary window"
    )


def cal_p_value(ell: float, m: float, n: float, d: int, x: float, eps: float = 0.0, method: str = "Auto") -> EvalResult:
    """Low-level normalized coefficient on actual index values."""
    p = ReprParams(ell, eps)
    kind = _unitary_branch(p, m, n)
    if kind == SeriesKind.DISCRETE_MINUS:
        m, n, d = -m, -n, -d
    fac = normalization_factor(p.ell.real, m, n)
    r = frak_p_value(p.ell, m, n, d, x, method)
    return EvalResult(fac * r.value, r.method, r.est_rel_error + 1e-14)


def cal_p(q: CoeffQuery, method: str = "Auto") -> EvalResult:
    """Normalized coefficient ``cal P^ell_{mn}(x)`` for the unitary series with real ``ell``.

    Discrete series (plus branch: ``m, n`` in ``-ell + N0``) and the
    complementary series use the normalization of :func:`normalization_factor`;
    the minus branch is reduced by ``cal P_{mn} = cal P_{-m,-n}``.
    """
    return cal_p_value(q.params.ell, q.idx.m, q.idx.n, q.idx.diff, q.x, q.params.eps, method)


# ----------------------------------------------------------------- columns

def _column_worker(args):
    ell, eps, n_off, m_offs, x, normalized = args
    out = []
    n = n_off + eps
    for mo in m_offs:
        m = mo + eps
        d = mo - n_off
        if normalized:
            out.append(cal_p_value(ell, m, n, d, x, eps).value)
        else:
            out.append(frak_p_value(ell, m, n, d, x).value)
    return out


def coeff_column(
    params: ReprParams,
    n_off: int,
    x: float,
    m_range: tuple[int, int],
    *,
    normalized: bool = False,
    workers: int = 1,
) -> np.ndarray:
    """Column ``[P_{m n}(x) for m_off in m_range]`` with route ``Auto``.

    Parameters
    ----------
    params : ReprParams
    n_off : int
        Column index offset, ``n = n_off + eps``.
    x : float
    m_range : (int, int)
        Inclusive range of row offsets.
    normalized : bool
        Return ``cal P`` instead of ``frak P``.
    workers : int
        Process count; results are assembled in row order regardless.
    """
    lo, hi = int(m_range[0]), int(m_range[1])
    offs = list(range(lo, hi + 1))
    ell, eps = params.ell, params.eps
    if workers <= 1 or len(offs) < 64:
        return np.array(_column_worker((ell, eps, n_off, offs, x, normalized)), dtype=complex)
    chunks = [offs[i::workers] for i in range(workers)]
    out = np.empty(len(offs), dtype=complex)
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for i, vals in enumerate(ex.map(_column_worker, [(ell, eps, n_off, c, x, normalized) for c in chunks])):
            out[i::workers] = vals
    return out
