"""Whittaker-function approximants for the matrix coefficients and their
residual harness.

For ``m`` in ``n + N0`` with ``m > 0`` and ``x >= 1`` the coefficient is
approximated by

    (-1)^{m-n} / (m^{ell+1} Gamma(n - ell)) * W_{n, ell+1/2}(2m/x)

with a regime-dependent normalization (discrete and complementary series) and
error scale.  :func:`residual_scan` measures the scaled residual over a grid
and checks that it shows no growth trend.
"""
from __future__ import annotations

import cmath
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln, gammasgn

from .coeffs import cal_p_value, frak_p_value
from .errors import ConvergenceError, DomainError, RouteError
from .gammakit import binomial_general, inc_gamma_pq, pochhammer, recip_gamma
from .params import SeriesKind, is_index
from .whittaker import whittaker_w_array

__all__ = [
    "approx_principal",
    "approx_discrete",
    "approx_complementary",
    "approx_general",
    "ApproxResult",
    "ConstantTerm",
    "constant_term",
    "log_limit_ell_half",
    "log_limit_ratio",
    "gamma_average_taylor",
    "TailMass",
    "gamma_tail_mass",
    "PointStat",
    "ScanReport",
    "residual_scan",
    "snap_m_grid",
    "SLOPE_THRESHOLD",
]

SLOPE_THRESHOLD = 0.1
DISAGREE_RTOL = 1e-7


def _sign_diff(m, n) -> np.ndarray:
    d = np.rint(np.asarray(m, dtype=float) - np.asarray(n, dtype=float))
    return np.where(np.mod(d, 2) == 0, 1.0, -1.0)


def _check_lattice(m, n):
    d = np.asarray(m, dtype=float) - float(n)
    if np.any(np.abs(d - np.rint(d)) > 1e-9) or np.any(np.rint(d) < 0):
        raise DomainError("approximants need m in n + N0")
    if np.any(np.asarray(m) <= 0):
        raise DomainError("approximants need m > 0")


def _w(n, rho, m, x):
    m = np.asarray(m, dtype=float)
    x = np.asarray(x, dtype=float)
    t = 2.0 * m / x
    return whittaker_w_array(n, rho, t)


def approx_general(ell: complex, m, n: float, x):
    """Main term and error scale for complex ``ell``.

    Returns
    -------
    main : complex or ndarray
        ``(-1)^{m-n} / (m^{ell+1} Gamma(n-ell)) W_{n,ell+1/2}(2m/x)``.
    error_scale : float or ndarray
        ``m^{-Re ell - 3} (m/x)^{l1}`` with ``l1 = 1/2 - |Re ell + 1/2|``.
    """
    ell = complex(ell)
    _check_lattice(m, n)
    m_arr = np.asarray(m, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    rg = recip_gamma(n - ell)
    lr = ell.real
    l1 = 0.5 - abs(lr + 0.5)
    scale = m_arr ** (-lr - 3.0) * (m_arr / x_arr) ** l1
    if rg == 0:
        main = np.zeros(np.broadcast(m_arr, x_arr).shape, dtype=complex)
    else:
        main = _sign_diff(m_arr, n) * rg * np.exp(-(ell + 1) * np.log(m_arr)) * _w(n, ell + 0.5, m_arr, x_arr)
    if main.ndim == 0:
        return complex(main), float(scale)
    return main, scale


def approx_principal(ell: complex, m, n: float, x):
    """Main term for the principal series, ``ell = -1/2 + i lam``.

    Returns exactly zero when ``ell = -1/2`` and ``n`` is in ``1/2 - N``.
    """
    ell = complex(ell)
    if abs(ell.real + 0.5) > 1e-12:
        raise DomainError("approx_principal needs Re(ell) = -1/2")
    return approx_general(complex(-0.5, ell.imag), m, n, x)[0]


def _discrete_norm(ell, m, n):
    # (m Gamma(ell+n+1) Gamma(n-ell))^{-1/2}, positive on the discrete series
    return np.exp(-0.5 * (np.log(m) + gammaln(ell + n + 1) + gammaln(n - ell)))


def approx_discrete(ell: float, m, n: float, x):
    """Main term for the discrete series ``T_ell^+`` (``n`` in ``-ell + N0``).

    ``(-1)^{m-n} (m (ell+n)! Gamma(n-ell))^{-1/2} W_{n,ell+1/2}(2m/x)``, where
    ``W`` is a Laguerre closed form.
    """
    ell = float(ell)
    if not (ell < 0 and is_index(n, -ell)):
        raise DomainError("approx_discrete needs ell < 0 and n in -ell + N0")
    _check_lattice(m, n)
    m_arr = np.asarray(m, dtype=float)
    out = _sign_diff(m_arr, n) * _discrete_norm(ell, m_arr, n) * _w(n, ell + 0.5, m_arr, x)
    return complex(out) if np.ndim(out) == 0 else out


def approx_complementary(ell: float, eps: float, m, n: float, x):
    """Main term for the complementary series.

    ``(-1)^{m-n} sgn(Gamma(n-ell)) (m Gamma(n-ell) Gamma(n+ell+1))^{-1/2}
    W_{n,ell+1/2}(2m/x)``; in this regime ``Gamma(n-ell)`` and
    ``Gamma(n+ell+1)`` share their sign.
    """
    ell = float(ell)
    if not (-1 < ell < 0 and abs(eps) < 0.5 - abs(0.5 + ell)):
        raise DomainError("(ell, eps) outside the complementary window")
    if not is_index(n, eps, nonneg=False):
        raise DomainError("n must lie in eps + Z")
    _check_lattice(m, n)
    s1, s2 = gammasgn(n - ell), gammasgn(n + ell + 1)
    if s1 * s2 <= 0:
        raise DomainError("Gamma(n-ell) and Gamma(n+ell+1) must share their sign")
    m_arr = np.asarray(m, dtype=float)
    norm = np.exp(-0.5 * (np.log(m_arr) + gammaln(n - ell) + gammaln(n + ell + 1)))
    out = _sign_diff(m_arr, n) * s1 * norm * _w(n, ell + 0.5, m_arr, x)
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ApproxResult:
    approx: complex
    exact: complex
    residual: complex
    scaled_sup_stat: float


# ---------------------------------------------------------- constant term

@dataclass(frozen=True)
class ConstantTerm:
    """Leading oscillation ``alpha cos(lam log x + beta)`` of ``sqrt(x) P(x)``.

    ``alpha`` carries the phase of ``sgn((ell-m+1)_{m-n})``; ``amplitude`` is
    ``|alpha|``.  ``fitted_amplitude`` and ``beta`` come from a least squares
    fit when requested.
    """

    alpha: complex
    amplitude: float
    beta: float | None = None
    fitted_amplitude: float | None = None
    fit_residual: float | None = None


def constant_term(
    lam: float,
    eps: float,
    m_off: int,
    n_off: int,
    *,
    fit: bool = True,
    x_range: tuple[float, float] = (1e3, 1e4),
    samples: int = 160,
) -> ConstantTerm:
    """Closed-form amplitude and fitted phase of the leading oscillation.

    Parameters
    ----------
    lam : float
        ``ell = -1/2 + i lam``, ``lam > 0``.
    eps : float
    m_off, n_off : int
        Index offsets, ``m = m_off + eps``, ``n = n_off + eps``, ``m >= n``.
    fit : bool
        Fit ``A cos(lam log x) + B sin(lam log x)`` to ``sqrt(x) P(x)`` over
        ``x_range`` (log-uniform samples).
    """
    lam = float(lam)
    if lam == 0:
        raise DomainError("lam = 0 has a logarithmic limit; use log_limit_ell_half")
    if lam < 0:
        raise DomainError("constant_term needs lam > 0")
    d = int(m_off) - int(n_off)
    if d < 0:
        raise DomainError("constant_term needs m - n >= 0")
    ell = complex(-0.5, lam)
    m, n = m_off + eps, n_off + eps
    poch = pochhammer(ell - m + 1, d)
    sgn = poch / abs(poch) if poch != 0 else 0j
    mag = 2 * abs(cmath.cos(math.pi * complex(eps, -lam))) / math.sqrt(math.pi * lam * math.sinh(2 * math.pi * lam))
    alpha = sgn * mag
    if not fit:
        return ConstantTerm(alpha, mag)
    xs = np.exp(np.linspace(math.log(x_range[0]), math.log(x_range[1]), samples))
    vals = np.array([frak_p_value(ell, m, n, d, x).value for x in xs]) * np.sqrt(xs)
    ph = lam * np.log(xs)
    basis = np.column_stack([np.cos(ph), np.sin(ph)]).astype(complex)
    coef, *_ = np.linalg.lstsq(basis, vals, rcond=None)
    A, B = coef
    amp = math.sqrt(abs(A) ** 2 + abs(B) ** 2)
    resid = float(np.max(np.abs(basis @ coef - vals)))
    beta = None
    if alpha != 0:
        # A = alpha cos(beta), B = -alpha sin(beta)
        beta = math.atan2(-(B / alpha).real, (A / alpha).real)
    return ConstantTerm(alpha, mag, beta, amp, resid)


def log_limit_ell_half(m: float, n: float, x: float | None = None) -> float:
    """Limit of ``P^{-1/2}_{mn}(x) sqrt(x)/log x`` as ``x -> inf``: ``sqrt(2) cos(pi m)/pi``."""
    d = m - n
    if abs(d - round(d)) > 1e-9:
        raise DomainError("m - n must be an integer")
    return math.sqrt(2) * math.cos(math.pi * m) / math.pi


def log_limit_ratio(m: float, n: float, x: float) -> float:
    """Finite-``x`` value of ``P^{-1/2}_{mn}(x) sqrt(x)/log x`` (real part)."""
    d = int(round(m - n))
    v = frak_p_value(-0.5, m, n, d, x).value
    return (v * math.sqrt(x) / math.log(x)).real


# ---------------------------------------------------- Laplace machinery

def gamma_average_taylor(
    f: Callable[[float], complex],
    m: float,
    y: float,
    *,
    fpp: Callable[[float], complex] | None = None,
    normalized: bool = False,
    m0: float = 0.5,
) -> complex:
    """Two-term approximant of ``int_0^inf e^{-t} t^{m-1} f(yt) dt``.

    ``Gamma(m) (f(ym) + (y^2 m / 2) f''(ym))``.

    Parameters
    ----------
    f : callable
    m, y : float
    fpp : callable, optional
        Second derivative of ``f``; a central difference is used otherwise.
    normalized : bool
        Drop the ``Gamma(m)`` factor (gamma-distribution expectation).
    m0 : float
        Smallest admissible ``m``.
    """
    if m < m0:
        raise DomainError(f"gamma_average_taylor needs m >= {m0}")
    u = y * m
    if fpp is None:
        h = 1e-3 * max(abs(u), 1e-3)
        f2 = (f(u + h) - 2 * f(u) + f(u - h)) / (h * h)
    else:
        f2 = fpp(u)
    val = f(u) + 0.5 * y * y * m * f2
    if normalized:
        return complex(val)
    return complex(math.exp(gammaln(m)) * val)


@dataclass(frozen=True)
class TailMass:
    """Gamma-weight tail masses below ``m/2`` and above ``2m``.

    ``lower_fraction`` and ``upper_fraction`` are the masses divided by
    ``y^alpha Gamma(m + alpha)``; ``bound_ratio`` is their sum times
    ``(m+1)^beta``.
    """

    lower_tail: float
    upper_tail: float
    bound_ratio: float
    lower_fraction: float
    upper_fraction: float


def gamma_tail_mass(alpha: float, m: float, y: float, beta: float) -> TailMass:
    """Tails of ``int e^{-t} t^{m-1} (yt)^alpha dt`` against ``y^alpha (m+1)^{-beta} Gamma(m+alpha)``."""
    if not (alpha >= 0 and m > 0 and y > 0 and beta > 0):
        raise DomainError("gamma_tail_mass needs alpha >= 0 and m, y, beta > 0")
    a = m + alpha
    p_lo, _ = inc_gamma_pq(a, m / 2)
    _, q_hi = inc_gamma_pq(a, 2 * m)
    scale = alpha * math.log(y) + float(gammaln(a))
    with np.errstate(over="ignore"):
        lower = float(np.exp(math.log(p_lo) + scale)) if p_lo > 0 else 0.0
        upper = float(np.exp(math.log(q_hi) + scale)) if q_hi > 0 else 0.0
    ratio = (p_lo + q_hi) * (m + 1) ** beta
    return TailMass(lower, upper, ratio, p_lo, q_hi)


# ------------------------------------------------------------ residual scan

def snap_m_grid(values: Sequence[float], n: float) -> list[float]:
    """Snap raw values to the index lattice ``n + N0`` restricted to ``m > 0``.

    Order is preserved and duplicates are dropped.
    """
    kmin = max(0, math.floor(-n) + 1) if n <= 0 else 0
    out: list[float] = []
    seen = set()
    for v in values:
        k = max(kmin, int(round(v - n)))
        if k not in seen:
            seen.add(k)
            out.append(n + k)
    return out


@dataclass(frozen=True)
class PointStat:
    x: float
    m: float
    approx: complex
    exact: complex
    exact_alt: complex
    residual: complex
    scaled_sup_stat: float
    route: str
    alt_route: str


def _complex_to_json(z: complex) -> list[float]:
    return [z.real, z.imag]


@dataclass(frozen=True)
class ScanReport:
    """Outcome of :func:`residual_scan`.

    ``trend_slope`` is the larger of the per-``m`` and per-``x`` slopes,
    each a least-squares log-log slope of the maxima over the upper half of
    the grid; the full-range slopes are kept as diagnostics.
    """

    kind: str
    ell: complex
    eps: float
    n: float
    grid: list[tuple[float, float]]
    stats: list[PointStat]
    sup_stat: float
    trend_slope: float
    slope_m: float
    slope_x: float
    slope_m_full: float
    slope_x_full: float
    verdict: str
    excluded_points: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "ell": _complex_to_json(self.ell),
            "eps": self.eps,
            "n": self.n,
            "grid": [list(g) for g in self.grid],
            "stats": [
                {
                    "x": s.x,
                    "m": s.m,
                    "approx": _complex_to_json(s.approx),
                    "exact": _complex_to_json(s.exact),
                    "exact_alt": _complex_to_json(s.exact_alt),
                    "residual": _complex_to_json(s.residual),
                    "scaled_sup_stat": s.scaled_sup_stat,
                    "route": s.route,
                    "alt_route": s.alt_route,
                }
                for s in self.stats
            ],
            "sup_stat": self.sup_stat,
            "trend_slope": self.trend_slope,
            "slope_m": self.slope_m,
            "slope_x": self.slope_x,
            "slope_m_full": self.slope_m_full,
            "slope_x_full": self.slope_x_full,
            "verdict": self.verdict,
            "excluded_points": self.excluded_points,
        }
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "ScanReport":
        c = lambda v: complex(v[0], v[1])  # noqa: E731
        stats = [
            PointStat(
                s["x"], s["m"], c(s["approx"]), c(s["exact"]), c(s["exact_alt"]),
                c(s["residual"]), s["scaled_sup_stat"], s["route"], s["alt_route"],
            )
            for s in d["stats"]
        ]
        return cls(
            d["kind"], c(d["ell"]), d["eps"], d["n"], [tuple(g) for g in d["grid"]], stats,
            d["sup_stat"], d["trend_slope"], d["slope_m"], d["slope_x"],
            d["slope_m_full"], d["slope_x_full"], d["verdict"], list(d["excluded_points"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "ScanReport":
        return cls.from_dict(json.loads(text))


def _exact_pair(task):
    """Two independent evaluations of one grid point (worker function)."""
    kind, ell, eps, n, m, x = task
    d = int(round(m - n))
    normalized = kind in ("DiscretePlus", "Complementary")

    def ev(route):
        if normalized:
            return cal_p_value(ell.real, m, n, d, x, eps, route)
        return frak_p_value(ell, m, n, d, x, route)

    a = ev("Auto")
    if kind == "DiscretePlus":
        alts = ["Jacobi", "Hypergeometric", "GammaAverage"]
    else:
        alts = ["Hypergeometric", "GammaAverage", "MatrixElement"]
    for r in alts:
        if r == a.method:
            continue
        try:
            b = ev(r)
        except (RouteError, ConvergenceError):
            continue
        return a.value, a.method, b.value, b.method
    return a.value, a.method, a.value, "none"


def _slope(xs, ys, upper_half: bool) -> float:
    xs = np.asarray(xs, dtype=float)
    ys = np.maximum(np.asarray(ys, dtype=float), 1e-300)
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]
    if upper_half:
        k = len(xs) // 2
        xs, ys = xs[k:], ys[k:]
    if len(xs) < 2 or np.ptp(np.log(xs)) == 0:
        return 0.0
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def _scaling(kind: str, ell: complex, x, m):
    x, m = np.asarray(x, dtype=float), np.asarray(m, dtype=float)
    if kind in ("Principal", "DiscretePlus"):
        return np.sqrt(x) * m**2
    if kind == "Complementary":
        return m**2.5 * (x / m) ** (0.5 - abs(ell.real + 0.5))
    lr = ell.real
    l1 = 0.5 - abs(lr + 0.5)
    return 1.0 / (m ** (-lr - 3.0) * (m / x) ** l1)


def residual_scan(
    kind: SeriesKind | str,
    ell: complex,
    eps: float,
    n: float,
    x_grid: Sequence[float],
    m_grid: Sequence[float],
    *,
    scaling: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
    workers: int = 1,
) -> ScanReport:
    """Scaled residual of the regime's approximant over ``x_grid x m_grid``.

    Parameters
    ----------
    kind : SeriesKind or str
        ``Principal``, ``DiscretePlus``, ``Complementary`` or
        ``UniformlyBoundedOnly`` (general ``ell`` with its error scale).
    ell : complex
    eps : float
    n : float
        Actual column index.
    x_grid : sequence of float
    m_grid : sequence of float
        Raw values, snapped to ``n + N0`` with ``m > 0``.
    scaling : callable, optional
        Replace the regime scaling ``s(x, m)``; the statistic is
        ``|residual| * s``.  Used for harness self-tests.
    workers : int
        Process count for the exact evaluations; the report does not depend
        on it.

    Returns
    -------
    ScanReport
    """
    if isinstance(kind, str):
        kind = SeriesKind.parse(kind)
    kname = kind.value
    ell = complex(ell)
    ms = snap_m_grid(m_grid, n)
    xs = [float(v) for v in x_grid]
    grid = [(x, m) for x in xs for m in ms]
    X = np.array([g[0] for g in grid])
    M = np.array([g[1] for g in grid])

    if kind == SeriesKind.PRINCIPAL:
        approx = approx_principal(ell, M, n, X)
    elif kind == SeriesKind.DISCRETE_PLUS:
        approx = approx_discrete(ell.real, M, n, X)
    elif kind == SeriesKind.COMPLEMENTARY:
        approx = approx_complementary(ell.real, eps, M, n, X)
    elif kind == SeriesKind.UNIFORMLY_BOUNDED_ONLY:
        approx = approx_general(ell, M, n, X)[0]
    else:
        raise DomainError(f"no approximant for series kind {kname}")

    tasks = [(kname, ell, eps, n, m, x) for x, m in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            pairs = list(ex.map(_exact_pair, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        pairs = [_exact_pair(t) for t in tasks]

    scale = scaling(X, M) if scaling is not None else _scaling(kname, ell, X, M)
    stats = []
    excluded = []
    keep = np.ones(len(grid), dtype=bool)
    for i, ((x, m), (ea, ra, eb, rb)) in enumerate(zip(grid, pairs)):
        res = ea - complex(approx[i])
        stat = float(abs(res) * scale[i])
        stats.append(PointStat(x, m, complex(approx[i]), ea, eb, res, stat, ra, rb))
        big = max(abs(ea), abs(eb))
        if abs(ea - eb) > DISAGREE_RTOL * big:
            keep[i] = False
            excluded.append({"x": x, "m": m, "reason": f"routes {ra}/{rb} differ by {abs(ea - eb) / big:.2e}"})
        elif not math.isfinite(stat):
            keep[i] = False
            excluded.append({"x": x, "m": m, "reason": "non-finite statistic"})

    S = np.array([s.scaled_sup_stat for s in stats])
    Sk = np.where(keep, S, 0.0)
    sup = float(Sk.max()) if keep.any() else math.inf
    per_m = [float(Sk[M == m].max()) for m in ms]
    per_x = [float(Sk[X == x].max()) for x in xs]
    sm, sx = _slope(ms, per_m, True), _slope(xs, per_x, True)
    smf, sxf = _slope(ms, per_m, False), _slope(xs, per_x, False)
    trend = max(sm, sx)
    verdict = "PASS" if (math.isfinite(sup) and trend <= SLOPE_THRESHOLD) else "FAIL"
    return ScanReport(kname, ell, float(eps), float(n), grid, stats, sup, trend, sm, sx, smf, sxf, verdict, excluded)
