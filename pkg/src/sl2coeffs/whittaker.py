"""Whittaker function ``W_{nu,rho}(t)`` for real ``t > 0`` and complex indices.

Four evaluation methods are available:

``Laguerre``
    Closed form when ``nu + rho - 1/2`` (or ``nu - rho - 1/2``) is a
    nonnegative integer ``k``: ``W = e^{-t/2} t^{1/2-rho} k! (-1)^k L_k^{(-2 rho)}(t)``.
``Integral``
    The defining integral
    ``W = t^{rho+1/2} e^{-t/2}/Gamma(a) int_0^inf e^{-tu} u^{a-1} (1+u)^{rho+nu-1/2} du``
    with ``a = rho - nu + 1/2``, computed by the trapezoidal rule in ``s = log u``.
``KummerSeries``
    Connection to two Kummer ``M`` series; needs ``2 rho`` away from the integers.
``OdeBackward``
    Whittaker's equation integrated from a large-``t`` seed (the asymptotic
    series) down to small ``t``; works in the logarithmic cases too.

Large ``t`` beyond the point where the asymptotic series is accurate to
``1e-15`` is answered by that series inside the non-closed-form methods.
"""
from __future__ import annotations

import cmath
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import loggamma

from .errors import AccuracyError, DomainError, RouteError
from .gammakit import recip_gamma

__all__ = [
    "WhittakerQuery",
    "WhittakerResult",
    "METHODS",
    "whittaker_w",
    "whittaker_w_array",
    "whittaker_w_prime",
    "whittaker_asymptotics",
    "WhittakerAsymptotics",
    "laguerre_degree",
]

METHODS = ("Laguerre", "Integral", "KummerSeries", "OdeBackward")
ACCEPT_REL_ERROR = 1e-9
_INT_TOL = 1e-12
_KUMMER_GUARD = 1e-3
_KUMMER_TMAX = 30.0
_ODE_RTOL = 1e-13
_ODE_RTOL_CHECK = 1e-11
_EPS = 2.2e-16


@dataclass(frozen=True)
class WhittakerQuery:
    nu: complex
    rho: complex
    t: float

    @property
    def key(self) -> tuple[complex, complex]:
        """Symmetry class ``(nu, rho^2)``."""
        return complex(self.nu), complex(self.rho) ** 2


@dataclass(frozen=True)
class WhittakerResult:
    value: complex
    method: str
    est_rel_error: float
    flags: tuple[str, ...] = field(default=())


def _canon_rho(rho: complex) -> complex:
    rho = complex(rho)
    if rho.real < 0 or (rho.real == 0 and rho.imag < 0):
        rho = -rho
    return rho + 0.0  # drop negative zeros


def _as_t(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("Whittaker argument t must be > 0")
    return arr


# ---------------------------------------------------------------- Laguerre

def laguerre_degree(nu: complex, rho: complex) -> tuple[int, complex] | None:
    """Return ``(k, r)`` with ``r = +-rho`` and ``k = nu + r - 1/2`` in N0, or None."""
    best = None
    for r in (complex(rho), -complex(rho)):
        k = complex(nu) + r - 0.5
        if abs(k.imag) <= _INT_TOL and abs(k.real - round(k.real)) <= _INT_TOL and round(k.real) >= 0:
            kk = int(round(k.real))
            if best is None or kk < best[0]:
                best = (kk, r)
    return best


def _laguerre(nu, rho, t):
    k, r = laguerre_degree(nu, rho)
    alpha = -2 * r
    # k!(-1)^k L_k^(alpha)(t) = sum_j c_j t^j, c_k = 1, c_{j-1} = -c_j j (alpha+j)/(k-j+1)
    coef = np.empty(k + 1, dtype=complex)
    coef[k] = 1.0
    for j in range(k, 0, -1):
        coef[j - 1] = -coef[j] * j * (alpha + j) / (k - j + 1)
    # evaluate in inverse powers: sum_i c_{k-i} t^{-i}
    inv = 1.0 / t
    s = np.zeros(t.shape, dtype=complex)
    a = np.zeros(t.shape)
    for i in range(k, -1, -1):
        s = s * inv + coef[k - i]
        a = a * inv + abs(coef[k - i])
    # W = e^{-t/2} t^{1/2-r} t^k sum = e^{-t/2} t^{nu} sum
    logpre = -0.5 * t + complex(nu) * np.log(t)
    val = np.exp(logpre) * s
    with np.errstate(divide="ignore", invalid="ignore"):
        est = np.where(np.abs(s) > 0, 4 * (k + 1) * _EPS * a / np.abs(s), 0.0)
    return val, est + 4 * _EPS


# ----------------------------------------------------- large-t asymptotics

def _asym_terms_min(a1, a2, t, kmax=400):
    term = 1.0
    for k in range(kmax):
        r = abs((a1 + k) * (a2 + k)) / ((k + 1) * t)
        if r == 0.0:
            return 0.0
        if r >= 1.0 and k > 0:
            return term
        term *= r
        if term < 1e-18:
            return term
    return term


_threshold_cache: dict[tuple[complex, complex], float] = {}


def _asym_threshold(nu: complex, rho: complex) -> float:
    """Smallest ``t`` (on a geometric ladder) where the asymptotic series reaches ``1e-16``."""
    key = (complex(nu), _canon_rho(rho))
    hit = _threshold_cache.get(key)
    if hit is not None:
        return hit
    a1, a2 = 0.5 + rho - nu, 0.5 - rho - nu
    t = 8.0
    while _asym_terms_min(a1, a2, t) > 1e-16:
        t *= 1.15
    _threshold_cache[key] = t
    return t


def _asym_series(nu, rho, t, deriv=False, kmax=400):
    """Asymptotic series ``e^{-t/2} t^nu sum_k (a1)_k (a2)_k / k! (-t)^{-k}``.

    Returns ``(W, est_rel, W')`` (``W'`` None unless ``deriv``).
    """
    a1, a2 = 0.5 + rho - nu, 0.5 - rho - nu
    t = np.asarray(t, dtype=float)
    S = np.ones(t.shape, dtype=complex)
    dS = np.zeros(t.shape, dtype=complex)
    term = np.ones(t.shape, dtype=complex)
    active = np.ones(t.shape, dtype=bool)
    last = np.zeros(t.shape)
    for k in range(kmax):
        new = term * (-(a1 + k) * (a2 + k) / ((k + 1) * t))
        grow = (np.abs(new) > np.abs(term)) & (k > 0)
        stop = active & grow
        last = np.where(stop, np.abs(term), last)
        active &= ~grow
        S = np.where(active, S + new, S)
        dS = np.where(active, dS - (k + 1) * new / t, dS)
        term = np.where(active, new, term)
        small = active & (np.abs(new) <= 1e-17 * np.abs(S))
        last = np.where(small, np.abs(new), last)
        active &= ~small
        if not active.any():
            break
    last = np.where(active, np.abs(term), last)
    pre = np.exp(-0.5 * t + nu * np.log(t))
    W = pre * S
    est = last / np.maximum(np.abs(S), 1e-300) + 4 * _EPS
    if deriv:
        dW = W * (-0.5 + nu / t) + pre * dS
        return W, est, dW
    return W, est, None


# ------------------------------------------------------------------ Kummer

def _kummer_m(a, b, t, kmax=3000):
    """Kummer ``M(a, b, t)`` by its power series; returns value and ``sum|terms|``."""
    S = np.ones(t.shape, dtype=complex)
    A = np.ones(t.shape)
    term = np.ones(t.shape, dtype=complex)
    for k in range(kmax):
        term = term * ((a + k) / ((b + k) * (k + 1))) * t
        S = S + term
        at = np.abs(term)
        A = A + at
        if k > abs(a) + 2 and np.all(at <= 1e-17 * np.abs(S)):
            break
    return S, A


def kummer_applicable(rho: complex) -> bool:
    z = 2 * complex(rho)
    return abs(z.imag) > _KUMMER_GUARD or abs(z.real - round(z.real)) > _KUMMER_GUARD


def _kummer(nu, rho, t):
    if not kummer_applicable(rho):
        raise RouteError("Kummer connection needs 2*rho away from the integers")
    nu, rho = complex(nu), complex(rho)
    A = cmath.exp(loggamma(-2 * rho)) * recip_gamma(0.5 - rho - nu)
    B = cmath.exp(loggamma(2 * rho)) * recip_gamma(0.5 + rho - nu)
    lt = np.log(t)
    M1, S1 = _kummer_m(0.5 + rho - nu, 1 + 2 * rho, t)
    M2, S2 = _kummer_m(0.5 - rho - nu, 1 - 2 * rho, t)
    p1 = A * np.exp(-0.5 * t + (0.5 + rho) * lt)
    p2 = B * np.exp(-0.5 * t + (0.5 - rho) * lt)
    W = p1 * M1 + p2 * M2
    scale = np.abs(p1) * S1 + np.abs(p2) * S2
    est = 16 * _EPS * scale / np.maximum(np.abs(W), 1e-300)
    return W, est


# ---------------------------------------------------------------- Integral

def integral_applicable(nu: complex, rho: complex) -> bool:
    r = _canon_rho(rho)
    return (r - complex(nu) + 0.5).real > 0.02


def _integral_scalar(nu, rho, t, keep_sign=False):
    # keep_sign: integrate with rho as given rather than its canonical sign,
    # which gives an independent representation for symmetry checks
    nu = complex(nu)
    r = complex(rho) if keep_sign else _canon_rho(rho)
    a = r - nu + 0.5
    if a.real <= 0.02:
        raise RouteError("defining integral needs Re(rho - nu + 1/2) > 0")
    c = r + nu - 0.5

    def logf(s):
        return -t * np.exp(s) + a * s + c * np.logaddexp(0.0, s)

    s_lo = -40.0 - math.log(max(1.0, t, abs(c)))
    s_hi = max(s_lo + 1.0, math.log(max(1.0, 50.0 + abs(a) + abs(c)) / t) + 2.0)
    coarse = np.arange(s_lo, s_hi, 0.25)
    peak = float(np.max(logf(coarse).real))
    while logf(np.array([s_hi]))[0].real > peak - 46.0:
        s_hi += 2.0
    prev = None
    trunc = 1.0
    h = 0.125
    for _ in range(6):
        s = np.arange(s_lo, s_hi + h, h)
        lf = logf(s)
        shift = float(np.max(lf.real))
        f = np.exp(lf - shift)
        q = cmath.exp(-a * h)
        # geometric tail below s_lo, where the integrand is ~e^{a s}
        tail = f[0] * q / (1 - q)
        total = h * (f.sum() + tail)
        absum = h * (np.abs(f).sum() + abs(tail))
        if prev is not None:
            trunc = abs(total - prev[0] * math.exp(prev[1] - shift)) / abs(total)
            if trunc <= 1e-13:
                break
        prev = (total, shift)
        h /= 2
    logpre = (r + 0.5) * math.log(t) - 0.5 * t - loggamma(a) + shift
    val = cmath.exp(logpre) * total
    est = trunc + 16 * _EPS * absum / max(abs(total), 1e-300) * (1 + abs(loggamma(a)) * 0.1)
    return complex(val), float(est)


# --------------------------------------------------------------------- ODE

class _OdeCache:
    """LRU of dense backward solutions keyed by ``(nu, canonical rho, rtol)``."""

    def __init__(self, size: int = 64):
        self.size = size
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()

    def get(self, nu, rho, t_lo, rtol):
        key = (nu, rho, rtol)
        with self._lock:
            hit = self._data.get(key)
            if hit is not None and hit[0] <= t_lo:
                self._data.move_to_end(key)
                return hit
        want = t_lo if hit is None else min(t_lo, hit[0])
        # extra decades are cheap in the log variable and spare re-solves
        sol = _ode_solve(nu, rho, want / 1000.0, rtol)
        with self._lock:
            self._data[key] = sol
            self._data.move_to_end(key)
            while len(self._data) > self.size:
                self._data.popitem(last=False)
        return sol

    def clear(self):
        with self._lock:
            self._data.clear()


_ode_cache = _OdeCache()


def _ode_solve(nu, rho, t_lo, rtol):
    T0 = max(_asym_threshold(nu, rho), 20.0)
    W0, _, dW0 = _asym_series(nu, rho, np.array([T0]), deriv=True)
    W0, dW0 = complex(W0[0]), complex(dW0[0])
    q0 = rho * rho - 0.25

    # W = e^{-t/2} u in s = log t: u'' = (1 + t) u' + (q0 - nu t) u.  The
    # exponential is exact, so the steps only have to resolve u.
    def f(s, y):
        t = math.exp(s)
        return np.array([y[1], (1.0 + t) * y[1] + (q0 - nu * t) * y[0]])

    # normalized so that u(s0) = 1
    y0 = np.array([1.0 + 0j, T0 * dW0 / W0 + 0.5 * T0])
    s0, s1 = math.log(T0), math.log(t_lo)
    # u can fall by hundreds of decades for large nu; keep the control relative
    sol = solve_ivp(f, (s0, s1), y0, method="DOP853", rtol=rtol, atol=1e-300, dense_output=True)
    if not sol.success:
        raise AccuracyError(f"ODE integration failed: {sol.message}")
    return (t_lo, T0, W0, sol.sol)


def _ode(nu, rho, t, check=True):
    nu, r = complex(nu), _canon_rho(rho)
    t_lo = float(np.min(t))
    _, T0, W0, dense = _ode_cache.get(nu, r, t_lo, _ODE_RTOL)
    inside = t < T0
    val = np.empty(t.shape, dtype=complex)
    est = np.empty(t.shape)
    if (~inside).any():
        v, e, _ = _asym_series(nu, r, t[~inside])
        val[~inside], est[~inside] = v, e
    if inside.any():
        s = np.log(t[inside])
        ti = t[inside]
        y = dense(s)[0] * W0 * np.exp(0.5 * (T0 - ti))
        val[inside] = y
        if check:
            _, _, W0b, dense_b = _ode_cache.get(nu, r, t_lo, _ODE_RTOL_CHECK)
            yb = dense_b(s)[0] * W0b * np.exp(0.5 * (T0 - ti))
            est[inside] = np.abs(y - yb) / np.maximum(np.abs(y), 1e-300) + 1e-13
        else:
            est[inside] = 1e-12
    return val, est


# -------------------------------------------------------------- dispatcher

def whittaker_w_array(nu: complex, rho: complex, t, *, with_error: bool = False):
    """Vectorized ``W_{nu,rho}(t)`` over an array of ``t > 0``.

    Picks, per point, the cheapest accurate method: Laguerre closed form when
    available, else the asymptotic series for large ``t``, the Kummer
    connection for moderate ``t``, and the cached ODE solution otherwise.

    Parameters
    ----------
    nu, rho : complex
    t : array_like of float
    with_error : bool
        Also return the per-point relative error estimate.
    """
    nu, rho = complex(nu), _canon_rho(rho)
    t = _as_t(t)
    shape = t.shape
    t = t.ravel()
    if laguerre_degree(nu, rho) is not None:
        val, est = _laguerre(nu, rho, t)
    else:
        val = np.empty(t.shape, dtype=complex)
        est = np.full(t.shape, np.inf)
        T = _asym_threshold(nu, rho)
        big = t >= T
        if big.any():
            val[big], est[big], _ = _asym_series(nu, rho, t[big])
        rest = ~big
        if rest.any() and kummer_applicable(rho):
            sel = rest & (t <= _KUMMER_TMAX)
            if sel.any():
                v, e = _kummer(nu, rho, t[sel])
                ok = e <= 1e-11
                idx = np.flatnonzero(sel)[ok]
                val[idx], est[idx] = v[ok], e[ok]
                rest = rest & ~np.isin(np.arange(t.size), idx)
        if rest.any():
            v, e = _ode(nu, rho, t[rest], check=with_error)
            val[rest], est[rest] = v, e
    val = val.reshape(shape)
    return (val, est.reshape(shape)) if with_error else val


def _method_eval(method, nu, rho, t):
    arr = np.array([t])
    if method == "Laguerre":
        if laguerre_degree(nu, rho) is None:
            raise RouteError("Laguerre closed form needs nu +- rho - 1/2 in N0")
        v, e = _laguerre(nu, rho, arr)
    elif method == "Integral":
        return _integral_scalar(nu, rho, t)
    elif method == "KummerSeries":
        v, e = _kummer(nu, rho, arr)
    elif method == "OdeBackward":
        v, e = _ode(nu, rho, arr)
    else:
        raise ValueError(f"unknown Whittaker method {method!r}")
    return complex(v[0]), float(e[0])


def whittaker_w(nu, rho=None, t=None, *, method: str | None = None) -> WhittakerResult:
    """Evaluate ``W_{nu,rho}(t)`` with an a-posteriori error estimate.

    Parameters
    ----------
    nu, rho : complex
        Indices; a :class:`WhittakerQuery` may be passed as the only argument.
    t : float
        Positive argument.
    method : str, optional
        Force one of ``METHODS``.  By default they are tried in the order
        Laguerre, Integral, KummerSeries, OdeBackward and the first estimate
        below ``1e-9`` wins.

    Raises
    ------
    DomainError
        If ``t <= 0``.
    AccuracyError
        If no method reaches the acceptance tolerance.
    """
    if isinstance(nu, WhittakerQuery):
        nu, rho, t = nu.nu, nu.rho, nu.t
    nu, rho, t = complex(nu), complex(rho), float(t)
    if not t > 0:
        raise DomainError("Whittaker argument t must be > 0")
    if method is not None:
        v, e = _method_eval(method, nu, rho, t)
        return WhittakerResult(v, method, e)
    tried = []
    for m in METHODS:
        if m == "Laguerre" and laguerre_degree(nu, rho) is None:
            continue
        if m == "Integral" and not integral_applicable(nu, rho):
            continue
        if m == "KummerSeries" and not kummer_applicable(rho):
            continue
        try:
            v, e = _method_eval(m, nu, rho, t)
        except (RouteError, AccuracyError, FloatingPointError):
            continue
        if np.isfinite(e) and e <= ACCEPT_REL_ERROR and np.isfinite(v.real) and np.isfinite(v.imag):
            return WhittakerResult(v, m, e)
        tried.append((m, e))
    raise AccuracyError(f"W_{{{nu},{rho}}}({t}): no method reached 1e-9 (tried {tried})")


def whittaker_w_prime(nu, rho=None, t=None) -> complex:
    """Derivative ``W' = -W_{nu+1,rho}/t - (nu/t - 1/2) W_{nu,rho}``."""
    if isinstance(nu, WhittakerQuery):
        nu, rho, t = nu.nu, nu.rho, nu.t
    w0 = whittaker_w(nu, rho, t).value
    w1 = whittaker_w(complex(nu) + 1, rho, t).value
    return -w1 / t - (nu / t - 0.5) * w0


@dataclass(frozen=True)
class WhittakerAsymptotics:
    """Leading behaviour as ``t -> inf`` and ``t -> 0``.

    ``small_t_leading`` is None when ``log_flag`` is set (``rho = 0``: the
    ``sqrt(t) log t`` regime).
    """

    large_t_leading: complex
    small_t_leading: complex | None
    log_flag: bool


def whittaker_asymptotics(nu, rho=None, t=None) -> WhittakerAsymptotics:
    """Leading terms ``e^{-t/2} t^nu`` and the small-``t`` connection form.

    For ``2 rho`` not an integer the small-``t`` form is
    ``Gamma(-2rho)/Gamma(1/2-nu-rho) t^{rho+1/2} + Gamma(2rho)/Gamma(1/2-nu+rho) t^{1/2-rho}``.
    For nonzero half-integer or integer ``rho`` only the dominant
    ``Gamma(2|rho|)/Gamma(1/2-nu+|rho|) t^{1/2-|rho|}`` term is returned.
    """
    if isinstance(nu, WhittakerQuery):
        nu, rho, t = nu.nu, nu.rho, nu.t
    nu, rho, t = complex(nu), _canon_rho(rho), float(t)
    if not t > 0:
        raise DomainError("t must be > 0")
    lt = math.log(t)
    large = cmath.exp(-0.5 * t + nu * lt)
    if abs(rho) <= _INT_TOL:
        return WhittakerAsymptotics(large, None, True)
    z = 2 * rho
    if abs(z.imag) > _INT_TOL or abs(z.real - round(z.real)) > _INT_TOL:
        small = (
            cmath.exp(loggamma(-z)) * recip_gamma(0.5 - nu - rho) * cmath.exp((rho + 0.5) * lt)
            + cmath.exp(loggamma(z)) * recip_gamma(0.5 - nu + rho) * cmath.exp((0.5 - rho) * lt)
        )
    else:
        small = cmath.exp(loggamma(z)) * recip_gamma(0.5 - nu + rho) * cmath.exp((0.5 - rho) * lt)
    return WhittakerAsymptotics(large, complex(small), False)
