"""Basis functions on the line model, their Fourier transforms and the
column-embedding limit objects.

Fourier convention: ``f^(y) = (2 pi)^{-1/2} int e^{-ity} f(t) dt``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

import numpy as np
from scipy import integrate

from .coeffs import coeff_column
from .errors import AccuracyError, DomainError
from .gammakit import recip_gamma
from .params import ReprParams
from .whittaker import whittaker_w_array

__all__ = [
    "basis_fn",
    "basis_ft_closed",
    "basis_ft_quadrature",
    "StepFunction",
    "column_step_fn",
    "apl2_distance",
    "PairingResult",
    "apfour_pairing",
    "riemann_pairing",
]

_SQRT_PI = math.sqrt(math.pi)
_SQRT_2PI = math.sqrt(2 * math.pi)


def _chi(chi) -> ReprParams:
    return chi if isinstance(chi, ReprParams) else ReprParams(*chi)


def basis_fn(chi, m_off: int, t):
    """``e_m(t) = pi^{-1/2} e^{-i pi (m+eps)} e^{2i(m+eps) arctan t} (t^2+1)^ell``."""
    p = _chi(chi)
    mu = m_off + p.eps
    t = np.asarray(t, dtype=float)
    out = np.exp(-1j * math.pi * mu + 2j * mu * np.arctan(t) + p.ell * np.log1p(t * t)) / _SQRT_PI
    return complex(out) if out.ndim == 0 else out


def basis_ft_closed(chi, n: float, y):
    """Closed-form Fourier transform of ``e_{n-eps}``.

    ``e^{-i pi n} 2^{ell+1/2} |y|^{-ell-1} / Gamma(sgn(y) n - ell) W_{sgn(y) n, ell+1/2}(2|y|)``.

    Parameters
    ----------
    chi : ReprParams or (ell, eps)
    n : float
        Actual index in ``eps + Z``.
    y : float or array
        Nonzero.
    """
    p = _chi(chi)
    ell = p.ell
    y = np.asarray(y, dtype=float)
    if np.any(y == 0):
        raise DomainError("basis_ft_closed is evaluated at y != 0")
    yf = y.ravel()
    out = np.zeros(yf.shape, dtype=complex)
    pre = np.exp(-1j * math.pi * n + (ell + 0.5) * math.log(2))
    for sg in (1, -1):
        sel = np.sign(yf) == sg
        if not sel.any():
            continue
        nu = sg * n
        rg = recip_gamma(nu - ell)
        if rg == 0:
            continue
        a = np.abs(yf[sel])
        out[sel] = pre * rg * np.exp(-(ell + 1) * np.log(a)) * whittaker_w_array(nu, ell + 0.5, 2 * a)
    out = out.reshape(y.shape)
    return complex(out) if out.ndim == 0 else out


def basis_ft_quadrature(chi, n: float, y: float, *, abs_tol: float = 1e-6) -> complex:
    """Fourier transform of ``e_{n-eps}`` by oscillatory quadrature.

    Folds the line onto ``[0, inf)`` and integrates against ``cos`` and
    ``sin`` weights with QUADPACK's Fourier-integral routine.  Needs
    ``Re ell < -1/2`` for absolute integrability.

    Raises
    ------
    AccuracyError
        When the reported quadrature error exceeds ``abs_tol``.
    """
    p = _chi(chi)
    ell = p.ell
    if not ell.real < -0.5:
        raise DomainError("quadrature transform needs Re(ell) < -1/2")
    y = float(y)
    if y == 0:
        raise DomainError("y must be nonzero")
    w = abs(y)
    ph = np.exp(-1j * math.pi * n) / _SQRT_PI

    def even(t):  # f(t) + f(-t)
        return ph * 2 * np.cos(2 * n * np.arctan(t)) * np.exp(ell * np.log1p(t * t))

    def odd(t):  # f(t) - f(-t)
        return ph * 2j * np.sin(2 * n * np.arctan(t)) * np.exp(ell * np.log1p(t * t))

    err = 0.0
    vals = {}
    for name, func, wt in (("c", even, "cos"), ("s", odd, "sin")):
        parts = []
        for comp in (np.real, np.imag):
            v, e = integrate.quad(lambda t: comp(func(t)), 0, np.inf, weight=wt, wvar=w, limlst=200, epsabs=1e-11)
            parts.append(v)
            err += e
        vals[name] = complex(parts[0], parts[1])
    sgn = 1.0 if y > 0 else -1.0
    total = (vals["c"] - 1j * sgn * vals["s"]) / _SQRT_2PI
    if err / _SQRT_2PI > abs_tol:
        raise AccuracyError(f"Fourier quadrature error estimate {err:.1e} exceeds {abs_tol:.0e}")
    return total


# ------------------------------------------------------------ step functions

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GLAG_X, _GLAG_W = np.polynomial.laguerre.laggauss(64)


@dataclass
class StepFunction:
    """Piecewise-constant function on contiguous cells of width ``cell_width``.

    ``lefts[k]`` is the left endpoint of cell ``k`` and ``values[k]`` its value.
    """

    cell_width: float
    lefts: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.lefts = np.asarray(self.lefts, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.lefts.shape != self.values.shape:
            raise ValueError("lefts and values must have equal length")
        if len(self.lefts) > 1 and not np.allclose(np.diff(self.lefts), self.cell_width, rtol=1e-9, atol=1e-12):
            raise ValueError("cells must be contiguous")

    @property
    def cells(self) -> list[tuple[float, complex]]:
        return list(zip(self.lefts.tolist(), self.values.tolist()))

    @property
    def support(self) -> tuple[float, float]:
        return float(self.lefts[0]), float(self.lefts[-1] + self.cell_width)

    def l2_norm(self) -> float:
        return math.sqrt(self.cell_width) * float(np.linalg.norm(self.values))

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        edges = np.append(self.lefts, self.lefts[-1] + self.cell_width)
        k = np.searchsorted(edges, y, side="right") - 1
        inside = (k >= 0) & (k < len(self.values))
        out = np.where(inside, self.values[np.clip(k, 0, len(self.values) - 1)], 0)
        return out

    def l2_distance(self, g: Callable[[np.ndarray], np.ndarray], *, tail: bool = True) -> float:
        """``||S - g||_2`` for a vectorized ``g`` defined off ``y = 0``.

        Cells touching ``y = 0`` are integrated in the variable ``log|y|``;
        the mass of ``g`` outside the window is added when ``tail`` is set.
        """
        w = self.cell_width
        lo, hi = self.lefts, self.lefts + w
        total = 0.0
        regular = (lo >= 0) | (hi <= 0)
        regular &= ~((lo == 0) | (hi == 0))
        # Gauss-Legendre on regular cells
        idx = np.flatnonzero(regular)
        if idx.size:
            mid = 0.5 * (lo[idx] + hi[idx])
            ys = mid[:, None] + 0.5 * w * _GL_X[None, :]
            gv = g(ys.ravel()).reshape(ys.shape)
            d2 = np.abs(gv - self.values[idx][:, None]) ** 2
            total += float(np.sum(d2 @ _GL_W) * 0.5 * w)
        # cells with 0 in the closure: split at 0 and integrate each side in log|y|
        for k in np.flatnonzero(~regular):
            for a, b in ((lo[k], min(hi[k], 0.0)), (max(lo[k], 0.0), hi[k])):
                if b - a <= 0:
                    continue
                total += _log_side(lambda y: np.abs(g(y) - self.values[k]) ** 2, a, b)
        if tail:
            a, b = self.support
            total += _tail_mass(g, b, +1) + _tail_mass(g, a, -1)
        return math.sqrt(total)

    def to_csv(self, target=None) -> str:
        """Write columns ``left, right, re, im``; returns the CSV text."""
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["left", "right", "re", "im"])
        for left, v in zip(self.lefts, self.values):
            wr.writerow([repr(float(left)), repr(float(left + self.cell_width)), repr(float(v.real)), repr(float(v.imag))])
        text = buf.getvalue()
        if target is not None:
            Path(target).write_text(text)
        return text


def _log_side(f, a, b):
    """``int_a^b f`` where one endpoint is 0; substitution ``|y| = L e^{-u}``."""
    if a == 0:
        L, sgn = b, 1.0
    else:
        L, sgn = -a, -1.0
    u = _GLAG_X
    ys = sgn * L * np.exp(-u)
    # int_0^L f(sgn r) dr = L int_0^inf f(sgn L e^-u) e^-u du; laggauss weight is e^-u
    return float(L * np.dot(_GLAG_W, f(ys).real))


def _tail_mass(g, edge, direction):
    if direction > 0 and edge <= 0 or direction < 0 and edge >= 0:
        return 0.0
    f = lambda y: float(np.abs(g(np.array([y])))[0] ** 2)  # noqa: E731
    if direction > 0:
        v, _ = integrate.quad(f, edge, np.inf, limit=200)
    else:
        v, _ = integrate.quad(f, -np.inf, edge, limit=200)
    return v


def column_step_fn(chi, n_off: int, x: float, window: tuple[int, int], *, workers: int = 1) -> StepFunction:
    """Step-function embedding of a coefficient column.

    Cell ``[m/x, (m+1)/x)`` carries ``(2x)^{ell+1}/sqrt(2) e^{-i pi m} P_{mn}(x)``
    for ``m = m_off + eps`` with ``m_off`` in ``window`` (inclusive).
    """
    p = _chi(chi)
    x = float(x)
    if x < 1:
        raise DomainError("x must be >= 1")
    lo, hi = int(window[0]), int(window[1])
    col = coeff_column(p, n_off, x, (lo, hi), workers=workers)
    ms = np.arange(lo, hi + 1) + p.eps
    vals = np.exp((p.ell + 1) * math.log(2 * x) - 1j * math.pi * ms) / math.sqrt(2) * col
    return StepFunction(1.0 / x, ms / x, vals)


def apl2_distance(chi, n_off: int, x: float, variant: str = "direct", *, m_max: int | None = None) -> float:
    """l2 distance over ``m > 0`` between a column and its Whittaker approximant.

    ``direct``: ``P_{mn}(x)`` against ``(-1)^{m-n} W_{n,i lam}(2m/x) / (m^{ell+1} Gamma(n-ell))``.
    ``cayley``: ``P_{mn}((x+1/x)/2)`` against the same expression with ``W(4m/x)``.
    """
    p = _chi(chi)
    ell = p.ell
    if abs(ell.real + 0.5) > 1e-12:
        raise DomainError("apl2_distance is defined for the principal series")
    x = float(x)
    if variant == "direct":
        arg, tfac = x, 2.0
    elif variant == "cayley":
        arg, tfac = 0.5 * (x + 1.0 / x), 4.0
    else:
        raise ValueError("variant must be 'direct' or 'cayley'")
    n = n_off + p.eps
    first = math.floor(-p.eps) + 1  # smallest offset with m > 0
    last = m_max if m_max is not None else int(math.ceil(40 * x)) + 2
    offs = np.arange(first, last + 1)
    ms = offs + p.eps
    col = coeff_column(p, n_off, arg, (first, last))
    rg = recip_gamma(n - ell)
    sign = np.where((offs - n_off) % 2 == 0, 1.0, -1.0)
    appr = sign * rg * np.exp(-(ell + 1) * np.log(ms)) * whittaker_w_array(n, ell + 0.5, tfac * ms / x)
    return float(np.linalg.norm(col - appr))


@dataclass(frozen=True)
class PairingResult:
    lhs: complex
    rhs: complex

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)


def _pair_quad(f, a, b):
    re, _ = integrate.quad(lambda y: f(np.array([y]))[0].real, a, b, limit=200)
    im, _ = integrate.quad(lambda y: f(np.array([y]))[0].imag, a, b, limit=200)
    return complex(re, im)


def apfour_pairing(
    h: Callable[[np.ndarray], np.ndarray],
    chi,
    x: float,
    g: Mapping[int, complex],
    support: tuple[float, float],
) -> PairingResult:
    """Pairing of ``T(diag(x, 1/x)) g`` with the rescaled sample vector ``h_x``.

    ``h_x = sqrt(2) x^{-1-2i lam} sum_m e^{i pi m} h(2m/x^2) e_{m-eps}`` and the
    coefficients are taken at ``(x^2 + x^-2)/2``.  The right side is
    ``sum_n g_n (e^_n | h)``.

    Parameters
    ----------
    h : callable
        Vectorized, continuous, vanishing outside ``support``.
    chi : principal-series parameters
    x : float
    g : mapping
        Basis coefficients ``{n_off: g_n}`` of ``g = sum g_n e_{n_off}``.
    support : (float, float)
        Interval containing the support of ``h``, not containing 0.
    """
    p = _chi(chi)
    ell = p.ell
    if abs(ell.real + 0.5) > 1e-12:
        raise DomainError("apfour_pairing is defined for the principal series")
    a, b = map(float, support)
    if a < 0 < b:
        raise DomainError("support must not contain 0")
    lam = ell.imag
    x = float(x)
    X = 0.5 * (x * x + 1.0 / (x * x))
    lo = math.ceil(a * x * x / 2 - p.eps)
    hi = math.floor(b * x * x / 2 - p.eps)
    lhs = 0j
    rhs = 0j
    if not g:
        return PairingResult(0j, 0j)
    if hi >= lo:
        ms = np.arange(lo, hi + 1) + p.eps
        hv = np.asarray(h(2 * ms / (x * x)), dtype=complex)
        hx = math.sqrt(2) * np.exp((-1 - 2j * lam) * math.log(x) + 1j * math.pi * ms) * hv
        for n_off, gn in g.items():
            if gn == 0:
                continue
            col = coeff_column(p, n_off, X, (lo, hi))
            lhs += gn * np.sum(col * np.conj(hx))
    for n_off, gn in g.items():
        if gn == 0:
            continue
        n = n_off + p.eps
        rhs += gn * _pair_quad(lambda y: basis_ft_closed(p, n, y) * np.conj(h(y)), a, b)
    return PairingResult(complex(lhs), complex(rhs))


def riemann_pairing(h, chi, n: float, x: float, support: tuple[float, float]) -> complex:
    """``(2/x^2) sum_m e^(2m/x^2) conj(h(2m/x^2))`` over ``m`` in ``eps + Z``."""
    p = _chi(chi)
    a, b = support
    lo = math.ceil(a * x * x / 2 - p.eps)
    hi = math.floor(b * x * x / 2 - p.eps)
    ms = np.arange(lo, hi + 1) + p.eps
    ms = ms[ms != 0]
    ys = 2 * ms / (x * x)
    return complex(2 / (x * x) * np.sum(basis_ft_closed(p, n, ys) * np.conj(h(ys))))
