"""Acceptance criteria 1-14.

Each test records one ``criterion k: PASS|FAIL ...`` line; the lines are
repeated in the terminal summary (see ``conftest.py``).  Run this file alone
with ``pytest -v tests/test_acceptance.py``.
"""
import math
import time

import mpmath
import numpy as np
import pytest
from scipy import integrate
from scipy.special import gamma, gammaln

from sl2coeffs.asym import SLOPE_THRESHOLD, constant_term, gamma_average_taylor, log_limit_ell_half, log_limit_ratio, residual_scan
from sl2coeffs.coeffs import CoeffQuery, coeff_column, frak_p, frak_p_value
from sl2coeffs.errors import ConvergenceError, RouteError
from sl2coeffs.fourier import apl2_distance, basis_ft_closed, basis_ft_quadrature, column_step_fn
from sl2coeffs.gammakit import binomial_general, inc_gamma_pq, inc_gamma_temme1
from sl2coeffs.hyp2f1 import hyp2f1
from sl2coeffs.params import ReprParams, ub_norm_11_squared, ub_norm_min
from sl2coeffs.quadrature import gamma_average
from sl2coeffs.whittaker import (
    _integral_scalar,
    integral_applicable,
    kummer_applicable,
    whittaker_w,
    whittaker_w_array,
)

pytestmark = pytest.mark.acceptance

XGRID = np.geomspace(1, 100, 20)
MGRID = np.linspace(1, 200, 20)


def verdict(record_property, k, ok, detail):
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    record_property("acceptance", (k, line))
    assert ok, line


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def slope(xs, ys):
    """Least-squares log-log slope over the upper half of the points."""
    k = len(xs) // 2
    return float(np.polyfit(np.log(xs[k:]), np.log(ys[k:]), 1)[0])


# ------------------------------------------------------------------------ 1

def test_c01_identity(record_property):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst_exact, worst_formula = 0.0, 0.0
    for _ in range(50):
        ell = complex(rng.uniform(-2, 1), rng.uniform(-3, 3))
        eps = rng.uniform(-0.5, 0.5)
        mo, no = (int(v) for v in rng.integers(-10, 11, 2))
        if rng.random() < 0.3:
            no = mo
        m, n = mo + eps, no + eps
        r = frak_p(CoeffQuery.make(ell, m, n, 1.0))
        delta = 1.0 if mo == no else 0.0
        worst_exact = max(worst_exact, abs(r.value - delta))
        # the formula itself at x = 1, reduced to m >= n by the index symmetry
        d = mo - no
        mm, nn = (m, n) if d >= 0 else (-m, -n)
        d = abs(d)
        v = binomial_general(ell - nn, d) * (0.0 ** (d / 2)) * 1.0 ** (-(mm + nn) / 2) * hyp2f1(-ell - nn, ell + 1 - nn, d + 1, 0.0)
        worst_formula = max(worst_formula, abs(v - delta))
    dt = time.perf_counter() - t0
    ok = worst_exact == 0 and worst_formula <= 1e-12 and dt < 1.0
    verdict(record_property, 1, ok, f"short-circuit max err {worst_exact:.1e}, formula max err {worst_formula:.1e}, {dt:.2f} s")


# ------------------------------------------------------------------------ 2

def test_c02_cross_route(record_property):
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst, count, skipped = 0.0, 0, 0
    while count < 500:
        ell = complex(-0.5, rng.uniform(-3, 3)) if count % 2 == 0 else complex(rng.uniform(-1, 0), rng.uniform(-3, 3))
        eps = rng.uniform(-0.5, 0.5)
        mo, no = (int(v) for v in rng.integers(-30, 31, 2))
        x = float(np.exp(rng.uniform(math.log(1.01), math.log(100))))
        m, n = mo + eps, no + eps
        try:
            g = frak_p_value(ell, m, n, mo - no, x, "GammaAverage")
            h = frak_p_value(ell, m, n, mo - no, x, "Hypergeometric")
        except (RouteError, ConvergenceError):
            skipped += 1
            continue
        count += 1
        worst = max(worst, rel(g.value, h.value))
    # discrete parameters: ell in -N/2, m, n in -ell + N0
    jworst, jcount = 0.0, 0
    while jcount < 100:
        ell = -0.5 * int(rng.integers(1, 9))
        m = -ell + int(rng.integers(0, 25))
        n = -ell + int(rng.integers(0, 25))
        x = float(np.exp(rng.uniform(math.log(1.01), math.log(100))))
        d = int(round(m - n))
        j = frak_p_value(ell, m, n, d, x, "Jacobi")
        h = frak_p_value(ell, m, n, d, x, "Hypergeometric")
        jworst = max(jworst, abs(j.value - h.value) / max(abs(h.value), 1e-12))
        jcount += 1
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and jworst <= 1e-8 and dt < 60
    verdict(
        record_property, 2, ok,
        f"hyp/gamma-avg max rel {worst:.1e} on 500 ({skipped} resampled), jacobi max rel {jworst:.1e} on 100, {dt:.1f} s",
    )


# ------------------------------------------------------------------------ 3

def test_c03_unitarity(record_property):
    p = ReprParams(complex(-0.5, 1.0), 0.3)
    t0 = time.perf_counter()
    sums = {}
    for x in (2.0, 10.0, 50.0):
        w = int(40 * x)
        col = coeff_column(p, 0, x, (-w, w))
        sums[x] = float(np.sum(np.abs(col) ** 2))
    dt = time.perf_counter() - t0
    ok = all(1 - 1e-4 <= s <= 1 + 1e-6 for s in sums.values()) and dt < 120
    detail = ", ".join(f"x={x:g}: {s - 1:+.1e}" for x, s in sums.items())
    verdict(record_property, 3, ok, f"norm^2 - 1 {detail}, {dt:.1f} s")


# ------------------------------------------------------------------------ 4

def test_c04_whittaker(record_property):
    rng = np.random.default_rng(20240611)
    methods = ("Integral", "KummerSeries", "OdeBackward")
    overlap = []
    tried = 0
    while len(overlap) < 200 and tried < 2000:
        nu = complex(rng.uniform(-2, 2), rng.uniform(-1, 1) * (rng.random() < 0.5))
        rho = complex(rng.uniform(0, 1.5), rng.uniform(-2, 2))
        t = float(np.exp(rng.uniform(math.log(0.05), math.log(25))))
        if not (integral_applicable(nu, rho) and kummer_applicable(rho) and abs(2 * rho - round((2 * rho).real)) > 0.05):
            continue
        tried += 1
        rs = [whittaker_w(nu, rho, t, method=m) for m in methods]
        if all(r.est_rel_error <= 1e-9 for r in rs):
            overlap.append([r.value for r in rs])
    pair = max(rel(v[i], v[j]) for v in overlap for i in range(3) for j in range(i + 1, 3))
    # ODE residual by a five-point second difference
    res = 0.0
    for nu, rho in [(0.0, 0.0), (1.5, 0.0), (0.3, 1.0j), (-0.7 + 0.2j, 0.4 + 0.9j), (2.0, 0.5), (-12.0, 0.3j), (9.5, 1.2)]:
        for t in (0.05, 0.7, 3.0, 12.0, 35.0):
            h = 1e-3 * t
            w = whittaker_w_array(nu, rho, t + h * np.arange(-2, 3))
            d2 = (-w[0] + 16 * w[1] - 30 * w[2] + 16 * w[3] - w[4]) / (12 * h * h)
            coef = 0.25 - nu / t - (0.25 - rho**2) / t**2
            res = max(res, abs(d2 - coef * w[2]) / max(abs(d2), abs(coef * w[2])))
    # rho -> -rho through two independent integral representations
    sym, done = 0.0, 0
    while done < 200:
        nu = rng.uniform(-2, 0.3)
        rho = complex(rng.uniform(-0.1, 0.1), rng.uniform(-2, 2))
        t = float(np.exp(rng.uniform(math.log(0.05), math.log(30))))
        if min((rho - nu + 0.5).real, (-rho - nu + 0.5).real) <= 0.1:
            continue
        a, _ = _integral_scalar(nu, rho, t, keep_sign=True)
        b, _ = _integral_scalar(nu, -rho, t, keep_sign=True)
        sym = max(sym, rel(a, b))
        done += 1
    ok = len(overlap) == 200 and pair <= 1e-9 and res <= 1e-6 and sym <= 1e-10
    verdict(
        record_property, 4, ok,
        f"pairwise max rel {pair:.1e} on {len(overlap)} points, ODE residual {res:.1e}, symmetry {sym:.1e}",
    )


# ------------------------------------------------------------------- 5 - 7

def _scan_line(rep):
    return f"{rep.kind}(ell={rep.ell:.3g}, eps={rep.eps:g}, n={rep.n:g}): sup {rep.sup_stat:.3g}, slopes m {rep.slope_m:+.3f} x {rep.slope_x:+.3f}, excluded {len(rep.excluded_points)}"


def test_c05_principal_scans(record_property):
    t0 = time.perf_counter()
    reps = [residual_scan("Principal", complex(-0.5, lam), 0.0, n, XGRID, MGRID) for lam, n in [(1, 0), (0.5, 1), (2, -1)]]
    fault = residual_scan(
        "Principal", complex(-0.5, 1), 0.0, 0.0, XGRID, MGRID, scaling=lambda x, m: np.sqrt(x) * m**3,
    )
    dt = time.perf_counter() - t0
    ok = all(r.verdict == "PASS" and r.slope_m <= 0.1 and r.slope_x <= 0.1 for r in reps)
    ok = ok and fault.slope_m >= 0.8 and dt < 600
    lines = "; ".join(_scan_line(r) for r in reps)
    verdict(record_property, 5, ok, f"{lines}; m^3 fault slope {fault.slope_m:.3f}; {dt:.1f} s")


def test_c06_discrete_complementary_scans(record_property):
    reps = [residual_scan("DiscretePlus", ell, 0.0, n, XGRID, MGRID) for ell, n in [(-1, 1), (-1.5, 1.5), (-0.5, 0.5)]]
    reps += [residual_scan("Complementary", ell, eps, eps, XGRID, MGRID) for ell, eps in [(-0.6, 0.05), (-0.45, 0.02)]]
    ok = all(r.verdict == "PASS" for r in reps)
    verdict(record_property, 6, ok, "; ".join(_scan_line(r) for r in reps))


def test_c07_exceptional(record_property):
    rep = residual_scan("Principal", complex(-0.5, 0), 0.0, 0.0, XGRID, MGRID)
    lim = log_limit_ell_half(0.0, 0.0)
    val = log_limit_ratio(0.0, 0.0, 1e6)
    excess = abs(val / lim - 1)
    ok = rep.verdict == "PASS" and excess <= 0.05
    verdict(
        record_property, 7, ok,
        f"scan {rep.verdict} ({_scan_line(rep)}); log ratio at 1e6 {val:.4f} vs {lim:.4f}, off by {100 * excess:.1f}% (tolerance 5%)",
    )


# ------------------------------------------------------------------------ 8

def test_c08_laplace(record_property):
    worst = 0.0
    for m in (5.0, 20.0, 100.0):
        expected = [1.0, 0.0, m, 2 * m, 3 * m * (m + 2)]
        for k, ref in enumerate(expected):
            v = gamma_average(lambda t, k=k: (t - m) ** k, m).value
            # the first central moment is zero; measure it against the spread sqrt(m)
            worst = max(worst, abs(v) / math.sqrt(m) if ref == 0 else rel(v, ref))
    y = 0.1
    ms = np.array([25, 50, 100, 200, 400], dtype=float)
    scaled = []
    for m in ms:
        approx = gamma_average_taylor(math.sqrt, m, y, fpp=lambda u: -0.25 * u**-1.5, normalized=True)
        ref = math.sqrt(y) * math.exp(gammaln(m + 0.5) - gammaln(m))
        # |quad - approx| m^2 / (y^{1/2} Gamma(m+1/2)), both sides divided by Gamma(m)
        scaled.append(abs(ref - approx) * m**2 / (math.sqrt(y) * math.exp(gammaln(m + 0.5) - gammaln(m))))
    s = slope(ms, scaled)
    ok = worst <= 1e-8 and s <= SLOPE_THRESHOLD and max(scaled) < math.inf
    verdict(
        record_property, 8, ok,
        f"central moments max rel {worst:.1e}; scaled Taylor error {min(scaled):.4f}..{max(scaled):.4f}, slope {s:+.3f}",
    )


# ------------------------------------------------------------------------ 9

def test_c09_temme(record_property):
    a_vals = np.array([25, 50, 100, 200, 400, 800, 1600], dtype=float)
    worst_ratio, worst_slope = 0.0, -math.inf
    for lam in (0.5, 0.75, 4 / 3, 2.0):
        ea = []
        for a in a_vals:
            t = inc_gamma_temme1(a, lam * a)
            P, Q = inc_gamma_pq(a, lam * a)
            err = abs(t.value - (P if t.which == "P" else Q))
            worst_ratio = max(worst_ratio, err / (t.prefactor * t.error_scale))
            ea.append(err * a / t.prefactor)
        worst_slope = max(worst_slope, slope(a_vals, ea))
    ok = worst_ratio <= 2.1 and worst_slope <= SLOPE_THRESHOLD
    verdict(
        record_property, 9, ok,
        f"max error/(prefactor*scale) {worst_ratio:.3f} (bound 2.1); max slope of a*error/prefactor {worst_slope:+.3f}",
    )


# ----------------------------------------------------------------------- 10

def test_c10_fourier(record_property):
    rng = np.random.default_rng(10)
    worst = 0.0
    for re_ell in (-1.0, -0.8):
        for _ in range(40):
            chi = ReprParams(complex(re_ell, rng.uniform(-1, 1)), rng.uniform(-0.5, 0.5))
            n = int(rng.integers(-3, 4)) + chi.eps
            y = float(rng.choice([-1, 1]) * np.exp(rng.uniform(math.log(0.1), math.log(6))))
            worst = max(worst, abs(basis_ft_closed(chi, n, y) - basis_ft_quadrature(chi, n, y)))
    classical = 0.0
    for y in (-4.0, -1.0, -0.25, 0.25, 1.0, 4.0):
        ref = math.exp(-abs(y)) / math.sqrt(2)
        classical = max(classical, abs(basis_ft_closed((-1, 0), 0.0, y) - ref), abs(basis_ft_quadrature((-1, 0), 0.0, y) - ref))
    ok = worst <= 1e-6 and classical <= 1e-8
    verdict(record_property, 10, ok, f"closed vs quadrature max {worst:.1e} on 80 points; classical pair max {classical:.1e}")


# ----------------------------------------------------------------------- 11

def test_c11_column_limits(record_property):
    p = ReprParams(complex(-0.5, 1.0), 0.0)
    xs = (10.0, 30.0, 100.0)
    direct = [apl2_distance(p, 0, x) for x in xs]
    cayley = [apl2_distance(p, 0, x, "cayley") for x in xs]
    steps = [column_step_fn(p, 0, x, (-int(40 * x), int(40 * x))) for x in xs]
    dist = [s.l2_distance(lambda y: basis_ft_closed(p, 0.0, y)) for s in steps]
    norm = steps[-1].l2_norm()

    def dec(v):
        return all(b < a for a, b in zip(v, v[1:]))

    ok = dec(direct) and dec(cayley) and dec(dist) and abs(norm - 1) <= 0.02
    fmt = lambda v: "/".join(f"{d:.4f}" for d in v)  # noqa: E731
    verdict(
        record_property, 11, ok,
        f"apl2 direct {fmt(direct)}, cayley {fmt(cayley)}, step L2 {fmt(dist)} at x=10/30/100; step norm {norm:.6f}",
    )


# ----------------------------------------------------------------------- 12

def test_c12_discrete_complementary_limits(record_property):
    xs = (100.0, 1000.0, 10000.0)
    worst_disc, worst_rel, worst_comp = 0.0, 0.0, 0.0
    for m in (1, 2, 3):
        lim = binomial_general(-2.0, m - 1).real  # 1, -2, 3
        for x in xs:
            v = frak_p_value(-1.0, float(m), 1.0, m - 1, x).value * (x / 2)
            worst_disc = max(worst_disc, abs(v - lim) * x)
            worst_rel = max(worst_rel, abs(v / lim - 1) * x)
    ell = -0.3
    for m in (1, 2, 3):
        lim = gamma(2 * ell + 1) / (gamma(ell + m + 1) * gamma(ell - m + 1))
        for x in xs:
            v = frak_p_value(ell, float(m), 0.0, m, x).value * (x / 2) ** (-ell)
            worst_comp = max(worst_comp, abs(v - lim) * x)
    ok = all(math.isfinite(w) for w in (worst_disc, worst_comp)) and worst_disc <= 5 and worst_comp <= 5
    verdict(
        record_property, 12, ok,
        f"max x*|P (x/2)^-ell - limit|: ell=-1 {worst_disc:.2f} (relative {worst_rel:.2f}), ell=-0.3 {worst_comp:.1f}; bound 5",
    )


# ----------------------------------------------------------------------- 13

def test_c13_constant_term(record_property):
    dev = []
    for lam, eps, m, n in [(1.0, 0.0, 0, 0), (2.0, 0.3, 1, 0)]:
        ct = constant_term(lam, eps, m, n)
        dev.append(abs(ct.fitted_amplitude / ct.amplitude - 1))
    ok = max(dev) <= 0.02
    verdict(record_property, 13, ok, "fitted/closed-form amplitude deviation " + ", ".join(f"{100 * d:.4f}%" for d in dev))


# ----------------------------------------------------------------------- 14

def test_c14_norms(record_property):
    boundary = [(-0.25, 0.25), (-0.3, 0.3), (-0.7, 0.3), (-0.5, 0.5), (-0.1, -0.1)]
    dev_min = max(abs(ub_norm_min(ell, eps) - 1) for ell, eps in boundary)
    c = math.cos(math.pi * -0.25)
    special = 1 + 2 * c**2 + 2 * c * math.sqrt(1 + c**2)
    dev_sp = rel(ub_norm_11_squared(-0.25, 0.25), special)
    # the special form against an independent high-precision evaluation
    with mpmath.workdps(30):
        cm = mpmath.cos(mpmath.pi / 4)
        sp_mp = float(1 + 2 * cm**2 + 2 * cm * mpmath.sqrt(1 + cm**2))
    ok = dev_min <= 1e-12 and dev_sp <= 1e-12 and rel(special, sp_mp) <= 1e-15
    verdict(record_property, 14, ok, f"ub_norm_min on the boundary max |N-1| {dev_min:.1e}; special form rel {dev_sp:.1e}")
