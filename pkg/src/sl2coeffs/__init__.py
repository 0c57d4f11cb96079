"""Matrix coefficients of the universal cover of SL(2, R) and their
large-argument asymptotics.

The main entry points are :func:`frak_p` / :func:`cal_p` for coefficients,
the approximants in :mod:`sl2coeffs.asym`, :func:`whittaker_w`, and the
Fourier-side objects in :mod:`sl2coeffs.fourier`.
"""

__version__ = "0.1.0"

from .errors import AccuracyError, ConvergenceError, DomainError, PoleError, RouteError, Sl2Error
from .params import (
    Classification,
    ReprParams,
    SeriesKind,
    classify,
    optimal_weight_ratio,
    ub_norm_11_squared,
    ub_norm_min,
)
from .gammakit import gamma_ratio, inc_gamma_pq, inc_gamma_temme1, log_gamma, recip_gamma
from .hyp2f1 import hyp2f1, hyp2f1_with_error
from .whittaker import whittaker_asymptotics, whittaker_w, whittaker_w_array
from .coeffs import CoeffIndex, CoeffQuery, EvalResult, cal_p, coeff_column, frak_p, frak_p_gamma_average
from .asym import (
    ScanReport,
    approx_complementary,
    approx_discrete,
    approx_general,
    approx_principal,
    constant_term,
    residual_scan,
)
from .fourier import (
    StepFunction,
    apfour_pairing,
    apl2_distance,
    basis_fn,
    basis_ft_closed,
    basis_ft_quadrature,
    column_step_fn,
)

__all__ = [
    "__version__",
    "Sl2Error", "DomainError", "PoleError", "RouteError", "ConvergenceError", "AccuracyError",
    "ReprParams", "SeriesKind", "Classification", "classify",
    "ub_norm_11_squared", "ub_norm_min", "optimal_weight_ratio",
    "log_gamma", "recip_gamma", "gamma_ratio", "inc_gamma_pq", "inc_gamma_temme1",
    "hyp2f1", "hyp2f1_with_error",
    "whittaker_w", "whittaker_w_array", "whittaker_asymptotics",
    "CoeffIndex", "CoeffQuery", "EvalResult", "frak_p", "frak_p_gamma_average", "cal_p", "coeff_column",
    "approx_principal", "approx_discrete", "approx_complementary", "approx_general",
    "constant_term", "residual_scan", "ScanReport",
    "basis_fn", "basis_ft_closed", "basis_ft_quadrature", "StepFunction", "column_step_fn",
    "apl2_distance", "apfour_pairing",
]
