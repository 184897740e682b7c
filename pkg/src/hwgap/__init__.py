"""Spectral gap, transient behaviour and bounds for M/M/n queues in the Halfin-Whitt regime."""

from .charlier import f_recursion, f_series, km_integrand, psi_big, q_eval, z_ratio
from .errors import HWGapError, NumericalFailure, PreconditionViolated
from .gap import GapResult, Regime, bstar_finite, gap_finite, vandoorn_lower
from .limit import (
    LimitGap,
    LimitRegime,
    a_inf,
    bstar,
    gamma_bracket,
    gamma_limit,
    psi_inf,
    zeta,
)
from .model import (
    INFINITE,
    QueueParams,
    SpectrumInterval,
    StationaryDist,
    a_n,
    b_n,
    g_weight_log,
    hw_wait_prob,
    make_params,
    spectrum_edges,
    stationary,
)
from .pcf import PcfValue, pcf, pcf_derivative_check, pcf_ratio
from .quadrature import QuadratureConfig
from .signedlog import SignedLog
from .transient import (
    BoundReport,
    TransientQuery,
    TruncatedGenerator,
    explicit_bounds,
    km_cdf_diff,
    km_transient,
    literature_bounds,
    oracle_gap,
    oracle_uniformization,
    t_star,
)

__version__ = "0.1.0"
