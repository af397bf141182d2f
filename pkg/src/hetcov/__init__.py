"""Coverage probability of multi-tier cellular networks whose fading power
gains follow Fox H-function distributions, with a Poisson point process Monte
Carlo oracle and a reproducible scenario runner."""

from .foxh import (
    HOrder,
    HParams,
    HFunction,
    MellinStrip,
    FoxHError,
    NoConvergenceStrip,
    QuadratureFailure,
    PoleHit,
    DegenerateHFunction,
    eval_h,
    eval_h_many,
    mellin_moment,
    asymptotic_tail,
    h_transform_compose,
    inv_laplace_params,
    reduce,
    exp_h,
)
from .fading import (
    Rayleigh,
    Nakagami,
    AlphaMu,
    FisherF,
    EGK,
    RawH,
    FadingSpec,
    FoxHDistribution,
    UnnormalizedDistribution,
    make_distribution,
    sample,
)
from .coverage import (
    PathLossModel,
    Tier,
    NetworkConfig,
    CoverageResult,
    InvalidConfig,
    coverage_rss_unbounded,
    coverage_rss_bounded,
    coverage_rss_bounded_conditional,
    coverage_maxsinr_unbounded,
    coverage_maxsinr_il,
    coverage_maxsinr_bounded,
    coverage_alpha_mu_il,
)
from .sim import (
    Association,
    SimConfig,
    SimEstimate,
    WindowTooSmall,
    default_window_radius,
    estimate_coverage,
    estimate_conditional,
)

__version__ = "0.1.0"
