"""Means of cylinder functions over affine slices of high-dimensional
spheres, computed three independent ways: a deterministic disintegration
quadrature, Monte Carlo on the slice sphere, and the limiting Gaussian
integral the slice means converge to."""

from .affine_model import (
    INF,
    AffineProblem,
    ValidatedProblem,
    closest_point,
    min_valid_n,
    validate,
)
from .errors import (
    BelowMinN,
    ConfigError,
    InadmissibleFunction,
    Infeasible,
    NonFinite,
    NotSPD,
    ProjectionNotOnto,
    RankDeficient,
    SliceEmpty,
    SliceMeanError,
    UnsupportedDimension,
)
from .integrators import (
    GaussHermite,
    IntegralResult,
    McConfig,
    QuadConfig,
    counterexample_probe,
    gaussian_limit,
    slice_mean_mc,
    slice_mean_quadrature,
)
from .numlin import (
    kernel_onb,
    least_norm_solution,
    log_surface_constant,
    spd_solve_and_logdet,
)
from .projections import (
    ProjectionData,
    build_projection,
    kernel_projection_norm_sq,
    preimage_norm_sq,
    push_coordinates,
)
from .slice_geometry import SliceGeometry, build_slice, log_norm_prefactor, weight
from .testfns import (
    BoundedCutoff,
    CosLinear,
    CounterexampleG,
    IndicatorBall,
    Monomial,
    SinLinear,
    TestFunction,
    evaluate,
    known_limit,
)

__version__ = "0.1.0"

__all__ = [
    "AffineProblem",
    "BelowMinN",
    "BoundedCutoff",
    "ConfigError",
    "CosLinear",
    "CounterexampleG",
    "GaussHermite",
    "INF",
    "InadmissibleFunction",
    "Infeasible",
    "IndicatorBall",
    "IntegralResult",
    "McConfig",
    "Monomial",
    "NonFinite",
    "NotSPD",
    "ProjectionData",
    "ProjectionNotOnto",
    "QuadConfig",
    "RankDeficient",
    "SinLinear",
    "SliceEmpty",
    "SliceGeometry",
    "SliceMeanError",
    "TestFunction",
    "UnsupportedDimension",
    "ValidatedProblem",
    "build_projection",
    "build_slice",
    "closest_point",
    "counterexample_probe",
    "evaluate",
    "gaussian_limit",
    "kernel_onb",
    "kernel_projection_norm_sq",
    "known_limit",
    "least_norm_solution",
    "log_norm_prefactor",
    "log_surface_constant",
    "min_valid_n",
    "preimage_norm_sq",
    "push_coordinates",
    "slice_mean_mc",
    "slice_mean_quadrature",
    "spd_solve_and_logdet",
    "validate",
    "weight",
]
