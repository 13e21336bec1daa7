"""Mixed volumes of zonotopes and the local log-Brunn-Minkowski deficit."""

from .deficit import (
    DeficitReport,
    DerivativeReport,
    MonotonicityChainReport,
    cube_case,
    deficit,
    derivative_convergence,
    derivative_terms,
    dim1_case,
    fd_derivative,
    monotonicity_check,
    normalization_constant,
    normalized_function,
    theorem3_chain,
)
from .errors import (
    BodyInvalidError,
    DegenerateBodyError,
    InputError,
    LLBMError,
    OracleUnreliableError,
    UnsupportedInstanceError,
)
from .geometry import (
    ClosedForm,
    LinearMap,
    Segment,
    SupportDifference,
    Zonotope,
    linear_image,
    minkowski_diff_summand,
    minkowski_sum,
    project,
    restrict_function,
    support,
    support_function,
)
from .mixed import (
    AtomicMeasure,
    MixedVolumeQuery,
    bilinear_functional_mixed_volume,
    covariance_check,
    functional_mixed_volume,
    mixed_area_measure,
    mixed_volume,
    oracle_mixed_volume,
    projection_identity_check,
    zonotope_volume,
)
from .sweep import zonoid_sweep

__version__ = "0.1.0"
