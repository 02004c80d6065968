"""Conference-aided multiple-access coding: simulation, bounds, and limits."""

from .errors import CfmacError, ValidationError
from .measures import (
    ConditionedJoint,
    JointPmf,
    Pmf,
    binary_entropy,
    chi2_divergence,
    conditional_mutual_information,
    entropy,
    kl_divergence,
    l1_distance,
    mutual_information,
)
from .mac import (
    DUECK_W1,
    DiscreteMac,
    CfCode,
    ErrorReport,
    X1_SYMBOLS,
    Y1_SYMBOLS,
    apply_n,
    dueck_mac,
    enumerate_preimages,
    erasure_count,
    evaluate_cf_code,
    validate_mac,
)
from .solver import SigmaSolution, SolverConfig, solve_sigma
from .bounds import (
    CstarReport,
    Sigma1Point,
    SqrtLawReport,
    WringingResult,
    check_cstar,
    continuity_envelope,
    dueck_outer_bound,
    find_cstar_member,
    output_distribution,
    sigma1,
    sigma_n,
    sqrt_law_curve,
    sum_capacity_bounds,
    wringing_extract,
    wringing_upper_bound,
)
from .codebooks import ExplicitCodebook, KeyedCodebook, gen_codebook
from .scheme import (
    CfOutput,
    ListDecodeResult,
    SchemeParams,
    SchemeStats,
    claim1_check,
    claim2_stats,
    decode,
    derive_params,
    encode,
    list_decode_phase1,
    psi2,
    run_scheme,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CfmacError",
    "ValidationError",
    "Pmf",
    "JointPmf",
    "ConditionedJoint",
    "entropy",
    "binary_entropy",
    "mutual_information",
    "conditional_mutual_information",
    "kl_divergence",
    "chi2_divergence",
    "l1_distance",
    "DiscreteMac",
    "CfCode",
    "ErrorReport",
    "DUECK_W1",
    "X1_SYMBOLS",
    "Y1_SYMBOLS",
    "validate_mac",
    "dueck_mac",
    "apply_n",
    "erasure_count",
    "enumerate_preimages",
    "evaluate_cf_code",
    "SolverConfig",
    "SigmaSolution",
    "solve_sigma",
    "Sigma1Point",
    "WringingResult",
    "CstarReport",
    "SqrtLawReport",
    "sigma1",
    "sigma_n",
    "sum_capacity_bounds",
    "dueck_outer_bound",
    "wringing_extract",
    "wringing_upper_bound",
    "continuity_envelope",
    "check_cstar",
    "sqrt_law_curve",
    "find_cstar_member",
    "output_distribution",
    "ExplicitCodebook",
    "KeyedCodebook",
    "gen_codebook",
    "SchemeParams",
    "derive_params",
    "CfOutput",
    "ListDecodeResult",
    "SchemeStats",
    "psi2",
    "encode",
    "list_decode_phase1",
    "decode",
    "run_scheme",
    "claim1_check",
    "claim2_stats",
]
