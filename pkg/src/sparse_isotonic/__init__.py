"""Sparse coordinate-wise monotone regression.

Exact fits for a fixed active set (min-cut and isotonic L2), joint
estimation of the active set (IPIR), LP support recovery (LPSR, S-LPSR),
the two-stage estimator (TSIR), synthetic benchmarks and labeling counts.
"""

from .algorithms import (
    RecoveryConfig,
    RecoveryMethod,
    Rule,
    SparseFit,
    ipir_fit,
    lpsr,
    predict,
    predict_many,
    slpsr,
    tsir_fit,
)
from .core import (
    ActiveSet,
    ArgumentError,
    ComparabilityRelation,
    ContractError,
    Dataset,
    DataFormatError,
    NoiseModel,
    SizeGuardError,
    build_comparability,
    dominates,
    q_indicator,
)
from .exact import FitResult, brute_force_binary, solve_binary_labeling, solve_fixed, solve_l2_isotonic
from .lp import LpProblem, LpSolution, LpStatus, check_integrality, solve_lp

__version__ = "0.1.0"

__all__ = [
    "ActiveSet",
    "ArgumentError",
    "ComparabilityRelation",
    "ContractError",
    "DataFormatError",
    "Dataset",
    "FitResult",
    "LpProblem",
    "LpSolution",
    "LpStatus",
    "NoiseModel",
    "RecoveryConfig",
    "RecoveryMethod",
    "Rule",
    "SizeGuardError",
    "SparseFit",
    "brute_force_binary",
    "build_comparability",
    "check_integrality",
    "dominates",
    "ipir_fit",
    "lpsr",
    "predict",
    "predict_many",
    "q_indicator",
    "slpsr",
    "solve_binary_labeling",
    "solve_fixed",
    "solve_l2_isotonic",
    "solve_lp",
    "tsir_fit",
]

