"""Monte Carlo and exact fault-path tools for Steane-code fault tolerance thresholds."""

__version__ = "0.1.0"

from .analysis import (
    HandModelParams,
    ToffoliParams,
    find_breakeven,
    find_optimal_nop,
    fit_rational_linear,
    hand_model_eps1,
    memory_threshold_factor,
    toffoli_recursion,
    xor_equilibrium,
)
from .enumeration import enumerate_cat, enumerate_syndrome_measurement
from .ftec import FtecStrategy, StrategyKind, ftec_round, full_recovery, prepare_cat
from .montecarlo import (
    SurvivalStats,
    TrialConfig,
    run_trial,
    run_until_precision,
    sweep_epsilon,
    sweep_nop,
)
from .pauli_frame import ErrorFlags, NoiseModel, RandomStream
from .steane import CodeBlock, build_steane, canonicalize

__all__ = [
    "CodeBlock",
    "ErrorFlags",
    "FtecStrategy",
    "HandModelParams",
    "NoiseModel",
    "RandomStream",
    "StrategyKind",
    "SurvivalStats",
    "ToffoliParams",
    "TrialConfig",
    "build_steane",
    "canonicalize",
    "enumerate_cat",
    "enumerate_syndrome_measurement",
    "find_breakeven",
    "find_optimal_nop",
    "fit_rational_linear",
    "ftec_round",
    "full_recovery",
    "hand_model_eps1",
    "memory_threshold_factor",
    "prepare_cat",
    "run_trial",
    "run_until_precision",
    "sweep_epsilon",
    "sweep_nop",
    "toffoli_recursion",
    "xor_equilibrium",
]
