"""State space compression for finite Markov chains.

A compression ``(pi, phi, rho)`` maps microstates to macrostates, evolves
the macrostate, and predicts an observable of the microstate. This package
scores such compressions by accuracy and computation cost, searches over
partition-induced compressions, and derives complexity and information-flow
measures from the optimum.
"""

__version__ = "0.1.0"

from .accuracy import (
    accuracy_cost,
    avg_mi_cost,
    cond_entropy_cost,
    expected_cost,
    kl_cost,
    mi_of_avg_cost,
    mi_per_time,
)
from .computation import CompCostModel, computation_cost
from .corpus import NAMES as EXAMPLE_NAMES, build_example
from .errors import (
    ConfigurationError,
    DegenerateBaselineError,
    EmptySupportError,
    NumericalError,
    PartitionSizeError,
    SSCError,
)
from .measures import (
    compression_complexity,
    info_flow_cond_ent,
    info_flow_mi,
    normalized_improvement,
    recompression_conditional_mi,
    ssc_net_transfer_entropy,
)
from .model import (
    CompressionTriple,
    MarkovSystem,
    ObjectiveConfig,
    Observable,
    WeightSpec,
    identity_triple,
    singleton_triple,
    validate_system,
    validate_triple,
)
from .montecarlo import SampleConfig, estimate_cost, sample_paths, within_tolerance
from .optimize import (
    OptimizerConfig,
    Partition,
    enumerate_partitions,
    induced_triple,
    lumpability_test,
    objective_K,
    optimize,
    pareto_sweep,
)
from .propagation import joint_at_time, lagged_joint, time_averaged_joint

__all__ = [
    "CompCostModel", "CompressionTriple", "ConfigurationError", "DegenerateBaselineError",
    "EXAMPLE_NAMES", "EmptySupportError", "MarkovSystem", "NumericalError", "ObjectiveConfig",
    "Observable", "OptimizerConfig", "Partition", "PartitionSizeError", "SSCError", "SampleConfig",
    "WeightSpec", "accuracy_cost", "avg_mi_cost", "build_example", "compression_complexity",
    "computation_cost", "cond_entropy_cost", "enumerate_partitions", "estimate_cost", "expected_cost",
    "identity_triple", "induced_triple", "info_flow_cond_ent", "info_flow_mi", "joint_at_time",
    "kl_cost", "lagged_joint", "lumpability_test", "mi_of_avg_cost", "mi_per_time",
    "normalized_improvement", "objective_K", "optimize", "pareto_sweep", "recompression_conditional_mi",
    "sample_paths", "singleton_triple", "ssc_net_transfer_entropy", "time_averaged_joint",
    "validate_system", "validate_triple", "within_tolerance",
]
