"""mixlab: finite hypothesis classes as bipartite graphs.

Exact and spectral computation of the mixing parameter, VC-dimension
analysis, sufficient-partition detection, label-perturbation experiments,
and a bounded-memory learner simulator.
"""

__version__ = "0.1.0"

from .errors import (CapacityError, ConvergenceError, InputError, MixlabError,
                     ParseError)
from .hypothesis_graph import (HypothesisClass, SubsetPair, canonicalize,
                               density, edge_count, gen_parity,
                               gen_partitioned, gen_random, gen_threshold,
                               read_class, threshold_values, write_class)
from .memory_learner import (FiniteStateLearner, SimulationConfig,
                             SimulationOutcome, TrialOutcome,
                             make_table_learner, random_table_learner,
                             run_learner, sample_complexity, table_learner,
                             test_error, threshold_interval_learner,
                             training_error, version_space_learner,
                             write_table_learner)
from .mixing import (MixingReport, Theorem1Report,
                     check_theorem1_preconditions, compute_mixing_report,
                     d_min_bruteforce_oracle, d_min_exact,
                     d_search_lower_bound, d_spectral_bound, discrepancy,
                     discrepancy_squared_exact, is_mixing, mixing_complexity)
from .partition import (PartitionBoundReport, SufficientPartition,
                        check_partition_mc_bound, coarsest_partition,
                        verify_partition)
from .perturbation import (PerturbationReport, RandomizationReport,
                           check_perturbation_bound, flip_labels,
                           randomization_experiment, sample_flip_cells)
from .vc import (GreedyShatterResult, ShatterCertificate, VCResult,
                 balanced_split_exceptions, greedy_shattered_set, restriction,
                 shatters, vc_dim_exact)

__all__ = [
    "CapacityError", "ConvergenceError", "InputError", "MixlabError",
    "ParseError",
    "HypothesisClass", "SubsetPair", "canonicalize", "density", "edge_count",
    "gen_parity", "gen_partitioned", "gen_random", "gen_threshold",
    "read_class", "threshold_values", "write_class",
    "FiniteStateLearner", "SimulationConfig", "SimulationOutcome",
    "TrialOutcome", "make_table_learner", "random_table_learner",
    "run_learner", "sample_complexity", "table_learner", "test_error",
    "threshold_interval_learner", "training_error", "version_space_learner",
    "write_table_learner",
    "MixingReport", "Theorem1Report", "check_theorem1_preconditions",
    "compute_mixing_report", "d_min_bruteforce_oracle", "d_min_exact",
    "d_search_lower_bound", "d_spectral_bound", "discrepancy",
    "discrepancy_squared_exact", "is_mixing", "mixing_complexity",
    "PartitionBoundReport", "SufficientPartition", "check_partition_mc_bound",
    "coarsest_partition", "verify_partition",
    "PerturbationReport", "RandomizationReport", "check_perturbation_bound",
    "flip_labels", "randomization_experiment", "sample_flip_cells",
    "GreedyShatterResult", "ShatterCertificate", "VCResult",
    "balanced_split_exceptions", "greedy_shattered_set", "restriction",
    "shatters", "vc_dim_exact",
]
