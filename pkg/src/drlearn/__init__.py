"""Distributed robust learning with geometric-median fusion.

Robust base learners (trimmed-covariance PCA, trimmed-correlation
regression) run on even column partitions of a contaminated sample set
across simulated worker nodes; their estimates are fused by the geometric
median, which tolerates corrupted nodes, stragglers and communication
errors that break plain averaging.
"""

from .estimates import (
    Estimate,
    EstimateKind,
    ShapeMismatchError,
    distance,
    estimate_from_csv_row,
    estimate_to_csv_row,
    norm,
    serialized_size,
    zeros_like,
)
from .experiments import (
    ConfigError,
    Diagnostics,
    ExperimentConfig,
    derive_seed,
    run_fault_study,
    run_sweep,
    table_rows,
    write_csv,
)
from .framework import (
    Aggregation,
    BreakdownFault,
    CommErrorFault,
    DrlRun,
    FaultModel,
    LatencyFault,
    comm_cost,
    inject_faults,
    run_distributed_pca,
    run_distributed_regression,
    select_late_nodes,
    worker_count,
)
from .geometric_median import (
    MedianConfig,
    MedianResult,
    coordinate_mean,
    geometric_median,
    median_objective,
)
from .metrics import RunMetrics, eigengap, projection_error, regression_error
from .partitioning import NodePlan, partition
from .regression import RegressionModel, least_squares, trimmed_regression
from .rpca import PcaModel, projection_from_basis, robust_pca, standard_pca
from .synth import (
    Dataset,
    LrScenario,
    PcaScenario,
    Placement,
    PlacementKind,
    dataset_from_csv,
    dataset_to_csv,
    gen_lr,
    gen_pca,
    half_split_fractions,
    node_outlier_fractions,
    rng_stream,
)
from .theory import (
    BreakdownBounds,
    TheoryPoint,
    alpha_for_failure,
    breakdown_bounds,
    corruption_exponent,
    divergence,
    effective_outlier_fraction,
    failure_threshold,
    pca_error_bound,
    regression_error_bound,
    relaxation_factor,
    success_probability,
    tolerance_table,
)
from .trimming import (
    retained_indices,
    trimmed_correlation,
    trimmed_covariance,
    trimmed_inner_product,
)

__version__ = "0.1.0"
