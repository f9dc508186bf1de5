"""Distributed-run orchestration: partition, per-node fits, faults, fusion.

A run divides the sample columns evenly over k simulated nodes, fits the
base learner on every node in parallel, optionally injects node-level
faults (latency, communication corruption, arbitrary breakdown) and fuses
the surviving estimates by geometric median or, for the non-robust
baseline, by coordinate-wise averaging.  Both aggregations share one code
path, so comparisons see identical partitions, node outputs and faults.

Everything is deterministic for a fixed seed: per-node randomness comes
from counter-based streams keyed by (seed, purpose, node index), faults are
applied by node index after the parallel section, and recorded wall times
never influence results.  Outputs are therefore bit-identical whether the
nodes run serially or on a thread pool (the DRL_THREADS environment
variable caps the pool; the numeric kernels already use the available
cores, so the default pool size is 1).
"""

from __future__ import annotations

import enum
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .estimates import Estimate, EstimateKind, serialized_size
from .geometric_median import MedianConfig, coordinate_mean, geometric_median
from .partitioning import NodePlan, fraction_ceil, fraction_floor, partition
from .regression import trimmed_regression
from .rpca import projection_from_basis, robust_pca
from .synth import Dataset, node_outlier_fractions, rng_stream

__all__ = [
    "Aggregation",
    "LatencyFault",
    "CommErrorFault",
    "BreakdownFault",
    "FaultModel",
    "DrlRun",
    "worker_count",
    "select_late_nodes",
    "inject_faults",
    "run_distributed_pca",
    "run_distributed_regression",
    "comm_cost",
]

# Stream ids for fault randomness (synth owns 0..5).
_LATE, _PICK_FLIPPED, _FLIP, _BREAK = 10, 11, 12, 13

_DEFAULT_REPLACEMENT_MAGNITUDE = 1e6


class Aggregation(enum.Enum):
    GEOMETRIC_MEDIAN = "geometric_median"
    AVERAGE = "average"


@dataclass(frozen=True)
class LatencyFault:
    """Late nodes compute on only a prefix of their partition.

    ceil(late_fraction * k) nodes are selected by seeded sampling; each
    computes on the first max(1, floor(data_fraction * size)) columns of its
    slice.  This is a deterministic stand-in for stopping slow machines
    mid-flight: the late results are honest but noisier.
    """

    late_fraction: float = 0.5
    data_fraction: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 <= self.late_fraction < 1.0:
            raise ValueError("late_fraction must lie in [0, 1)")
        if not 0.0 < self.data_fraction <= 1.0:
            raise ValueError("data_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class CommErrorFault:
    """Sign-flip corruption of transmitted estimates.

    ceil(node_fraction * k) nodes are selected; within each,
    floor(element_flip_fraction * len) positions are negated.
    """

    node_fraction: float = 0.1
    element_flip_fraction: float = 0.3

    def __post_init__(self) -> None:
        if not 0.0 <= self.node_fraction <= 1.0:
            raise ValueError("node_fraction must lie in [0, 1]")
        if not 0.0 <= self.element_flip_fraction <= 1.0:
            raise ValueError("element_flip_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class BreakdownFault:
    """Listed nodes return an arbitrary estimate of the given magnitude.

    Node indices are 0-based.
    """

    node_indices: frozenset[int] = frozenset()
    replacement_magnitude: float = _DEFAULT_REPLACEMENT_MAGNITUDE

    def __post_init__(self) -> None:
        object.__setattr__(self, "node_indices", frozenset(int(i) for i in self.node_indices))
        if any(i < 0 for i in self.node_indices):
            raise ValueError("node indices must be nonnegative")
        if self.replacement_magnitude <= 0:
            raise ValueError("replacement_magnitude must be positive")


@dataclass(frozen=True)
class FaultModel:
    latency: LatencyFault | None = None
    comm_error: CommErrorFault | None = None
    breakdown: BreakdownFault | None = None

    @classmethod
    def none(cls) -> "FaultModel":
        return cls()

    @property
    def is_empty(self) -> bool:
        return self.latency is None and self.comm_error is None and self.breakdown is None


@dataclass(frozen=True)
class DrlRun:
    """Record of one distributed execution."""

    plan: NodePlan
    node_estimates: tuple[Estimate, ...]
    faulted_estimates: tuple[Estimate, ...]
    aggregate: Estimate
    aggregation: Aggregation
    per_node_lambda: np.ndarray
    comm_bytes: int
    wall_times: np.ndarray  # seconds per node, informational only
    late_nodes: frozenset[int] = frozenset()
    flipped_nodes: frozenset[int] = frozenset()
    broken_nodes: frozenset[int] = frozenset()


def worker_count(k: int) -> int:
    """Size of the node worker pool; DRL_THREADS caps it (default 1)."""
    env = os.environ.get("DRL_THREADS", "").strip()
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("DRL_THREADS must be at least 1")
        return min(n, k)
    return 1


def select_late_nodes(k: int, latency: LatencyFault | None, seed: int) -> frozenset[int]:
    """Seeded choice of ceil(late_fraction * k) late nodes."""
    if latency is None:
        return frozenset()
    n_late = fraction_ceil(latency.late_fraction, k)
    if n_late == 0:
        return frozenset()
    picks = rng_stream(seed, _LATE).choice(k, size=n_late, replace=False)
    return frozenset(int(i) for i in picks)


def _random_estimate(like: Estimate, magnitude: float, gen: np.random.Generator) -> Estimate:
    v = gen.standard_normal(like.values.size)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        v[0] = 1.0
        nrm = 1.0
    return like.with_values(v * (magnitude / nrm))


def _apply_faults(
    estimates: list[Estimate],
    faults: FaultModel,
    seed: int,
    extra_broken: frozenset[int] = frozenset(),
) -> tuple[list[Estimate], frozenset[int], frozenset[int]]:
    k = len(estimates)
    out = list(estimates)

    flipped: frozenset[int] = frozenset()
    if faults.comm_error is not None:
        ce = faults.comm_error
        n_nodes = fraction_ceil(ce.node_fraction, k)
        if n_nodes > 0:
            picks = rng_stream(seed, _PICK_FLIPPED).choice(k, size=n_nodes, replace=False)
            flipped = frozenset(int(i) for i in picks)
            for i in sorted(flipped):
                est = out[i]
                n_flip = fraction_floor(ce.element_flip_fraction, est.values.size)
                if n_flip == 0:
                    continue
                pos = rng_stream(seed, _FLIP, i).choice(est.values.size, size=n_flip, replace=False)
                vals = est.values.copy()
                vals[pos] = -vals[pos]
                out[i] = est.with_values(vals)

    broken = frozenset(extra_broken)
    if faults.breakdown is not None:
        if any(i >= k for i in faults.breakdown.node_indices):
            raise ValueError("breakdown node index out of range")
        broken = broken | faults.breakdown.node_indices
    magnitude = (
        faults.breakdown.replacement_magnitude
        if faults.breakdown is not None
        else _DEFAULT_REPLACEMENT_MAGNITUDE
    )
    for i in sorted(broken):
        out[i] = _random_estimate(out[i], magnitude, rng_stream(seed, _BREAK, i))

    return out, flipped, broken


def inject_faults(
    estimates: Sequence[Estimate], faults: FaultModel | None, seed: int
) -> list[Estimate]:
    """Apply communication corruption and breakdown replacement by node index.

    Latency is handled upstream (late nodes compute on a data prefix), so it
    does not alter already-computed estimates here.  Deterministic for a
    fixed seed.
    """
    if len(estimates) == 0:
        raise ValueError("need at least one estimate")
    if faults is None or faults.is_empty:
        return list(estimates)
    out, _, _ = _apply_faults(list(estimates), faults, seed)
    return out


def _execute(
    dataset: Dataset,
    k: int,
    fit_node: Callable[[np.ndarray, np.ndarray | None], Estimate],
    fallback_shape: tuple[EstimateKind, int, int],
    aggregation: Aggregation,
    faults: FaultModel | None,
    seed: int,
    median_config: MedianConfig | None,
) -> DrlRun:
    faults = faults or FaultModel.none()
    n = dataset.n_total
    plan = partition(n, k)
    late = select_late_nodes(k, faults.latency, seed)

    def run_node(i: int) -> tuple[Estimate | None, float]:
        a, b = plan.ranges[i]
        if i in late:
            size = max(1, fraction_floor(faults.latency.data_fraction, b - a))
            b = a + size
        Xs = dataset.X[:, a:b]
        ys = dataset.y[a:b] if dataset.y is not None else None
        t0 = time.perf_counter()
        try:
            est = fit_node(Xs, ys)
        except Exception:
            # A failing node is treated as broken down, not as a run abort.
            est = None
        return est, time.perf_counter() - t0

    threads = worker_count(k)
    if threads == 1:
        results = [run_node(i) for i in range(k)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_node, range(k)))

    failed = frozenset(i for i, (est, _) in enumerate(results) if est is None)
    kind, rows, cols = fallback_shape
    placeholder = Estimate(kind, rows, cols, np.zeros(rows * cols))
    node_estimates = [est if est is not None else placeholder for est, _ in results]
    wall_times = np.array([t for _, t in results])

    faulted, flipped, broken = _apply_faults(node_estimates, faults, seed, extra_broken=failed)

    if aggregation is Aggregation.GEOMETRIC_MEDIAN:
        aggregate = geometric_median(faulted, median_config).median
    elif aggregation is Aggregation.AVERAGE:
        aggregate = coordinate_mean(faulted)
    else:
        raise ValueError(f"unknown aggregation {aggregation!r}")

    return DrlRun(
        plan=plan,
        node_estimates=tuple(node_estimates),
        faulted_estimates=tuple(faulted),
        aggregate=aggregate,
        aggregation=aggregation,
        per_node_lambda=node_outlier_fractions(dataset.outliers, plan),
        comm_bytes=sum(serialized_size(e) for e in faulted),
        wall_times=wall_times,
        late_nodes=late,
        flipped_nodes=flipped,
        broken_nodes=broken,
    )


def run_distributed_pca(
    dataset: Dataset,
    k: int,
    d: int,
    outlier_fraction: float | None = None,
    aggregation: Aggregation = Aggregation.GEOMETRIC_MEDIAN,
    faults: FaultModel | None = None,
    seed: int = 0,
    median_config: MedianConfig | None = None,
) -> DrlRun:
    """Distributed robust PCA: fuse per-node projection matrices.

    Every node runs the robust PCA learner on its column slice at trim level
    ``outlier_fraction`` (0.5 when None, i.e. unknown) and communicates the
    projection matrix of its basis; projections, not eigenvectors, are
    aggregated because bases of one subspace can rotate arbitrarily.
    """
    lam = 0.5 if outlier_fraction is None else float(outlier_fraction)
    p = dataset.X.shape[0]

    def fit(Xs: np.ndarray, _ys) -> Estimate:
        return projection_from_basis(robust_pca(Xs, d, lam))

    return _execute(
        dataset, k, fit, (EstimateKind.PROJECTION_MATRIX, p, p),
        aggregation, faults, seed, median_config,
    )


def run_distributed_regression(
    dataset: Dataset,
    k: int,
    outlier_fraction: float | None = None,
    aggregation: Aggregation = Aggregation.GEOMETRIC_MEDIAN,
    faults: FaultModel | None = None,
    seed: int = 0,
    median_config: MedianConfig | None = None,
) -> DrlRun:
    """Distributed robust regression: fuse per-node parameter vectors."""
    if dataset.y is None:
        raise ValueError("dataset has no responses")
    lam = 0.5 if outlier_fraction is None else float(outlier_fraction)
    p = dataset.X.shape[0]

    def fit(Xs: np.ndarray, ys: np.ndarray | None) -> Estimate:
        return trimmed_regression(Xs, ys, lam).theta

    return _execute(
        dataset, k, fit, (EstimateKind.REGRESSION_PARAM, p, 1),
        aggregation, faults, seed, median_config,
    )


def comm_cost(run: DrlRun) -> int:
    """Total bytes shipped to the aggregator: k estimates of fixed wire size."""
    return sum(serialized_size(e) for e in run.faulted_estimates)
