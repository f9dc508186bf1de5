"""Seeded synthetic contaminated datasets for the PCA and regression tasks.

Inliers follow the generative models

    PCA:        x = B z + v,    z ~ N(0, I_d),  v ~ N(0, sigma_e^2 I_p)
    regression: y = <theta, x> + v,  x ~ N(0, I_p),  v ~ N(0, sigma_e^2)

with B a random p x d matrix whose columns are orthogonalized.  Outlier
covariates have i.i.d. entries uniform on [-sigma_o, sigma_o]; outlier
responses follow the sign-flipped model y = -<theta, x> + v.

Placement policies control where the outlier columns land so that a
contiguous even partition over k nodes sees prescribed per-node outlier
fractions (uniform, explicit per-node fractions, concentrated on the first
node, or whole nodes made pure-outlier).

All randomness is drawn from counter-based (Philox) streams keyed by
(seed, stream id), so datasets are bit-reproducible and independent of any
execution schedule.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .estimates import Estimate
from .partitioning import NodePlan, partition

__all__ = [
    "PlacementKind",
    "Placement",
    "half_split_fractions",
    "PcaScenario",
    "LrScenario",
    "Dataset",
    "rng_stream",
    "gen_pca",
    "gen_lr",
    "node_outlier_fractions",
    "dataset_to_csv",
    "dataset_from_csv",
]

# Stream ids; separate streams keep signal, noise and outliers independent.
_TRUTH, _SIGNAL, _NOISE, _OUTLIERS, _SHUFFLE, _OUTLIER_NOISE = range(6)


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator for the sub-stream (seed, *key)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, *key))))


class PlacementKind(enum.Enum):
    UNIFORM = "uniform"
    PER_NODE_FRACTIONS = "per_node"
    SINGLE_NODE_CONCENTRATED = "single_node"
    FAVORABLE_HALF = "favorable_half"


@dataclass(frozen=True)
class Placement:
    """Outlier placement policy.

    ``fractions`` is required for PER_NODE_FRACTIONS (one entry per node,
    each in [0, 1), mean equal to the overall outlier fraction) and must be
    absent otherwise.
    """

    kind: PlacementKind = PlacementKind.UNIFORM
    fractions: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind is PlacementKind.PER_NODE_FRACTIONS:
            if not self.fractions:
                raise ValueError("per-node placement needs a fractions vector")
            object.__setattr__(self, "fractions", tuple(float(f) for f in self.fractions))
            if any(not 0.0 <= f < 1.0 for f in self.fractions):
                raise ValueError("per-node fractions must lie in [0, 1)")
        elif self.fractions is not None:
            raise ValueError(f"{self.kind.value} placement takes no fractions")

    @classmethod
    def uniform(cls) -> "Placement":
        return cls(PlacementKind.UNIFORM)

    @classmethod
    def per_node(cls, fractions) -> "Placement":
        return cls(PlacementKind.PER_NODE_FRACTIONS, tuple(fractions))

    @classmethod
    def single_node(cls) -> "Placement":
        return cls(PlacementKind.SINGLE_NODE_CONCENTRATED)

    @classmethod
    def favorable_half(cls) -> "Placement":
        return cls(PlacementKind.FAVORABLE_HALF)


def half_split_fractions(k: int, high: float, low: float) -> tuple[float, ...]:
    """Per-node fractions with ``high`` on the first half of the nodes.

    Odd k puts the extra node on the high side.
    """
    n_high = (k + 1) // 2
    return (high,) * n_high + (low,) * (k - n_high)


def _check_scenario(p, n_total, outlier_fraction, sigma_e, sigma_o, seed) -> None:
    if p < 1 or n_total < 1:
        raise ValueError("dimensions must be positive")
    if not 0.0 <= outlier_fraction < 1.0:
        raise ValueError("outlier_fraction must lie in [0, 1)")
    if sigma_e <= 0 or sigma_o <= 0:
        raise ValueError("sigma_e and sigma_o must be positive")
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class PcaScenario:
    p: int
    d: int
    n_total: int
    outlier_fraction: float
    sigma_e: float = 1.0
    sigma_o: float = 10.0
    placement: Placement = Placement.uniform()
    seed: int = 0

    def __post_init__(self) -> None:
        _check_scenario(self.p, self.n_total, self.outlier_fraction,
                        self.sigma_e, self.sigma_o, self.seed)
        if not 1 <= self.d < self.p:
            raise ValueError("need 1 <= d < p")


@dataclass(frozen=True)
class LrScenario:
    p: int
    n_total: int
    outlier_fraction: float
    sigma_e: float = 1.0
    sigma_o: float = 10.0
    placement: Placement = Placement.uniform()
    seed: int = 0

    def __post_init__(self) -> None:
        _check_scenario(self.p, self.n_total, self.outlier_fraction,
                        self.sigma_e, self.sigma_o, self.seed)


@dataclass(frozen=True)
class Dataset:
    """Sample matrix with ground truth and per-sample outlier labels."""

    X: np.ndarray  # p x n
    y: np.ndarray | None  # n, responses (regression only)
    outliers: np.ndarray  # n, bool, True marks a contaminated column
    truth: Estimate | None  # EigenBasis (PCA) or RegressionParam (regression)
    truth_projection: Estimate | None = None  # B B^T for the PCA truth

    @property
    def n_total(self) -> int:
        return self.X.shape[1]

    @property
    def overall_outlier_fraction(self) -> float:
        return float(self.outliers.mean())


def _apportion(quotas: np.ndarray, total: int) -> np.ndarray:
    """Integer counts summing to ``total``, proportional to ``quotas``.

    Largest-remainder rounding; ties go to the lowest index.
    """
    if total == 0:
        return np.zeros(quotas.size, dtype=int)
    q = np.asarray(quotas, dtype=float)
    if q.sum() <= 0:
        raise ValueError("cannot place outliers: all quotas are zero")
    q = q * (total / q.sum())
    counts = np.floor(q + 1e-9).astype(int)
    short = total - counts.sum()
    if short > 0:
        remainders = q - counts
        for i in np.argsort(-remainders, kind="stable")[:short]:
            counts[i] += 1
    elif short < 0:  # guard overshoot from the floor nudge
        for i in np.argsort(q - counts, kind="stable")[: -short]:
            counts[i] -= 1
    return counts


def _outlier_labels(n: int, n_out: int, k: int, outlier_fraction: float,
                    placement: Placement, seed: int) -> np.ndarray:
    plan = partition(n, k)
    labels = np.zeros(n, dtype=bool)
    if n_out == 0:
        if placement.kind is PlacementKind.PER_NODE_FRACTIONS and any(placement.fractions):
            raise ValueError("per-node fractions are nonzero but the overall fraction is 0")
        return labels

    if placement.kind is PlacementKind.UNIFORM:
        labels[:n_out] = True
        perm = rng_stream(seed, _SHUFFLE).permutation(n)
        return labels[perm]

    if placement.kind is PlacementKind.PER_NODE_FRACTIONS:
        fractions = np.asarray(placement.fractions, dtype=float)
        if fractions.size != k:
            raise ValueError(f"need {k} per-node fractions, got {fractions.size}")
        sizes = np.asarray(plan.sizes, dtype=float)
        if abs(fractions.mean() - outlier_fraction) > 1.0 / n + 1e-9:
            raise ValueError(
                "per-node fractions are inconsistent with the overall outlier fraction"
            )
        counts = _apportion(fractions * sizes, n_out)
        if np.any(counts > plan.sizes):
            raise ValueError("per-node fractions exceed a node's capacity")
        # Outliers sit contiguously at the start of each node's range; no
        # implemented estimator is sensitive to position inside a node.
        for (a, _), c in zip(plan.ranges, counts):
            labels[a : a + c] = True
        return labels

    # Concentrated policies: fill columns from the front, so outliers load
    # the first node first, then spill into the following nodes.
    labels[:n_out] = True
    return labels


def _outlier_count(outlier_fraction: float, n: int) -> int:
    return int(np.floor(outlier_fraction * n + 0.5))


def gen_pca(scenario: PcaScenario, k: int) -> Dataset:
    """Generate a contaminated subspace-recovery dataset laid out for k nodes."""
    p, d, n = scenario.p, scenario.d, scenario.n_total
    seed = scenario.seed
    n_out = _outlier_count(scenario.outlier_fraction, n)
    labels = _outlier_labels(n, n_out, k, scenario.outlier_fraction,
                             scenario.placement, seed)

    raw = rng_stream(seed, _TRUTH).standard_normal((p, d))
    basis = _orthonormalize(raw)

    n_in = n - n_out
    Z = rng_stream(seed, _SIGNAL).standard_normal((d, n_in))
    V = rng_stream(seed, _NOISE).standard_normal((p, n_in)) * scenario.sigma_e
    X_in = basis @ Z + V
    X_out = rng_stream(seed, _OUTLIERS).uniform(-scenario.sigma_o, scenario.sigma_o, (p, n_out))

    X = np.empty((p, n))
    X[:, ~labels] = X_in
    X[:, labels] = X_out

    truth = Estimate.eigen_basis(basis)
    proj = basis @ basis.T
    proj = np.triu(proj) + np.triu(proj, 1).T
    return Dataset(X=X, y=None, outliers=labels, truth=truth,
                   truth_projection=Estimate.projection_matrix(proj))


def gen_lr(scenario: LrScenario, k: int) -> Dataset:
    """Generate a contaminated regression dataset laid out for k nodes."""
    p, n = scenario.p, scenario.n_total
    seed = scenario.seed
    n_out = _outlier_count(scenario.outlier_fraction, n)
    labels = _outlier_labels(n, n_out, k, scenario.outlier_fraction,
                             scenario.placement, seed)

    theta = rng_stream(seed, _TRUTH).standard_normal(p)

    n_in = n - n_out
    X_in = rng_stream(seed, _SIGNAL).standard_normal((p, n_in))
    y_in = theta @ X_in + rng_stream(seed, _NOISE).standard_normal(n_in) * scenario.sigma_e
    X_out = rng_stream(seed, _OUTLIERS).uniform(-scenario.sigma_o, scenario.sigma_o, (p, n_out))
    y_out = -(theta @ X_out) + rng_stream(seed, _OUTLIER_NOISE).standard_normal(n_out) * scenario.sigma_e

    X = np.empty((p, n))
    y = np.empty(n)
    X[:, ~labels] = X_in
    X[:, labels] = X_out
    y[~labels] = y_in
    y[labels] = y_out

    return Dataset(X=X, y=y, outliers=labels, truth=Estimate.regression_param(theta))


def _orthonormalize(A: np.ndarray) -> np.ndarray:
    # Modified Gram-Schmidt on the columns.
    Q = A.astype(np.float64, copy=True)
    for j in range(Q.shape[1]):
        v = Q[:, j]
        for i in range(j):
            v -= (Q[:, i] @ v) * Q[:, i]
        nrm = np.linalg.norm(v)
        if nrm <= 1e-12:
            raise ValueError("degenerate random basis; use a different seed")
        Q[:, j] = v / nrm
    return Q


def node_outlier_fractions(outliers: np.ndarray, plan: NodePlan) -> np.ndarray:
    """Empirical per-node outlier fractions under a partition plan."""
    outliers = np.asarray(outliers, dtype=bool)
    if outliers.size != plan.total:
        raise ValueError("labels do not cover the partition plan")
    return np.array([outliers[a:b].mean() for a, b in plan.ranges])


def dataset_to_csv(dataset: Dataset, path) -> None:
    """Write one sample per line: label, response if present, covariates."""
    p = dataset.X.shape[0]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        cols = ["label"] + (["y"] if dataset.y is not None else [])
        writer.writerow(cols + [f"x{j + 1}" for j in range(p)])
        for i in range(dataset.n_total):
            row = [int(dataset.outliers[i])]
            if dataset.y is not None:
                row.append(repr(float(dataset.y[i])))
            row.extend(repr(float(v)) for v in dataset.X[:, i])
            writer.writerow(row)


def dataset_from_csv(path) -> Dataset:
    """Read a dataset written by dataset_to_csv; ground truth is not stored."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        has_y = len(header) > 1 and header[1] == "y"
        off = 2 if has_y else 1
        labels, ys, xs = [], [], []
        for row in reader:
            labels.append(bool(int(row[0])))
            if has_y:
                ys.append(float(row[1]))
            xs.append([float(v) for v in row[off:]])
    X = np.array(xs, dtype=np.float64).T
    if X.size == 0:
        raise ValueError(f"no samples in {Path(path)}")
    return Dataset(
        X=X,
        y=np.array(ys) if has_y else None,
        outliers=np.array(labels, dtype=bool),
        truth=None,
    )
