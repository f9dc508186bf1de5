"""Relative error metrics for subspace and regression estimates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimates import Estimate, EstimateKind, distance, norm

__all__ = ["RunMetrics", "projection_error", "regression_error", "eigengap"]


@dataclass(frozen=True)
class RunMetrics:
    relative_error: float
    absolute_error: float
    bound_value: float | None = None
    lambda_prime: float | None = None

    def __post_init__(self) -> None:
        if self.relative_error < 0 or self.absolute_error < 0:
            raise ValueError("errors must be nonnegative")


def _relative(estimate: Estimate, truth: Estimate, kind: EstimateKind) -> float:
    if estimate.kind is not kind or truth.kind is not kind:
        raise ValueError(f"expected {kind.value} estimates")
    denom = norm(truth)
    if denom == 0.0:
        raise ValueError("truth has zero norm")
    return distance(estimate, truth) / denom


def projection_error(estimate: Estimate, truth: Estimate) -> float:
    """Frobenius distance between projection matrices over the truth's norm.

    The truth of a rank-d orthonormal projection has norm sqrt(d).  The
    estimate is used as-is even when it is a median of projections and
    therefore not exactly a projection itself; that keeps comparisons on
    one scale across aggregation methods.
    """
    return _relative(estimate, truth, EstimateKind.PROJECTION_MATRIX)


def regression_error(estimate: Estimate, truth: Estimate) -> float:
    """Euclidean parameter error relative to the truth's norm."""
    return _relative(estimate, truth, EstimateKind.REGRESSION_PARAM)


def eigengap(eigenvalues, d: int) -> float:
    """Gap between the d-th and (d+1)-th entries of a descending spectrum."""
    vals = np.asarray(eigenvalues, dtype=float)
    if vals.ndim != 1:
        raise ValueError("expected a vector of eigenvalues")
    if not 1 <= d < vals.size:
        raise ValueError(f"need 1 <= d < {vals.size}, got {d}")
    gap = float(vals[d - 1] - vals[d])
    if gap < 0:
        raise ValueError("eigenvalues must be non-increasing")
    return gap
