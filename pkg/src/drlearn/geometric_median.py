"""Geometric median of a collection of estimates.

The geometric median is the point minimizing the total Euclidean distance to
a set of atoms.  It is the fusion step of the distributed runs: unlike the
coordinate-wise mean it keeps a breakdown point of 0.5, so up to half of the
node estimates may be arbitrarily corrupted without dragging the aggregate
away.

The solver is the classical Weiszfeld fixed-point iteration

    y  <-  (sum_j theta_j / ||y - theta_j||) / (sum_j 1 / ||y - theta_j||)

initialized at the coordinate-wise mean, with the Vardi-Zhang correction
when an iterate lands on an atom: the coinciding atom's pull is handled
through the subgradient condition instead of dividing by a near-zero
distance, which keeps the iteration globally convergent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .estimates import Estimate, ShapeMismatchError, distance

__all__ = [
    "MedianConfig",
    "MedianResult",
    "median_objective",
    "coordinate_mean",
    "geometric_median",
]


@dataclass(frozen=True)
class MedianConfig:
    """Stopping rule for the Weiszfeld iteration.

    ``tolerance`` is a relative step-size threshold; ``coincidence_epsilon``
    is the distance below which an iterate is treated as sitting on an atom.
    When left as None it defaults to ``1e-12 * (1 + max atom norm)``.
    """

    tolerance: float = 1e-10
    max_iterations: int = 10_000
    coincidence_epsilon: float | None = None

    def __post_init__(self) -> None:
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.coincidence_epsilon is not None and self.coincidence_epsilon <= 0:
            raise ValueError("coincidence_epsilon must be positive")


@dataclass(frozen=True)
class MedianResult:
    median: Estimate
    objective: float
    iterations: int
    converged: bool


def _stack(points: Sequence[Estimate]) -> np.ndarray:
    if len(points) == 0:
        raise ValueError("need at least one estimate")
    first = points[0]
    for p in points[1:]:
        if p.kind is not first.kind or p.rows != first.rows or p.cols != first.cols:
            raise ShapeMismatchError("all estimates must share kind and shape")
    return np.stack([p.values for p in points])


def median_objective(points: Sequence[Estimate], y: Estimate) -> float:
    """Total distance from ``y`` to every point."""
    if len(points) == 0:
        raise ValueError("need at least one estimate")
    return float(sum(distance(y, p) for p in points))


def coordinate_mean(points: Sequence[Estimate]) -> Estimate:
    """Element-wise average; the non-robust aggregation baseline."""
    P = _stack(points)
    return points[0].with_values(P.mean(axis=0))


def geometric_median(
    points: Sequence[Estimate], config: MedianConfig | None = None
) -> MedianResult:
    """Minimize the total distance to ``points`` over their common space.

    A single point is returned as-is.  For two points every point of the
    connecting segment is a minimizer; the midpoint is returned so the
    result is deterministic.  Non-convergence within ``max_iterations`` is
    reported through ``converged=False``, never as an error.
    """
    cfg = config or MedianConfig()
    P = _stack(points)
    k = P.shape[0]

    if k == 1:
        return MedianResult(points[0], 0.0, 0, True)
    if k == 2:
        mid = points[0].with_values(P.mean(axis=0))
        return MedianResult(mid, median_objective(points, mid), 0, True)

    eps = cfg.coincidence_epsilon
    if eps is None:
        eps = 1e-12 * (1.0 + float(np.max(np.linalg.norm(P, axis=1))))

    y = P.mean(axis=0)
    iterations = 0
    converged = False
    for iterations in range(1, cfg.max_iterations + 1):
        diff = P - y
        dist = np.linalg.norm(diff, axis=1)
        near = dist <= eps
        if near.any():
            far = ~near
            if not far.any():
                converged = True
                break
            inv = 1.0 / dist[far]
            pull = diff[far] * inv[:, None]
            resultant = pull.sum(axis=0)
            strength = float(np.linalg.norm(resultant))
            multiplicity = int(near.sum())
            if strength <= multiplicity:
                # The atoms' combined pull cannot overcome the coinciding
                # atom's subgradient ball: y is optimal.
                converged = True
                break
            step = multiplicity / strength
            target = (P[far] * inv[:, None]).sum(axis=0) / inv.sum()
            y_new = (1.0 - step) * target + step * y
        else:
            inv = 1.0 / dist
            y_new = (P * inv[:, None]).sum(axis=0) / inv.sum()
        move = float(np.linalg.norm(y_new - y))
        y = y_new
        if move <= cfg.tolerance * (1.0 + float(np.linalg.norm(y))):
            converged = True
            break

    med = points[0].with_values(y)
    return MedianResult(med, median_objective(points, med), iterations, converged)
