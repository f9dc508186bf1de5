"""Robust linear regression by coordinate-wise trimmed correlation.

Under an isotropic design the population regression vector equals
E[y * x] coordinate-wise, so each coordinate can be estimated by a trimmed
correlation that discards the largest-magnitude products; contaminated
samples produce exactly such products.  An ordinary least-squares solver is
provided as the non-robust baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimates import Estimate
from .partitioning import fraction_floor
from .trimming import trimmed_correlation

__all__ = ["RegressionModel", "trimmed_regression", "least_squares"]

_MAX_CONDITION = 1e12


@dataclass(frozen=True)
class RegressionModel:
    theta: Estimate  # RegressionParam, p x 1


def _check_xy(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1:
        raise ValueError("expected a p x N covariate matrix and an N-vector of responses")
    if X.shape[1] != y.size:
        raise ValueError(f"sample count mismatch: X has {X.shape[1]}, y has {y.size}")
    if y.size == 0:
        raise ValueError("empty data")
    return X, y


def trimmed_regression(X, y, outlier_fraction: float) -> RegressionModel:
    """Coordinate-wise trimmed-correlation estimate of the regression vector.

    Trim level is ``floor(outlier_fraction * N)``; components are normalized
    by the retained count (see trimmed_correlation), so the clean untrimmed
    case is an unbiased estimate of the parameter under an identity-design.
    """
    X, y = _check_xy(X, y)
    if not 0.0 <= outlier_fraction < 1.0:
        raise ValueError("outlier_fraction must lie in [0, 1)")
    trim = fraction_floor(outlier_fraction, y.size)
    theta = trimmed_correlation(y, X, trim)
    return RegressionModel(Estimate.regression_param(theta))


def least_squares(X, y) -> RegressionModel:
    """Ordinary least squares through the normal equations.

    Rejects systems whose Gram matrix condition number exceeds 1e12.
    """
    X, y = _check_xy(X, y)
    p, n = X.shape
    if n < p:
        raise ValueError(f"need at least p={p} samples, got {n}")
    G = X @ X.T
    w = np.linalg.eigvalsh(G)
    if w[0] <= 0 or w[-1] / w[0] > _MAX_CONDITION:
        raise np.linalg.LinAlgError(
            "normal equations are singular or too ill-conditioned "
            f"(condition above {_MAX_CONDITION:.0e})"
        )
    theta = np.linalg.solve(G, X @ y)
    return RegressionModel(Estimate.regression_param(theta))
