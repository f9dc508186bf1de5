"""Robust PCA: trimmed covariance followed by a symmetric eigendecomposition.

No centering is applied; the generative model here is zero-mean and the
estimator targets the second-moment matrix.  Callers with non-centered data
must pre-process.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimates import Estimate
from .partitioning import fraction_floor
from .trimming import trimmed_covariance

__all__ = ["PcaModel", "robust_pca", "standard_pca", "projection_from_basis"]

# The d-th eigenvalue is treated as numerically zero below this multiple of
# the leading eigenvalue; the model is then flagged degenerate.
_DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class PcaModel:
    """Top-d eigenpairs of the (trimmed) covariance.

    ``eigengap`` is the gap between the d-th and (d+1)-th eigenvalues of the
    estimated covariance; a to-zero gap makes subspace perturbation bounds
    vacuous.  ``degenerate`` flags covariance rank below d.
    """

    basis: Estimate  # EigenBasis, p x d, orthonormal columns
    eigenvalues: np.ndarray  # length d, non-increasing
    eigengap: float
    degenerate: bool = False


def _fix_signs(V: np.ndarray) -> np.ndarray:
    # Deterministic sign convention: the largest-magnitude component of each
    # eigenvector is made positive (first index wins ties), so per-node
    # bases serialize reproducibly.
    V = V.copy()
    for j in range(V.shape[1]):
        i = int(np.argmax(np.abs(V[:, j])))
        if V[i, j] < 0:
            V[:, j] = -V[:, j]
    return V


def robust_pca(X, d: int, outlier_fraction: float) -> PcaModel:
    """Estimate the top-d eigenbasis of the data covariance under outliers.

    The covariance is assembled from magnitude-trimmed inner products at
    trim level ``floor(outlier_fraction * m)`` and eigendecomposed with a
    deterministic symmetric solver.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("expected a p x m sample matrix")
    p, m = X.shape
    if not 1 <= d < p:
        raise ValueError(f"need 1 <= d < p, got d={d}, p={p}")
    if not 0.0 <= outlier_fraction < 1.0:
        raise ValueError("outlier_fraction must lie in [0, 1)")
    trim = fraction_floor(outlier_fraction, m)
    if trim >= m:
        raise ValueError("trim level leaves no samples")

    C = trimmed_covariance(X, trim)
    eigvals, eigvecs = np.linalg.eigh(C)  # ascending
    order = np.arange(p - 1, -1, -1)
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    top = _fix_signs(eigvecs[:, :d])
    gap = float(eigvals[d - 1] - eigvals[d])
    degenerate = bool(eigvals[d - 1] <= _DEGENERATE_RTOL * abs(eigvals[0]))
    return PcaModel(
        basis=Estimate.eigen_basis(top),
        eigenvalues=eigvals[:d].copy(),
        eigengap=gap,
        degenerate=degenerate,
    )


def standard_pca(X, d: int) -> PcaModel:
    """Plain PCA baseline: robust_pca with nothing trimmed."""
    return robust_pca(X, d, 0.0)


def projection_from_basis(model: PcaModel) -> Estimate:
    """The projection matrix W W^T of the model's basis.

    Projections are the rotation-invariant representation of a subspace:
    two bases spanning the same subspace may differ arbitrarily as matrices
    yet share one projection, which is why aggregation operates on
    projections rather than on eigenvectors.
    """
    W = model.basis.matrix
    P = W @ W.T
    P = np.triu(P) + np.triu(P, 1).T
    return Estimate.projection_matrix(P)
