"""Independent oracles used by the test suite.

These deliberately avoid the solvers under test: the geometric-median
oracle is a dense grid search with local refinement plus projected
subgradient descent; the eigensolver oracle is a cyclic Jacobi rotation
sweep; the trimmed-sum oracle is a stable full sort.
"""

from __future__ import annotations

import numpy as np


def objective(P: np.ndarray, y: np.ndarray) -> float:
    """Total Euclidean distance from y to the rows of P."""
    return float(np.linalg.norm(P - y, axis=1).sum())


def _grid_search(P: np.ndarray, levels: int = 3, per_dim: int = 11) -> np.ndarray:
    lo = P.min(axis=0).astype(float)
    hi = P.max(axis=0).astype(float)
    best = P.mean(axis=0)
    best_obj = objective(P, best)
    for _ in range(levels):
        axes = [np.linspace(lo[d], hi[d], per_dim) for d in range(P.shape[1])]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, P.shape[1])
        objs = np.linalg.norm(mesh[:, None, :] - P[None, :, :], axis=2).sum(axis=1)
        i = int(np.argmin(objs))
        if objs[i] < best_obj:
            best, best_obj = mesh[i], float(objs[i])
        step = (hi - lo) / (per_dim - 1)
        lo = np.maximum(P.min(axis=0), best - 2 * step)
        hi = np.minimum(P.max(axis=0), best + 2 * step)
    return best


def _descent(P: np.ndarray, start: np.ndarray, lo: np.ndarray, hi: np.ndarray,
             iters: int = 200) -> np.ndarray:
    """Projected subgradient descent with Armijo backtracking."""
    y = start.astype(float).copy()
    fy = objective(P, y)
    scale = float(np.linalg.norm(hi - lo)) + 1e-12
    for _ in range(iters):
        diff = y - P
        dist = np.linalg.norm(diff, axis=1)
        mask = dist > 1e-15
        g = (diff[mask] / dist[mask, None]).sum(axis=0)
        gn = float(np.linalg.norm(g))
        if gn <= 1e-14:
            break
        direction = -g / gn
        step = scale
        improved = False
        for _ in range(60):
            cand = np.clip(y + step * direction, lo, hi)
            fc = objective(P, cand)
            if fc < fy - 1e-12 * step * gn:
                y, fy = cand, fc
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return y


def geometric_median_oracle(P: np.ndarray) -> tuple[np.ndarray, float]:
    """Brute-force minimizer of the total-distance objective.

    Dense grid over the bounding box refined three times, atoms as
    candidates, then projected subgradient descent from ten restarts.
    """
    P = np.asarray(P, dtype=float)
    lo = P.min(axis=0)
    hi = P.max(axis=0)
    rng = np.random.default_rng(12345)
    candidates = [_grid_search(P), P.mean(axis=0)]
    candidates.extend(P)
    starts = [candidates[0], P.mean(axis=0)]
    starts.extend(P[np.argsort(np.linalg.norm(P - P.mean(axis=0), axis=1))[:4]])
    while len(starts) < 10:
        starts.append(lo + rng.random(P.shape[1]) * (hi - lo))
    candidates.extend(_descent(P, s, lo, hi) for s in starts[:10])
    objs = [objective(P, c) for c in candidates]
    i = int(np.argmin(objs))
    return np.asarray(candidates[i]), float(objs[i])


def jacobi_eigh(A: np.ndarray, sweeps: int = 100, tol: float = 1e-14):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns (eigenvalues descending, eigenvectors as columns).
    """
    A = np.asarray(A, dtype=float).copy()
    n = A.shape[0]
    V = np.eye(n)
    scale = np.linalg.norm(A)
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off <= tol * max(scale, 1e-300):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) <= 1e-300:
                    continue
                theta = 0.5 * (A[q, q] - A[p, p]) / A[p, q]
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta**2 + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t**2 + 1.0)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
                V = V @ J
    order = np.argsort(-np.diag(A), kind="stable")
    return np.diag(A)[order], V[:, order]


def sorted_trimmed_sum(x: np.ndarray, y: np.ndarray, trim_count: int):
    """Stable-sort reference for the trimmed inner product.

    Returns (sum, retained indices ascending).
    """
    q = np.asarray(x, dtype=float) * np.asarray(y, dtype=float)
    order = np.argsort(np.abs(q), kind="stable")
    kept = order[: q.size - trim_count]
    return float(q[kept].sum()), np.sort(kept)


def subspace_distance(U: np.ndarray, V: np.ndarray) -> float:
    """Frobenius distance between the projections of two column bases."""
    return float(np.linalg.norm(U @ U.T - V @ V.T))
