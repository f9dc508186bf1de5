"""Magnitude-trimmed inner products and the estimators built on them.

The trimmed inner product of two vectors forms the element-wise products
q_i = x_i * x2_i, discards the ``trim_count`` largest in magnitude and sums
the rest.  Gross outliers produce products of large magnitude, so trimming
at the contamination level removes their influence while the surviving
terms stay bounded by authentic samples.

Tie rule: when several |q_i| are equal at the cut boundary, entries with
lower index are kept.  This makes results independent of platform and of
the parallel schedule.

The hot kernels are JIT-compiled (rows are independent, so the pair loop
parallelizes without affecting results).  Selection of the cut threshold
uses an exact in-place quickselect instead of a full sort; the retained set
and the index-order summation are identical to what a stable ascending sort
of |q_i| would produce, at O(N) instead of O(N log N) per pair.
"""

from __future__ import annotations

import os

import numpy as np

# Skip numba's TBB probe (noisy and broken on some boxes); OpenMP is enough
# for the row-parallel kernels below and callers may still override.
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")
import numba

__all__ = [
    "trimmed_inner_product",
    "retained_indices",
    "trimmed_covariance",
    "trimmed_correlation",
]


@numba.njit(inline="always")
def _kth_smallest(w, k):
    # Iterative three-way quickselect with median-of-three pivots; w is a
    # scratch buffer and is consumed.  Three-way partitioning keeps
    # duplicate-heavy inputs linear.
    lo = 0
    hi = w.shape[0] - 1
    while lo < hi:
        mid = (lo + hi) >> 1
        a, b, c = w[lo], w[mid], w[hi]
        if a > b:
            a, b = b, a
        if b > c:
            b = c if a <= c else a
        pivot = b
        i, j, g = lo, lo, hi
        while j <= g:
            v = w[j]
            if v < pivot:
                w[j] = w[i]
                w[i] = v
                i += 1
                j += 1
            elif v > pivot:
                w[j] = w[g]
                w[g] = v
                g -= 1
            else:
                j += 1
        if k < i:
            hi = i - 1
        elif k > g:
            lo = g + 1
        else:
            return pivot
    return w[lo]


@numba.njit(inline="always")
def _row_trimmed_sum(x, y, keep):
    m = x.shape[0]
    q = np.empty(m)
    w = np.empty(m)
    for i in range(m):
        v = x[i] * y[i]
        q[i] = v
        w[i] = abs(v)
    tau = _kth_smallest(w, keep - 1)
    s = 0.0
    n_below = 0
    for i in range(m):
        if abs(q[i]) < tau:
            s += q[i]
            n_below += 1
    budget = keep - n_below
    if budget > 0:
        for i in range(m):
            if abs(q[i]) == tau:
                s += q[i]
                budget -= 1
                if budget == 0:
                    break
    return s


@numba.njit(parallel=True, cache=True)
def _pair_trimmed_sums(X, rows_i, rows_j, keep):
    out = np.empty(rows_i.shape[0])
    for r in numba.prange(rows_i.shape[0]):
        out[r] = _row_trimmed_sum(X[rows_i[r]], X[rows_j[r]], keep)
    return out


@numba.njit(parallel=True, cache=True)
def _vector_trimmed_sums(X, y, keep):
    out = np.empty(X.shape[0])
    for r in numba.prange(X.shape[0]):
        out[r] = _row_trimmed_sum(X[r], y, keep)
    return out


def _as_matrix(X) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("expected a 2-d sample matrix")
    return X


def _as_vector(x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("expected a 1-d vector")
    return x


def _check_trim(trim_count: int, n: int) -> int:
    trim_count = int(trim_count)
    if trim_count < 0:
        raise ValueError("trim_count must be nonnegative")
    if trim_count >= n:
        raise ValueError(f"trim_count {trim_count} must be smaller than the length {n}")
    return trim_count


def trimmed_inner_product(x, x2, trim_count: int) -> float:
    """Sum of element-wise products after dropping the trim_count largest |q_i|."""
    x = _as_vector(x)
    x2 = _as_vector(x2)
    if x.size != x2.size:
        raise ValueError(f"length mismatch: {x.size} vs {x2.size}")
    trim_count = _check_trim(trim_count, x.size)
    if trim_count == 0:
        return float(np.dot(x, x2))
    return float(_vector_trimmed_sums(x[None, :], x2, x.size - trim_count)[0])


def retained_indices(x, x2, trim_count: int) -> np.ndarray:
    """Ascending indices of the products kept by the trim rule.

    Reference statement of the semantics (stable ascending sort of |q_i|,
    lowest index first among ties); used for auditing and as the test oracle
    for the selection kernels.
    """
    x = _as_vector(x)
    x2 = _as_vector(x2)
    if x.size != x2.size:
        raise ValueError(f"length mismatch: {x.size} vs {x2.size}")
    trim_count = _check_trim(trim_count, x.size)
    order = np.argsort(np.abs(x * x2), kind="stable")
    return np.sort(order[: x.size - trim_count])


def trimmed_covariance(X, trim_count: int) -> np.ndarray:
    """p x p matrix of pairwise trimmed inner products of the rows of X.

    Each unordered pair is computed once and mirrored, so the output is
    exactly symmetric.  With trim_count = 0 this is the plain Gram matrix
    X @ X.T (upper triangle taken as canonical).
    """
    X = _as_matrix(X)
    p, m = X.shape
    trim_count = _check_trim(trim_count, m)
    if trim_count == 0:
        G = X @ X.T
        return np.triu(G) + np.triu(G, 1).T
    iu, ju = np.triu_indices(p)
    sums = _pair_trimmed_sums(X, iu, ju, m - trim_count)
    C = np.empty((p, p))
    C[iu, ju] = sums
    C[ju, iu] = sums
    return C


def trimmed_correlation(y, X, trim_count: int) -> np.ndarray:
    """Trimmed inner product of y against each row of X, per retained term.

    Component j is ``trimmed_inner_product(y, X[j], trim_count)`` divided by
    the retained count N - trim_count, which makes the clean untrimmed case
    an unbiased estimate of E[y * x_j]; multiply back by the retained count
    to recover the raw trimmed sums.
    """
    X = _as_matrix(X)
    y = _as_vector(y)
    p, n = X.shape
    if y.size != n:
        raise ValueError(f"length mismatch: y has {y.size}, X has {n} columns")
    trim_count = _check_trim(trim_count, n)
    if trim_count == 0:
        return (X @ y) / n
    keep = n - trim_count
    return _vector_trimmed_sums(X, y, keep) / keep
