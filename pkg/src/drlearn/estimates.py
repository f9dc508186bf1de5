"""Flat estimate representation shared by all learners and the aggregator.

Regression vectors, eigenbases and projection matrices are all stored as a
flat row-major float array plus a shape tag, so that aggregation (geometric
median, averaging) can treat every estimate as a point in one Euclidean
space.  Estimates of different kinds never compare, even when their shapes
happen to agree; this prevents silently fusing eigenbases with projection
matrices.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EstimateKind",
    "Estimate",
    "ShapeMismatchError",
    "distance",
    "norm",
    "zeros_like",
    "estimate_to_csv_row",
    "estimate_from_csv_row",
    "serialized_size",
]


class ShapeMismatchError(ValueError):
    """Two estimates do not live in the same space (kind or shape differ)."""


class EstimateKind(enum.Enum):
    REGRESSION_PARAM = "RegressionParam"
    EIGEN_BASIS = "EigenBasis"
    PROJECTION_MATRIX = "ProjectionMatrix"


# Fixed-width float formatting: 18 significant digits round-trip float64
# exactly, and every value serializes to the same byte length, so the
# serialized size of an estimate depends only on its shape.
_FLOAT_FMT = "{:+.17e}"


@dataclass(frozen=True, eq=False)
class Estimate:
    """A point in parameter space with a flat row-major value layout.

    Immutable value type: the backing array is made read-only, so estimates
    are safe to share between concurrent workers.
    """

    kind: EstimateKind
    rows: int
    cols: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.kind, EstimateKind):
            raise TypeError(f"kind must be an EstimateKind, got {self.kind!r}")
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"rows and cols must be positive, got {self.rows}x{self.cols}")
        vals = np.array(self.values, dtype=np.float64, copy=True).ravel()
        if vals.size != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} values for a "
                f"{self.rows}x{self.cols} estimate, got {vals.size}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("estimate values must all be finite")
        if self.kind is EstimateKind.REGRESSION_PARAM and self.cols != 1:
            raise ValueError("a regression parameter must have a single column")
        if self.kind is EstimateKind.PROJECTION_MATRIX and self.rows != self.cols:
            raise ValueError("a projection matrix must be square")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def regression_param(cls, vector: np.ndarray) -> "Estimate":
        v = np.asarray(vector, dtype=np.float64).ravel()
        return cls(EstimateKind.REGRESSION_PARAM, v.size, 1, v)

    @classmethod
    def eigen_basis(cls, matrix: np.ndarray) -> "Estimate":
        m = np.asarray(matrix, dtype=np.float64)
        if m.ndim != 2:
            raise ValueError("an eigenbasis must be a 2-d array")
        return cls(EstimateKind.EIGEN_BASIS, m.shape[0], m.shape[1], m.ravel())

    @classmethod
    def projection_matrix(cls, matrix: np.ndarray) -> "Estimate":
        m = np.asarray(matrix, dtype=np.float64)
        if m.ndim != 2:
            raise ValueError("a projection matrix must be a 2-d array")
        return cls(EstimateKind.PROJECTION_MATRIX, m.shape[0], m.shape[1], m.ravel())

    @property
    def matrix(self) -> np.ndarray:
        """Read-only (rows, cols) view of the values."""
        return self.values.reshape(self.rows, self.cols)

    def with_values(self, values: np.ndarray) -> "Estimate":
        """A new estimate of the same kind and shape with replaced values."""
        return Estimate(self.kind, self.rows, self.cols, values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Estimate):
            return NotImplemented
        return (
            self.kind is other.kind
            and self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Estimate({self.kind.value}, {self.rows}x{self.cols})"


def _require_same_space(a: Estimate, b: Estimate) -> None:
    if a.kind is not b.kind:
        raise ShapeMismatchError(f"kind mismatch: {a.kind.value} vs {b.kind.value}")
    if a.rows != b.rows or a.cols != b.cols:
        raise ShapeMismatchError(
            f"shape mismatch: {a.rows}x{a.cols} vs {b.rows}x{b.cols}"
        )


def distance(a: Estimate, b: Estimate) -> float:
    """Euclidean (Frobenius) distance between two estimates of one space."""
    _require_same_space(a, b)
    return float(np.linalg.norm(a.values - b.values))


def norm(a: Estimate) -> float:
    """Euclidean (Frobenius) norm; equals the distance to the zero estimate."""
    return float(np.linalg.norm(a.values))


def zeros_like(a: Estimate) -> Estimate:
    return Estimate(a.kind, a.rows, a.cols, np.zeros(a.rows * a.cols))


def estimate_to_csv_row(a: Estimate) -> str:
    """Serialize as ``kind,rows,cols,v1,...,vn`` (one flat CSV row)."""
    head = f"{a.kind.value},{a.rows},{a.cols}"
    body = ",".join(_FLOAT_FMT.format(v) for v in a.values)
    return f"{head},{body}" if body else head


def estimate_from_csv_row(row: str) -> Estimate:
    parts = row.strip().split(",")
    if len(parts) < 4:
        raise ValueError("estimate row needs at least kind,rows,cols and one value")
    try:
        kind = EstimateKind(parts[0])
    except ValueError:
        raise ValueError(f"unknown estimate kind {parts[0]!r}") from None
    rows, cols = int(parts[1]), int(parts[2])
    values = np.array([float(v) for v in parts[3:]])
    return Estimate(kind, rows, cols, values)


def serialized_size(a: Estimate) -> int:
    """Byte length of the CSV serialization; the per-estimate wire size."""
    return len(estimate_to_csv_row(a).encode("ascii"))
