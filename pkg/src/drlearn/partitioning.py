"""Even contiguous column partitioning of a sample set over worker nodes."""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["NodePlan", "partition", "fraction_floor", "fraction_ceil"]

# Counts like floor(0.3 * m) are ubiquitous here and the decimal fractions
# involved are not exactly representable; the guard keeps products such as
# 0.1 * 20 == 2.0000000000000004 from rounding the wrong way.
_GUARD = 1e-9


def fraction_floor(fraction: float, total: int) -> int:
    """floor(fraction * total), robust to float representation of decimals."""
    return int(math.floor(fraction * total + _GUARD))


def fraction_ceil(fraction: float, total: int) -> int:
    """ceil(fraction * total), robust to float representation of decimals."""
    return int(math.ceil(fraction * total - _GUARD))


@dataclass(frozen=True)
class NodePlan:
    """Contiguous, balanced column ranges assigning samples to k nodes."""

    k: int
    ranges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.k != len(self.ranges):
            raise ValueError("k must equal the number of ranges")
        prev = 0
        for a, b in self.ranges:
            if a != prev or b <= a:
                raise ValueError("ranges must be contiguous, nonempty and ordered")
            prev = b
        sizes = self.sizes
        if max(sizes) - min(sizes) > 1:
            raise ValueError("range sizes may differ by at most one")

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in self.ranges)

    @property
    def total(self) -> int:
        return self.ranges[-1][1]


def partition(total_columns: int, k: int) -> NodePlan:
    """Divide ``total_columns`` into k contiguous ranges of near-equal size.

    The first ``total_columns % k`` ranges carry one extra column, so
    partition(10, 3) has sizes (4, 3, 3).
    """
    if k < 1:
        raise ValueError("node count k must be at least 1")
    if k > total_columns:
        raise ValueError(f"cannot split {total_columns} columns over {k} nodes")
    base, extra = divmod(total_columns, k)
    ranges = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        ranges.append((start, start + size))
        start += size
    return NodePlan(k, tuple(ranges))
