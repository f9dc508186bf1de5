"""Robustness constants and diagnostic error bounds for median fusion.

The concentration analysis of geometric-median aggregation rests on the
binary divergence

    psi(alpha, beta) = (1 - alpha) log((1 - alpha)/(1 - beta))
                       + alpha log(alpha / beta),      0 < beta < alpha < 1/2.

For a target confidence level alpha, the largest per-node failure
probability that still gives an exponential aggregate guarantee is the
largest beta with psi(alpha, beta) >= 1; conversely, a given per-node
failure probability determines the alpha at which psi crosses 1.  The
price of fusing by median instead of averaging is the relaxation factor

    C(alpha) = (1 - alpha) * sqrt(1 / (1 - 2 alpha)),

which approaches 1 as the per-node failure probability shrinks.  psi is
increasing in alpha and decreasing in beta, so both inverses are solved by
bisection (no closed forms exist).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .partitioning import fraction_floor

__all__ = [
    "divergence",
    "failure_threshold",
    "alpha_for_failure",
    "relaxation_factor",
    "corruption_exponent",
    "success_probability",
    "BreakdownBounds",
    "breakdown_bounds",
    "effective_outlier_fraction",
    "pca_error_bound",
    "regression_error_bound",
    "TheoryPoint",
    "tolerance_table",
]

_BISECT_TOL = 1e-10
# Nudge bracket endpoints away from the log singularities.
_EDGE = 1e-15


def divergence(alpha: float, beta: float) -> float:
    """The binary divergence psi(alpha, beta) on 0 < beta < alpha < 1/2."""
    if not 0.0 < beta < alpha < 0.5:
        raise ValueError(f"need 0 < beta < alpha < 1/2, got alpha={alpha}, beta={beta}")
    return (1.0 - alpha) * math.log((1.0 - alpha) / (1.0 - beta)) + alpha * math.log(
        alpha / beta
    )


def failure_threshold(alpha: float) -> float:
    """Largest per-node failure probability beta with divergence >= 1.

    psi decreases in beta and blows up as beta -> 0, so the crossing is
    found by bisection in log(beta) (the root can be astronomically small
    for small alpha).
    """
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")
    lo = math.log(1e-300)
    hi = math.log(alpha * (1.0 - _EDGE))
    if divergence(alpha, math.exp(lo)) < 1.0:
        raise ValueError(f"divergence never reaches 1 for alpha={alpha}")
    if divergence(alpha, math.exp(hi)) >= 1.0:
        return math.exp(hi)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        val = divergence(alpha, math.exp(mid))
        if abs(val - 1.0) <= _BISECT_TOL:
            return math.exp(mid)
        if val >= 1.0:
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))


def alpha_for_failure(failure_prob: float) -> float:
    """The alpha at which the divergence against ``failure_prob`` reaches 1."""
    if not 0.0 < failure_prob < 0.5:
        raise ValueError("failure_prob must lie in (0, 1/2)")
    lo = failure_prob * (1.0 + _EDGE) + _EDGE
    hi = 0.5 * (1.0 - _EDGE)
    if divergence(hi, failure_prob) < 1.0:
        raise ValueError(
            f"no alpha below 1/2 reaches divergence 1 for failure_prob={failure_prob}"
        )
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        val = divergence(mid, failure_prob)
        if abs(val - 1.0) <= _BISECT_TOL:
            return mid
        if val >= 1.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def relaxation_factor(alpha: float) -> float:
    """Error inflation of median fusion relative to a single good machine."""
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")
    return (1.0 - alpha) * math.sqrt(1.0 / (1.0 - 2.0 * alpha))


def corruption_exponent(alpha: float, gamma: float, failure_prob: float) -> float:
    """Concentration exponent when a gamma fraction of nodes is corrupted.

    Valid for 0 <= gamma < (alpha - failure_prob) / (1 - failure_prob);
    gamma = 0 recovers the uncorrupted divergence.
    """
    if not 0.0 < failure_prob < alpha < 0.5:
        raise ValueError("need 0 < failure_prob < alpha < 1/2")
    limit = (alpha - failure_prob) / (1.0 - failure_prob)
    if not 0.0 <= gamma < limit:
        raise ValueError(f"gamma must lie in [0, {limit}), got {gamma}")
    return divergence((alpha - gamma) / (1.0 - gamma), failure_prob)


def success_probability(k: int, gamma: float, exponent: float) -> float:
    """1 - exp(-k (1 - gamma) exponent): the aggregate guarantee level."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return 1.0 - math.exp(-k * (1.0 - gamma) * exponent)


@dataclass(frozen=True)
class BreakdownBounds:
    """Breakdown-point bounds as functions of the base learner's point.

    ``drl_lower`` holds under every outlier distribution over nodes;
    ``favorable`` is the tolerable fraction when whole nodes are sacrificed
    to pure outliers; ``avg_worst(k)`` is the averaging baseline's point
    when all outliers concentrate on one of k nodes.
    """

    base: float
    drl_lower: float
    favorable: float

    def avg_worst(self, k: int) -> float:
        if k < 1:
            raise ValueError("k must be at least 1")
        return self.base / k


def breakdown_bounds(base_breakdown: float, epsilon: float) -> BreakdownBounds:
    if not 0.0 < base_breakdown < 1.0:
        raise ValueError("base_breakdown must lie in (0, 1)")
    if not 0.0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    return BreakdownBounds(
        base=base_breakdown,
        drl_lower=base_breakdown / 2.0,
        favorable=(0.5 - epsilon) + (0.5 + epsilon) * base_breakdown,
    )


def effective_outlier_fraction(fractions, gamma: float) -> float:
    """The floor(k (1 - gamma))-th smallest per-node outlier fraction.

    The aggregate only depends on the best such majority of nodes; this is
    the contamination level entering the error-bound diagnostics.
    """
    fr = np.sort(np.asarray(fractions, dtype=float))
    k = fr.size
    if k == 0:
        raise ValueError("need at least one per-node fraction")
    if not 0.0 <= gamma < 1.0:
        raise ValueError("gamma must lie in [0, 1)")
    rank = fraction_floor(1.0 - gamma, k)
    if rank < 1:
        raise ValueError("gamma leaves no nodes")
    return float(fr[rank - 1])


def pca_error_bound(
    eigengap: float, effective_fraction: float, design_variance: float, dim: int, alpha: float
) -> float:
    """Diagnostic subspace-error bound for median-fused trimmed-covariance PCA.

    relaxation_factor(alpha) * (2 / eigengap) * lf / (1 - lf) * design_variance * log(dim)
    with lf the effective outlier fraction; infinite when the eigengap
    vanishes, zero when there is no contamination.
    """
    if not 0.0 <= effective_fraction < 1.0:
        raise ValueError("effective_fraction must lie in [0, 1)")
    if eigengap < 0:
        raise ValueError("eigengap must be nonnegative")
    if effective_fraction == 0.0:
        return 0.0
    if eigengap == 0.0:
        return math.inf
    return (
        relaxation_factor(alpha)
        * (2.0 / eigengap)
        * (effective_fraction / (1.0 - effective_fraction))
        * design_variance
        * math.log(dim)
    )


def regression_error_bound(
    theta_norm: float,
    noise_std: float,
    effective_fraction: float,
    dim: int,
    constant: float = 1.0,
) -> float:
    """Diagnostic parameter-error bound for median-fused trimmed regression.

    constant * sqrt(theta_norm^2 + noise_std^2) * lf/(1-lf) * sqrt(dim) * log(dim).
    The absolute constant is not pinned by the analysis, so only the shape
    in the contamination level is meaningful; callers supply ``constant``.
    """
    if theta_norm < 0 or noise_std < 0 or constant < 0:
        raise ValueError("inputs must be nonnegative")
    if not 0.0 <= effective_fraction < 1.0:
        raise ValueError("effective_fraction must lie in [0, 1)")
    if effective_fraction == 0.0:
        return 0.0
    return (
        constant
        * math.sqrt(theta_norm**2 + noise_std**2)
        * (effective_fraction / (1.0 - effective_fraction))
        * math.sqrt(dim)
        * math.log(dim)
    )


@dataclass(frozen=True)
class TheoryPoint:
    """A consistent (alpha, failure threshold, relaxation, divergence) tuple."""

    alpha: float
    beta_star: float
    c_alpha: float
    divergence_value: float

    def __post_init__(self) -> None:
        if self.divergence_value < 1.0 - 1e-9:
            raise ValueError("divergence at the threshold must be at least 1")
        expected = relaxation_factor(self.alpha)
        if abs(self.c_alpha - expected) > 1e-12 * max(1.0, expected):
            raise ValueError("c_alpha is inconsistent with alpha")


def tolerance_table(
    failure_probs: tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5),
) -> list[TheoryPoint]:
    """Exemplar (failure probability, alpha, relaxation) rows.

    For each per-node failure probability, solve for the alpha whose
    divergence against it equals 1 and evaluate the relaxation factor.
    """
    points = []
    for beta in failure_probs:
        alpha = alpha_for_failure(beta)
        points.append(
            TheoryPoint(
                alpha=alpha,
                beta_star=beta,
                c_alpha=relaxation_factor(alpha),
                divergence_value=divergence(alpha, beta),
            )
        )
    return points
