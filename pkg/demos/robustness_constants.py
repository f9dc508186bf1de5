#!/usr/bin/env python3
"""The constants behind median fusion, and breakdown-point arithmetic.

For a per-node failure probability beta, the divergence condition yields
the confidence level alpha at which median fusion concentrates, and the
relaxation factor tells how much looser the fused error bound is compared
with a single healthy node.  Small failure probabilities cost almost
nothing: the factor approaches 1.
"""

from drlearn import (
    breakdown_bounds,
    corruption_exponent,
    success_probability,
    tolerance_table,
)

print("failure prob     alpha    relaxation factor")
for point in tolerance_table():
    print(f"  {point.beta_star:8.0e}     {point.alpha:6.3f}       {point.c_alpha:6.3f}")

print("\naggregate guarantee with k nodes, 10% of them corrupted (beta* = 1e-3):")
point = [p for p in tolerance_table() if p.beta_star == 1e-3][0]
kappa = corruption_exponent(point.alpha, 0.1, point.beta_star)
for k in (10, 20, 50, 100):
    print(f"  k = {k:3d}: success probability {success_probability(k, 0.1, kappa):.6f}")

print("\nbreakdown points for a base learner that tolerates up to 50% outliers:")
b = breakdown_bounds(0.5, epsilon=0.01)
print(f"  median fusion, any outlier layout:   >= {b.drl_lower}")
print(f"  averaging, adversarial layout, k=20: {b.avg_worst(20)}")
print(f"  median fusion, whole nodes sacrificed: up to {b.favorable:.3f}")
