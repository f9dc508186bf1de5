#!/usr/bin/env python3
"""How the geometric median shrugs off corrupted estimates.

Ten workers report an estimate of the same 2-d parameter; we corrupt a
growing number of them with wildly wrong values and compare fusing by
mean against fusing by geometric median.
"""

import numpy as np

from drlearn import Estimate, coordinate_mean, distance, geometric_median

rng = np.random.default_rng(7)
truth = np.array([2.0, -1.0])
k = 10

print(f"truth = {truth}, {k} workers, honest workers report truth + N(0, 0.05)\n")
print("corrupted  mean-fusion error   median-fusion error")
for bad in range(0, 6):
    reports = truth + 0.05 * rng.normal(size=(k, 2))
    reports[:bad] = rng.normal(size=(bad, 2)) * 1e4  # arbitrarily wrong
    points = [Estimate.regression_param(r) for r in reports]

    mean_est = coordinate_mean(points)
    med = geometric_median(points)
    t = Estimate.regression_param(truth)
    print(f"   {bad:2d}       {distance(mean_est, t):12.4g}      "
          f"{distance(med.median, t):12.4g}   "
          f"(median converged in {med.iterations} iterations)")

print("\nThe mean is dragged off by a single bad report; the median holds")
print("until the corrupted workers become a majority.")
