#!/usr/bin/env python3
"""Node faults: stragglers, sign-flip corruption, and total breakdown.

Faults hit individual nodes, not individual samples.  Median fusion only
needs a majority of healthy nodes, while averaging is contaminated by any
of them.
"""

import numpy as np

from drlearn import (
    BreakdownFault,
    CommErrorFault,
    FaultModel,
    LatencyFault,
    PcaScenario,
    coordinate_mean,
    gen_pca,
    projection_error,
    run_distributed_pca,
)

P, D, N, K = 30, 3, 20_000, 10
ds = gen_pca(PcaScenario(p=P, d=D, n_total=N, outlier_fraction=0.2, seed=11), K)

faults = {
    "no faults": None,
    "latency (half the nodes see 10% of their data)":
        FaultModel(latency=LatencyFault(late_fraction=0.5, data_fraction=0.1)),
    "comm errors (10% of nodes, 30% of elements sign-flipped)":
        FaultModel(comm_error=CommErrorFault()),
    "breakdown (2 nodes reply with garbage of norm 1e6)":
        FaultModel(breakdown=BreakdownFault(node_indices=frozenset({1, 5}))),
}

print(f"robust PCA, p={P}, d={D}, n={N}, k={K}, outlier fraction 0.2\n")
for name, fm in faults.items():
    run = run_distributed_pca(ds, K, D, 0.2, faults=fm, seed=11)
    e_med = projection_error(run.aggregate, ds.truth_projection)
    e_avg = projection_error(coordinate_mean(run.faulted_estimates), ds.truth_projection)
    marks = []
    if run.late_nodes:
        marks.append(f"late={sorted(run.late_nodes)}")
    if run.flipped_nodes:
        marks.append(f"flipped={sorted(run.flipped_nodes)}")
    if run.broken_nodes:
        marks.append(f"broken={sorted(run.broken_nodes)}")
    print(f"{name}")
    print(f"    median {e_med:.3f}   average {e_avg:.3f}   {' '.join(marks)}")
