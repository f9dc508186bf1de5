import numpy as np
import pytest

from drlearn import (
    Aggregation,
    BreakdownFault,
    CommErrorFault,
    Estimate,
    FaultModel,
    LatencyFault,
    LrScenario,
    PcaScenario,
    Placement,
    coordinate_mean,
    comm_cost,
    distance,
    gen_lr,
    gen_pca,
    geometric_median,
    inject_faults,
    norm,
    partition,
    projection_from_basis,
    regression_error,
    robust_pca,
    run_distributed_pca,
    run_distributed_regression,
    select_late_nodes,
    serialized_size,
    trimmed_regression,
)


class TestPartition:
    def test_even_split(self):
        assert partition(10, 2).ranges == ((0, 5), (5, 10))

    def test_remainder_goes_to_leading_ranges(self):
        assert partition(10, 3).sizes == (4, 3, 3)

    def test_singletons(self):
        assert partition(7, 7).sizes == (1,) * 7

    def test_too_many_nodes_rejected(self):
        with pytest.raises(ValueError):
            partition(3, 4)


def small_pca_dataset(seed=0, lam=0.0, n=1200):
    return gen_pca(PcaScenario(p=10, d=2, n_total=n, outlier_fraction=lam, seed=seed), k=4)


def small_lr_dataset(seed=0, lam=0.0, n=1200):
    return gen_lr(LrScenario(p=8, n_total=n, outlier_fraction=lam, seed=seed), k=4)


class TestRunBasics:
    def test_single_node_equals_centralized(self):
        ds = small_pca_dataset()
        run = run_distributed_pca(ds, 1, 2, 0.0, seed=3)
        direct = projection_from_basis(robust_pca(ds.X, 2, 0.0))
        assert run.aggregate == direct

    def test_single_node_regression(self):
        ds = small_lr_dataset()
        run = run_distributed_regression(ds, 1, 0.0, seed=3)
        assert run.aggregate == trimmed_regression(ds.X, ds.y, 0.0).theta

    def test_identical_node_data_gives_node_estimate(self):
        # All nodes see the same columns: median of identical points.
        ds = small_pca_dataset()
        X_rep = np.tile(ds.X[:, :300], 4)
        from drlearn import Dataset

        ds_rep = Dataset(X=X_rep, y=None, outliers=np.tile(ds.outliers[:300], 4),
                         truth=ds.truth, truth_projection=ds.truth_projection)
        run = run_distributed_pca(ds_rep, 4, 2, 0.0, seed=0)
        single = projection_from_basis(robust_pca(ds.X[:, :300], 2, 0.0))
        assert distance(run.aggregate, single) <= 1e-9

    def test_default_trim_level_is_half(self):
        ds = small_pca_dataset()
        assert run_distributed_pca(ds, 2, 2, None, seed=0).aggregate == \
            run_distributed_pca(ds, 2, 2, 0.5, seed=0).aggregate

    def test_per_node_lambda_recorded(self):
        ds = small_pca_dataset(lam=0.25)
        run = run_distributed_pca(ds, 4, 2, 0.25, seed=0)
        assert run.per_node_lambda.shape == (4,)
        assert abs(run.per_node_lambda.mean() - 0.25) < 0.01

    def test_average_aggregation_matches_mean_of_faulted(self):
        ds = small_pca_dataset(lam=0.1)
        med = run_distributed_pca(ds, 4, 2, 0.1, Aggregation.GEOMETRIC_MEDIAN, seed=5)
        avg = run_distributed_pca(ds, 4, 2, 0.1, Aggregation.AVERAGE, seed=5)
        assert avg.node_estimates == med.node_estimates
        assert avg.aggregate == coordinate_mean(med.faulted_estimates)

    def test_wall_times_recorded(self):
        run = run_distributed_pca(small_pca_dataset(), 4, 2, 0.0, seed=0)
        assert run.wall_times.shape == (4,)
        assert np.all(run.wall_times >= 0)


class TestDeterminismAndScheduling:
    def test_serial_and_threaded_runs_identical(self, monkeypatch):
        ds = small_lr_dataset(lam=0.2)
        fm = FaultModel(comm_error=CommErrorFault(0.5, 0.5))
        monkeypatch.setenv("DRL_THREADS", "1")
        serial = run_distributed_regression(ds, 4, 0.2, faults=fm, seed=9)
        monkeypatch.setenv("DRL_THREADS", "4")
        threaded = run_distributed_regression(ds, 4, 0.2, faults=fm, seed=9)
        assert serial.aggregate == threaded.aggregate
        assert serial.faulted_estimates == threaded.faulted_estimates
        assert serial.flipped_nodes == threaded.flipped_nodes

    def test_same_seed_bitwise_repeatable(self):
        ds = small_pca_dataset(lam=0.1)
        fm = FaultModel(latency=LatencyFault(), comm_error=CommErrorFault())
        a = run_distributed_pca(ds, 4, 2, 0.1, faults=fm, seed=21)
        b = run_distributed_pca(ds, 4, 2, 0.1, faults=fm, seed=21)
        assert a.aggregate == b.aggregate
        assert a.late_nodes == b.late_nodes

    def test_different_seed_changes_fault_selection(self):
        fm = LatencyFault(late_fraction=0.5)
        picks = {select_late_nodes(10, fm, s) for s in range(6)}
        assert len(picks) > 1


class TestFaultInjection:
    def estimates(self, k=10, n=12):
        rng = np.random.default_rng(0)
        return [Estimate.regression_param(rng.normal(size=n)) for _ in range(k)]

    def test_empty_fault_model_is_identity(self):
        ests = self.estimates()
        assert inject_faults(ests, FaultModel.none(), 0) == ests
        assert inject_faults(ests, None, 0) == ests

    def test_comm_error_corrupts_expected_node_count(self):
        ests = self.estimates(k=10)
        fm = FaultModel(comm_error=CommErrorFault(node_fraction=0.1,
                                                  element_flip_fraction=0.5))
        out = inject_faults(ests, fm, 3)
        changed = [i for i, (a, b) in enumerate(zip(ests, out)) if a != b]
        assert len(changed) == 1  # ceil(0.1 * 10)

    def test_flip_count_and_positions(self):
        ests = self.estimates(k=1, n=10)
        fm = FaultModel(comm_error=CommErrorFault(node_fraction=1.0,
                                                  element_flip_fraction=0.3))
        out = inject_faults(ests, fm, 1)
        ratio = out[0].values / ests[0].values
        assert (ratio == -1).sum() == 3  # floor(0.3 * 10)
        assert (ratio == 1).sum() == 7

    def test_full_negation_leaves_majority_median_unchanged(self):
        clean = Estimate.regression_param(np.ones(6))
        ests = [clean] * 9 + [clean]
        fm = FaultModel(comm_error=CommErrorFault(node_fraction=0.1,
                                                  element_flip_fraction=1.0))
        out = inject_faults(ests, fm, 7)
        negated = [i for i, e in enumerate(out) if np.all(e.values == -1)]
        assert len(negated) == 1
        med = geometric_median(out).median
        assert distance(med, clean) <= 1e-6

    def test_breakdown_replaces_with_given_magnitude(self):
        ests = self.estimates(k=5)
        fm = FaultModel(breakdown=BreakdownFault(node_indices=frozenset({2}),
                                                 replacement_magnitude=1e6))
        out = inject_faults(ests, fm, 0)
        assert norm(out[2]) == pytest.approx(1e6)
        assert out[0] == ests[0]

    def test_breakdown_index_range_checked(self):
        ests = self.estimates(k=3)
        fm = FaultModel(breakdown=BreakdownFault(node_indices=frozenset({5})))
        with pytest.raises(ValueError):
            inject_faults(ests, fm, 0)

    def test_latency_prefix_shrinks_late_node_data(self):
        ds = small_pca_dataset(n=2000)
        fm = FaultModel(latency=LatencyFault(late_fraction=0.5, data_fraction=0.1))
        run = run_distributed_pca(ds, 4, 2, 0.0, faults=fm, seed=11)
        assert len(run.late_nodes) == 2  # ceil(0.5 * 4)
        # Late nodes saw 50 of 500 columns; their estimates are noisier but valid.
        assert all(e.rows == 10 for e in run.node_estimates)

    def test_node_failure_maps_to_breakdown(self):
        # One node gets too few samples to fit: d >= per-node columns is
        # impossible here, so force failure via a poisoned dataset slice.
        ds = small_lr_dataset()
        bad_y = ds.y.copy()
        bad_y[:300] = np.nan  # node 0's slice produces non-finite estimates
        from drlearn import Dataset

        poisoned = Dataset(X=ds.X, y=bad_y, outliers=ds.outliers, truth=ds.truth)
        run = run_distributed_regression(poisoned, 4, 0.0, seed=2)
        assert 0 in run.broken_nodes
        assert norm(run.faulted_estimates[0]) == pytest.approx(1e6)
        # Remaining nodes keep the aggregate sane.
        assert distance(run.aggregate, ds.truth) / norm(ds.truth) < 0.5


class TestBreakdownRegime:
    def test_worst_packing_below_half_breakdown_stays_bounded(self):
        # The single-node regression learner survives per-node fractions up
        # to ~0.8 at this scale.  Packing a total fraction just below half
        # of that pushes the largest possible minority of nodes past it
        # (4 of 10 at fraction 0.9); the median still tracks the healthy
        # majority while the average is dragged off.
        k, n, p = 10, 50_000, 50
        fractions = (0.9,) * 4 + (0.0,) * 6
        lam = 4 * 0.9 / k  # 0.36 < 0.8 / 2
        errs_drl, errs_avg = [], []
        for rep in range(3):
            ds = gen_lr(LrScenario(p=p, n_total=n, outlier_fraction=lam,
                                   placement=Placement.per_node(fractions),
                                   seed=900 + rep), k)
            run = run_distributed_regression(ds, k, lam, seed=900 + rep)
            errs_drl.append(regression_error(run.aggregate, ds.truth))
            errs_avg.append(
                regression_error(coordinate_mean(run.faulted_estimates), ds.truth)
            )
        assert np.mean(errs_drl) < 1.0
        assert np.mean(errs_avg) > np.mean(errs_drl)


class TestAverageFragility:
    def test_average_diverges_median_stays(self):
        clean = Estimate.regression_param(np.ones(4))
        for magnitude in (1e3, 1e6, 1e9):
            bad = Estimate.regression_param(magnitude * np.ones(4))
            points = [clean] * 9 + [bad]
            avg = coordinate_mean(points)
            med = geometric_median(points).median
            assert norm(avg) > magnitude / 10 * 2 * 0.9
            assert distance(med, clean) <= 1e-6 * magnitude


class TestCommCost:
    def test_total_is_node_count_times_row_size(self):
        ds = small_pca_dataset()
        run = run_distributed_pca(ds, 4, 2, 0.0, seed=0)
        s = serialized_size(run.faulted_estimates[0])
        assert comm_cost(run) == 4 * s
        assert run.comm_bytes == comm_cost(run)

    def test_single_node_cost_is_one_estimate(self):
        ds = small_pca_dataset()
        run = run_distributed_pca(ds, 1, 2, 0.0, seed=0)
        assert comm_cost(run) == serialized_size(run.faulted_estimates[0])

    def test_doubling_nodes_doubles_bytes(self):
        ds = small_pca_dataset(n=1600)
        r2 = run_distributed_pca(ds, 2, 2, 0.0, seed=0)
        r4 = run_distributed_pca(ds, 4, 2, 0.0, seed=0)
        assert comm_cost(r4) == 2 * comm_cost(r2)
