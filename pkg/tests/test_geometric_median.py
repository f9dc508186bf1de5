import numpy as np
import pytest

from drlearn import (
    Estimate,
    MedianConfig,
    MedianResult,
    coordinate_mean,
    distance,
    geometric_median,
    median_objective,
    norm,
)
from oracles import geometric_median_oracle, objective


def vec(values):
    return Estimate.regression_param(np.asarray(values, dtype=float))


def run(points_array, config=None) -> MedianResult:
    return geometric_median([vec(p) for p in points_array], config)


class TestObjective:
    def test_zero_at_single_atom(self):
        p = vec([1.0, 2.0])
        assert median_objective([p], p) == 0.0

    def test_one_dimensional(self):
        pts = [vec([0.0]), vec([2.0])]
        assert median_objective(pts, vec([1.0])) == 2.0

    def test_right_angle_configuration(self):
        pts = [vec([0, 0]), vec([1, 0]), vec([0, 1])]
        assert median_objective(pts, vec([0, 0])) == 2.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            median_objective([], vec([0.0]))


class TestSmallCases:
    def test_single_point(self):
        res = run([[2.0, 3.0]])
        assert res.median == vec([2.0, 3.0])
        assert res.objective == 0.0
        assert res.converged

    def test_two_points_midpoint(self):
        res = run([[0.0, 0.0], [2.0, 0.0]])
        assert np.allclose(res.median.values, [1.0, 0.0])
        assert res.objective == pytest.approx(2.0)

    def test_symmetric_cross_gives_origin(self):
        res = run([[-1, 0], [1, 0], [0, 1], [0, -1]])
        assert np.linalg.norm(res.median.values) < 1e-8

    def test_collinear_odd_count_gives_middle_atom(self):
        res = run([[0.0, 0.0], [4.0, 0.0], [1.0, 0.0]])
        assert np.allclose(res.median.values, [1.0, 0.0], atol=1e-8)

    def test_all_points_identical(self):
        res = run([[5.0, 5.0]] * 4)
        assert np.allclose(res.median.values, [5.0, 5.0])
        assert res.converged

    def test_objective_is_recomputed_total_distance(self):
        pts = [vec(v) for v in ([0.0, 0.0], [3.0, 1.0], [1.0, 4.0], [2.0, 2.0])]
        res = geometric_median(pts)
        assert res.objective == pytest.approx(median_objective(pts, res.median), rel=1e-9)


class TestOracleAgreement:
    def test_matches_bruteforce_on_random_instances(self):
        rng = np.random.default_rng(42)
        for _ in range(25):
            k = int(rng.integers(3, 8))
            dim = int(rng.integers(2, 4))
            P = rng.normal(size=(k, dim)) * 3.0
            res = run(P)
            _, oracle_obj = geometric_median_oracle(P)
            assert res.converged
            assert res.objective <= oracle_obj + 1e-6
            assert abs(res.objective - oracle_obj) <= 1e-6


class TestProperties:
    def test_permutation_invariance(self):
        rng = np.random.default_rng(1)
        P = rng.normal(size=(7, 3))
        res1 = run(P)
        res2 = run(P[rng.permutation(7)])
        assert abs(res1.objective - res2.objective) <= 1e-9 * (1 + res1.objective)

    def test_translation_equivariance(self):
        rng = np.random.default_rng(2)
        P = rng.normal(size=(6, 2))
        t = np.array([10.0, -3.0])
        res = run(P)
        res_t = run(P + t)
        assert np.allclose(res_t.median.values, res.median.values + t, atol=1e-7)

    def test_scale_equivariance(self):
        rng = np.random.default_rng(3)
        P = rng.normal(size=(5, 4))
        res = run(P)
        res_s = run(2.5 * P)
        assert np.allclose(res_s.median.values, 2.5 * res.median.values, atol=1e-7)

    def test_objective_no_worse_than_mean(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            pts = [vec(v) for v in rng.normal(size=(int(rng.integers(3, 9)), 3))]
            res = geometric_median(pts)
            assert res.objective <= median_objective(pts, coordinate_mean(pts)) + 1e-12

    def test_objective_no_worse_than_best_atom(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            pts = [vec(v) for v in rng.normal(size=(5, 2))]
            res = geometric_median(pts)
            best_atom = min(median_objective(pts, p) for p in pts)
            assert res.objective <= best_atom + 1e-9 * (1 + best_atom)


class TestRobustnessBound:
    def test_bounded_pull_from_far_atoms(self):
        # Strictly more than (1 - gamma) k atoms within r of a center keeps
        # the median within c(gamma) * r, where c = (1-g) sqrt(1/(1-2g)).
        rng = np.random.default_rng(6)
        trials = 0
        for gamma in (0.1, 0.2, 0.3, 0.45):
            c_gamma = (1 - gamma) * np.sqrt(1.0 / (1 - 2 * gamma))
            for k in (5, 11, 25):
                for _ in range(5):
                    dim = int(rng.integers(2, 6))
                    center = rng.normal(size=dim) * 5
                    r = float(10.0 ** rng.uniform(-2, 2))
                    n_good = int(np.floor((1 - gamma) * k)) + 1
                    n_bad = k - n_good
                    good = center + _ball(rng, n_good, dim) * r
                    dirs = _sphere(rng, max(n_bad, 1), dim)
                    dist = 10.0 ** rng.uniform(0, 6, size=(max(n_bad, 1), 1))
                    bad = center + dirs * dist * r
                    P = np.vstack([good, bad[:n_bad]])
                    res = run(P)
                    assert distance(res.median, vec(center)) <= c_gamma * r
                    trials += 1
        assert trials == 60


def _ball(rng, n, dim):
    v = rng.normal(size=(n, dim))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.random(size=(n, 1)) ** (1.0 / dim)


def _sphere(rng, n, dim):
    v = rng.normal(size=(n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


class TestConfig:
    def test_invalid_config_rejected(self):
        with pytest.raises(ValueError):
            MedianConfig(tolerance=0.0)
        with pytest.raises(ValueError):
            MedianConfig(max_iterations=0)
        with pytest.raises(ValueError):
            MedianConfig(coincidence_epsilon=-1.0)

    def test_non_convergence_reported_not_raised(self):
        rng = np.random.default_rng(8)
        P = rng.normal(size=(9, 3))
        res = run(P, MedianConfig(tolerance=1e-16, max_iterations=2))
        assert not res.converged
        assert res.iterations == 2

    def test_shape_mismatch_rejected(self):
        from drlearn import ShapeMismatchError

        with pytest.raises(ShapeMismatchError):
            geometric_median([vec([1.0]), vec([1.0, 2.0])])
