import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drlearn import (
    Estimate,
    EstimateKind,
    ShapeMismatchError,
    distance,
    estimate_from_csv_row,
    estimate_to_csv_row,
    norm,
    serialized_size,
    zeros_like,
)

finite_floats = st.floats(min_value=-1e9, max_value=1e9, allow_nan=False)


def vec(*values):
    return Estimate.regression_param(np.array(values, dtype=float))


class TestInvariants:
    def test_regression_param_is_single_column(self):
        with pytest.raises(ValueError):
            Estimate(EstimateKind.REGRESSION_PARAM, 2, 2, np.zeros(4))

    def test_projection_must_be_square(self):
        with pytest.raises(ValueError):
            Estimate(EstimateKind.PROJECTION_MATRIX, 2, 3, np.zeros(6))

    def test_values_length_must_match_shape(self):
        with pytest.raises(ValueError):
            Estimate(EstimateKind.EIGEN_BASIS, 2, 2, np.zeros(3))

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            vec(1.0, np.nan)
        with pytest.raises(ValueError):
            vec(1.0, np.inf)

    def test_values_are_read_only(self):
        e = vec(1.0, 2.0)
        with pytest.raises(ValueError):
            e.values[0] = 9.0


class TestDistance:
    def test_identity(self):
        e = vec(1.0, -2.0, 3.5)
        assert distance(e, e) == 0.0

    def test_three_four_five(self):
        assert distance(vec(3.0, 0.0), vec(0.0, 4.0)) == 5.0

    def test_all_ones_difference_on_2x2(self):
        a = Estimate.projection_matrix(np.zeros((2, 2)))
        b = Estimate.projection_matrix(np.ones((2, 2)))
        assert distance(a, b) == 2.0

    def test_kind_mismatch_rejected_even_with_equal_shapes(self):
        a = Estimate.eigen_basis(np.eye(2))
        b = Estimate.projection_matrix(np.eye(2))
        with pytest.raises(ShapeMismatchError):
            distance(a, b)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ShapeMismatchError):
            distance(vec(1.0), vec(1.0, 2.0))

    @given(st.lists(finite_floats, min_size=1, max_size=8).flatmap(
        lambda xs: st.tuples(
            st.just(xs),
            st.lists(finite_floats, min_size=len(xs), max_size=len(xs)),
            st.lists(finite_floats, min_size=len(xs), max_size=len(xs)),
        )
    ))
    @settings(max_examples=100, deadline=None)
    def test_symmetry_and_triangle_inequality(self, xyz):
        xs, ys, zs = (vec(*v) for v in xyz)
        assert distance(xs, ys) == distance(ys, xs)
        slack = 1e-9 * (1.0 + distance(xs, ys) + distance(ys, zs))
        assert distance(xs, zs) <= distance(xs, ys) + distance(ys, zs) + slack


class TestNorm:
    def test_zero_vector(self):
        assert norm(vec(0.0, 0.0)) == 0.0

    def test_ones(self):
        assert norm(vec(1.0, 1.0, 1.0, 1.0)) == 2.0

    def test_identity_projection(self):
        e = Estimate.projection_matrix(np.eye(3))
        assert norm(e) == pytest.approx(np.sqrt(3.0), abs=1e-15)

    def test_norm_equals_distance_to_zero(self):
        e = vec(1.5, -2.5, 0.25)
        assert norm(e) == distance(e, zeros_like(e))

    @given(st.lists(finite_floats, min_size=1, max_size=6),
           st.floats(min_value=-1e3, max_value=1e3, allow_nan=False))
    @settings(max_examples=100, deadline=None)
    def test_absolute_homogeneity(self, values, c):
        e = vec(*values)
        scaled = e.with_values(c * e.values)
        assert norm(scaled) == pytest.approx(abs(c) * norm(e), rel=1e-12, abs=1e-12)


class TestCsvRoundTrip:
    def test_round_trip_exact(self):
        rng = np.random.default_rng(7)
        for kind_ctor, shape in [
            (Estimate.regression_param, (5,)),
            (Estimate.eigen_basis, (4, 2)),
            (Estimate.projection_matrix, (3, 3)),
        ]:
            e = kind_ctor(rng.normal(size=shape) * 10.0 ** rng.integers(-8, 8))
            back = estimate_from_csv_row(estimate_to_csv_row(e))
            assert back == e

    def test_signed_zero_and_extremes(self):
        e = vec(0.0, -0.0, 1e-300, -1e300)
        assert estimate_from_csv_row(estimate_to_csv_row(e)) == e

    def test_header_fields(self):
        row = estimate_to_csv_row(Estimate.eigen_basis(np.ones((2, 3))))
        parts = row.split(",")
        assert parts[:3] == ["EigenBasis", "2", "3"]
        assert len(parts) == 9

    def test_serialized_size_depends_only_on_shape(self):
        rng = np.random.default_rng(3)
        sizes = {
            serialized_size(Estimate.projection_matrix(rng.normal(size=(4, 4))))
            for _ in range(5)
        }
        assert len(sizes) == 1

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            estimate_from_csv_row("Bogus,1,1,+1.00000000000000000e+00")
