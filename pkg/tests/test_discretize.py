import numpy as np
import pytest

from irkit.datasets import load_dataset
from irkit.discretize import (Anchor, Discretization, binarize, count_encodings,
                              discretize_instance, discretize_rows,
                              quantile_discretize, quantile_edges)
from irkit.errors import DomainError, ParameterError, ShapeError
from irkit.rng import RngStream
from irkit.schema import FeatureSchema

from conftest import numeric_dataset


def quantile_oracle(values, p):
    """Independent order-statistic interpolation at h = (n-1)p."""
    s = sorted(values)
    h = (len(s) - 1) * p
    lo = int(np.floor(h))
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (h - lo) * (s[hi] - s[lo])


class TestQuantileDiscretize:
    def test_one_to_eight_quartiles(self):
        ds = numeric_dataset(np.arange(1.0, 9.0), np.zeros(8))
        d = quantile_discretize(ds, 4)
        assert np.allclose(d.edges[0], [2.75, 4.5, 6.25])
        for edge, p in zip(d.edges[0], (0.25, 0.5, 0.75)):
            assert edge == pytest.approx(quantile_oracle(np.arange(1.0, 9.0), p))

    def test_constant_feature_collapses_to_single_bin(self):
        ds = numeric_dataset(np.full(10, 5.0), np.zeros(10))
        d = quantile_discretize(ds, 4)
        assert len(d.edges[0]) == 0
        assert d.bin_count(0) == 1

    def test_diabetes_edges_match_independent_oracle(self):
        ds = load_dataset("diabetes")
        d = quantile_discretize(ds, 4)
        for j in range(ds.arity):
            col = ds.column(j)
            raw = {quantile_oracle(col, p) for p in (0.25, 0.5, 0.75)}
            expected = sorted(v for v in raw if v < col.max())
            assert np.allclose(d.edges[j], expected)

    def test_q_below_two_rejected(self):
        ds = numeric_dataset(np.arange(4.0), np.zeros(4))
        with pytest.raises(ParameterError):
            quantile_discretize(ds, 1)

    def test_duplicate_edges_collapse(self):
        col = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 8.0, 9.0])
        edges = quantile_edges(col, 4)
        assert (np.diff(edges) > 0).all()


class TestBinMembership:
    """Bins are right-closed: (lo, hi]; a value on an edge belongs below."""

    @pytest.fixture
    def disc(self):
        schema = FeatureSchema.numeric(["x1", "x2"])
        return Discretization(schema, (np.array([0.5]), np.array([5.0, 7.0])))

    def test_interior_value(self, disc):
        assert discretize_instance((0.1, 6.5), disc)[1] == 1

    def test_value_on_edge_goes_to_lower_bin(self, disc):
        assert discretize_instance((0.1, 5.0), disc)[1] == 0
        assert discretize_instance((0.1, 7.0), disc)[1] == 1

    def test_value_below_edge(self, disc):
        assert discretize_instance((0.1, 4.999), disc)[1] == 0

    def test_value_above_all_edges(self, disc):
        assert discretize_instance((0.1, 7.0001), disc)[1] == 2

    def test_categorical_coordinates(self):
        schema = FeatureSchema.of(("c", "categorical", ("red", "green", "blue")))
        d = Discretization(schema, (None,))
        assert discretize_instance(("green",), d)[0] == 1
        with pytest.raises(DomainError):
            discretize_instance(("purple",), d)

    def test_rows_match_instances(self, disc):
        ds = numeric_dataset([[0.1, 4.0], [0.9, 5.0], [0.5, 9.0]], np.zeros(3),
                             names=["x1", "x2"])
        rows = discretize_rows(ds, disc)
        for i in range(3):
            assert np.array_equal(rows[i], discretize_instance(ds.rows[i], disc))


class TestBinarize:
    def test_anchor_encodes_all_ones(self):
        schema = FeatureSchema.numeric(["x1", "x2"])
        d = Discretization(schema, (np.array([1.0, 2.0, 3.0]), np.array([1.0, 2.0, 3.0])))
        anchor = Anchor.from_instance((1.5, 1.5), d)
        assert binarize(np.asarray(anchor.coords), anchor).tolist() == [1, 1]

    def test_same_bin_bit(self):
        # anchor x2 in the middle bin of (5, 7); an instance at 4 differs
        schema = FeatureSchema.numeric(["x2"])
        d = Discretization(schema, (np.array([5.0, 7.0]),))
        anchor = Anchor.from_instance((6.5,), d)
        assert binarize(discretize_instance((6.0,), d), anchor).tolist() == [1]
        assert binarize(discretize_instance((4.0,), d), anchor).tolist() == [0]

    def test_two_dimensional_enumeration(self):
        # 4 bins per axis, anchor in cell (1, 1): coords (3, 1) -> (0, 1)
        schema = FeatureSchema.numeric(["a", "b"])
        edges = np.array([1.0, 2.0, 3.0])
        d = Discretization(schema, (edges, edges))
        anchor = Anchor(instance=(1.5, 1.5), coords=(1, 1))
        assert binarize(np.array([3, 1]), anchor).tolist() == [0, 1]
        for ca in range(4):
            for cb in range(4):
                bits = binarize(np.array([ca, cb]), anchor)
                assert bits.tolist() == [int(ca == 1), int(cb == 1)]

    def test_arity_mismatch(self):
        anchor = Anchor(instance=(1.0,), coords=(0,))
        with pytest.raises(ShapeError):
            binarize(np.array([0, 1]), anchor)


class TestCountEncodings:
    def test_single_row(self):
        ds = numeric_dataset([[3.0]], [0.0])
        d = quantile_discretize(ds, 4)
        used, _ = count_encodings(ds, d)
        assert used == 1

    def test_theoretical_is_product_of_bin_counts(self):
        ds = numeric_dataset([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0], [4.0, 4.0]],
                             np.zeros(4))
        d = quantile_discretize(ds, 2)
        used, theoretical = count_encodings(ds, d)
        assert theoretical == d.bin_count(0) * d.bin_count(1)
        assert used <= min(theoretical, ds.n_rows)

    def test_binary_theoretical_is_power_of_two(self):
        ds = numeric_dataset([[1.0, 5.0], [2.0, 6.0], [3.0, 7.0], [4.0, 8.0]],
                             np.zeros(4))
        d = quantile_discretize(ds, 2)
        anchor = Anchor.from_instance((1.0, 5.0), d)
        used, theoretical = count_encodings(ds, d, anchor)
        assert theoretical == 4
        assert 1 <= used <= 4

    def test_diabetes_used_count_matches_appendix(self):
        ds = load_dataset("diabetes")
        used, _ = count_encodings(ds, quantile_discretize(ds, 4))
        assert abs(used - 428) <= 5

    def test_housing_used_count_matches_appendix(self):
        ds = load_dataset("housing")
        used, _ = count_encodings(ds, quantile_discretize(ds, 4))
        assert abs(used - 441) <= 5


class TestManyToOne:
    def test_distinct_coords_collide_iff_three_plus_bins(self):
        # 3 bins: two different off-anchor bins share the 0 bit
        schema = FeatureSchema.numeric(["x"])
        d3 = Discretization(schema, (np.array([1.0, 2.0]),))
        anchor = Anchor(instance=(0.5,), coords=(0,))
        b1 = binarize(np.array([1]), anchor)
        b2 = binarize(np.array([2]), anchor)
        assert np.array_equal(b1, b2)

        # 2 bins: the binary encoding distinguishes every coordinate
        d2 = Discretization(schema, (np.array([1.0]),))
        anchor2 = Anchor(instance=(0.5,), coords=(0,))
        codes = {tuple(binarize(np.array([c]), anchor2)) for c in range(d2.bin_count(0))}
        assert len(codes) == 2


def test_serialization_round_trip():
    schema = FeatureSchema.of(("x", "numerical"),
                              ("c", "categorical", ("a", "b")))
    d = Discretization(schema, (np.array([1.5, 2.5]), None))
    restored = Discretization.from_json(d.to_json(), schema)
    assert np.array_equal(restored.edges[0], d.edges[0])
    assert restored.edges[1] is None


def test_describe_bin_interval_format():
    schema = FeatureSchema.numeric(["x2"])
    d = Discretization(schema, (np.array([40.0, 80.0]),))
    assert d.describe_bin(0, 0) == "x2 <= 40"
    assert d.describe_bin(0, 1) == "40 < x2 <= 80"
    assert d.describe_bin(0, 2) == "80 < x2"


def test_edges_must_increase():
    schema = FeatureSchema.numeric(["x"])
    with pytest.raises(ParameterError):
        Discretization(schema, (np.array([2.0, 1.0]),))
