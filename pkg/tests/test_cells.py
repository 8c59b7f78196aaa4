import numpy as np
import pytest

from irkit.cells import (CellStats, cell_stats_from_groups, fit_cell_stats,
                         gini_impurity, grouped_weighted_quality, mse_uniformity,
                         weighted_quality)
from irkit.dataset import LABEL, NUMERIC, PROBA, TabularDataset
from irkit.discretize import Discretization, quantile_discretize
from irkit.errors import ParameterError, SchemaError
from irkit.schema import FeatureSchema

from conftest import numeric_dataset


# ---------------------------------------------------------------------------
# independent brute-force oracles (full enumeration over cell members)

def gini_oracle(labels) -> float:
    total = 0.0
    for c in set(labels):
        p = sum(1 for l in labels if l == c) / len(labels)
        total += p * (1 - p)
    return total


def mse_oracle(values) -> float:
    mean = sum(values) / len(values)
    return sum((v - mean) ** 2 for v in values) / len(values)


def weighted_oracle(cells) -> float:
    # cells: list of member-score pairs (size, score)
    total = sum(n for n, _ in cells)
    return sum(n * s for n, s in cells) / total


# ---------------------------------------------------------------------------

def entry_for_labels(labels):
    ds = numeric_dataset(np.arange(float(len(labels))), labels, kind=LABEL)
    stats = cell_stats_from_groups({"cell": np.arange(len(labels))}, ds)
    return stats.cells["cell"]


def entry_for_values(values):
    ds = numeric_dataset(np.arange(float(len(values))), values)
    stats = cell_stats_from_groups({"cell": np.arange(len(values))}, ds)
    return stats.cells["cell"]


class TestFitCellStats:
    def test_four_points_two_cells(self):
        ds = numeric_dataset([1.0, 2.0, 10.0, 11.0], ["a", "a", "b", "b"], kind=LABEL)
        d = Discretization(ds.schema, (np.array([5.0]),))
        stats = fit_cell_stats(ds, d)
        assert len(stats) == 2
        assert sorted(e.count for e in stats) == [2, 2]
        assert stats.n_total == 4

    def test_label_histogram_proportions(self):
        entry = entry_for_labels(["a", "a", "b", "b"])
        assert entry.label_counts == {"a": 2, "b": 2}
        p = np.asarray(list(entry.label_counts.values())) / entry.count
        assert np.allclose(p, [0.5, 0.5])

    def test_gaussian_fit_population_convention(self):
        ds = numeric_dataset([4.0, 6.0], [0.0, 0.0])
        entry = cell_stats_from_groups({"c": [0, 1]}, ds).cells["c"]
        mean, std = entry.feature_stats[0]
        assert mean == pytest.approx(5.0)
        assert std == pytest.approx(1.0)  # population std, divide by n

    def test_degenerate_cell_std_floor(self):
        ds = numeric_dataset([3.0, 3.0], [0.0, 0.0])
        entry = cell_stats_from_groups({"c": [0, 1]}, ds).cells["c"]
        _, std = entry.feature_stats[0]
        assert std == 1e-12

    def test_only_nonempty_cells_stored(self):
        ds = numeric_dataset([1.0, 2.0], [0.0, 0.0])
        d = Discretization(ds.schema, (np.array([1.5, 5.0]),))  # top bin empty
        stats = fit_cell_stats(ds, d)
        assert all(e.count > 0 for e in stats)
        assert sum(e.count for e in stats) == ds.n_rows

    def test_empty_bin_borrows_global_gaussian(self):
        ds = numeric_dataset([1.0, 2.0, 3.0, 4.0], np.zeros(4))
        d = Discretization(ds.schema, (np.array([2.5, 100.0]),))
        stats = fit_cell_stats(ds, d)
        col = ds.column(0)
        expected = (col.mean(), np.sqrt(np.mean((col - col.mean()) ** 2)))
        assert stats.bin_gaussian(0, 2) == pytest.approx(expected)  # empty bin
        # a singleton bin also falls back to the global fit
        d1 = Discretization(ds.schema, (np.array([1.5]),))
        stats1 = fit_cell_stats(ds, d1)
        assert stats1.bin_gaussian(0, 0) == pytest.approx(expected)


class TestGini:
    def test_pure_cell_is_zero(self):
        assert gini_impurity(entry_for_labels(["a", "a", "a"])) == 0.0

    def test_half_half(self):
        assert gini_impurity(entry_for_labels(["a", "a", "b", "b"])) == pytest.approx(0.5)

    def test_three_one(self):
        assert gini_impurity(entry_for_labels(["a", "a", "a", "b"])) == pytest.approx(0.375)

    def test_needs_labels(self):
        with pytest.raises(SchemaError):
            gini_impurity(entry_for_values([1.0, 2.0]))


class TestMse:
    def test_constant_target(self):
        assert mse_uniformity(entry_for_values([3.0, 3.0, 3.0])) == 0.0

    def test_zero_one(self):
        assert mse_uniformity(entry_for_values([0.0, 1.0])) == pytest.approx(0.25)

    def test_one_two_three(self):
        assert mse_uniformity(entry_for_values([1.0, 2.0, 3.0])) == pytest.approx(2 / 3)

    def test_probabilistic_sums_per_class(self):
        schema = FeatureSchema.numeric(["x"])
        probs = np.array([[0.2, 0.8], [0.4, 0.6]])
        ds = TabularDataset(schema, np.zeros((2, 1)), PROBA, probabilities=probs)
        stats = cell_stats_from_groups({"c": np.arange(2)}, ds)
        expected = mse_oracle([0.2, 0.4]) + mse_oracle([0.8, 0.6])
        assert mse_uniformity(stats.cells["c"]) == pytest.approx(expected, abs=1e-12)

    def test_needs_numeric_target(self):
        with pytest.raises(SchemaError):
            mse_uniformity(entry_for_labels(["a", "b"]))


class TestWeightedQuality:
    def test_single_cell_equals_its_score(self):
        ds = numeric_dataset([1.0, 2.0], ["a", "b"], kind=LABEL)
        stats = cell_stats_from_groups({"only": np.arange(2)}, ds)
        assert weighted_quality(stats, "gini") == pytest.approx(0.5)

    def test_weighted_average(self):
        # sizes (1, 3) with scores (0, 0.5) -> 0.375
        ds = numeric_dataset([0.0, 1.0, 2.0, 3.0], ["a", "b", "b", "c"], kind=LABEL)
        stats = cell_stats_from_groups({"pure": [0], "mixed": [1, 2, 3]}, ds)
        assert gini_impurity(stats.cells["pure"]) == 0.0
        assert gini_impurity(stats.cells["mixed"]) == pytest.approx(4 / 9)
        expected = weighted_oracle([(1, 0.0), (3, 4 / 9)])
        assert weighted_quality(stats, "gini") == pytest.approx(expected)

    def test_all_pure_cells_zero(self):
        ds = numeric_dataset([0.0, 1.0, 2.0], ["a", "a", "b"], kind=LABEL)
        stats = cell_stats_from_groups({"l": [0, 1], "r": [2]}, ds)
        assert weighted_quality(stats, "gini") == 0.0

    def test_empty_error(self):
        with pytest.raises(ParameterError):
            weighted_quality(CellStats({}, 0, LABEL, ()), "gini")

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        ds = numeric_dataset(rng.normal(size=40),
                             [f"c{v}" for v in rng.integers(0, 3, 40)], kind=LABEL)
        groups = {k: list(range(10 * k, 10 * (k + 1))) for k in range(4)}
        q1 = weighted_quality(cell_stats_from_groups(groups, ds), "gini")
        relabeled = {f"renamed_{9 - k}": idx for k, idx in groups.items()}
        q2 = weighted_quality(cell_stats_from_groups(relabeled, ds), "gini")
        assert q1 == pytest.approx(q2, abs=1e-15)


class TestAgainstBruteForce:
    """Eq-implementations vs full enumeration on 100 random small datasets."""

    def test_gini_and_weighted_oracle_agreement(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            n = int(rng.integers(3, 25))
            labels = [f"c{v}" for v in rng.integers(0, int(rng.integers(2, 5)), n)]
            ds = numeric_dataset(rng.normal(size=n), labels, kind=LABEL)
            cuts = np.sort(rng.choice(np.arange(1, n), size=min(3, n - 1), replace=False))
            pieces = np.split(np.arange(n), cuts)
            groups = {i: p for i, p in enumerate(pieces) if len(p)}
            stats = cell_stats_from_groups(groups, ds)
            for key, idx in groups.items():
                expected = gini_oracle([labels[i] for i in idx])
                assert abs(gini_impurity(stats.cells[key]) - expected) < 1e-12
            expected_q = weighted_oracle(
                [(len(idx), gini_oracle([labels[i] for i in idx]))
                 for idx in groups.values()])
            assert abs(weighted_quality(stats, "gini") - expected_q) < 1e-12

    def test_mse_and_weighted_oracle_agreement(self):
        rng = np.random.default_rng(43)
        for _ in range(100):
            n = int(rng.integers(3, 25))
            values = rng.normal(size=n) * 10
            ds = numeric_dataset(rng.normal(size=n), values)
            cuts = np.sort(rng.choice(np.arange(1, n), size=min(2, n - 1), replace=False))
            pieces = np.split(np.arange(n), cuts)
            groups = {i: p for i, p in enumerate(pieces) if len(p)}
            stats = cell_stats_from_groups(groups, ds)
            for key, idx in groups.items():
                expected = mse_oracle([values[i] for i in idx])
                assert abs(mse_uniformity(stats.cells[key]) - expected) < 1e-12
            expected_q = weighted_oracle(
                [(len(idx), mse_oracle([values[i] for i in idx]))
                 for idx in groups.values()])
            assert abs(weighted_quality(stats, "mse") - expected_q) < 1e-12


class TestGroupedFastPath:
    """The vectorized benchmark path must match the CellStats path."""

    @pytest.mark.parametrize("metric", ["gini", "mse"])
    def test_matches_cellstats_path(self, metric):
        rng = np.random.default_rng(7)
        n = 200
        if metric == "gini":
            raw = rng.integers(0, 4, n)
            ds = numeric_dataset(rng.normal(size=n), [f"c{v}" for v in raw], kind=LABEL)
            target = ds.label_codes()
            n_classes = 4
        else:
            ds = numeric_dataset(rng.normal(size=n), rng.normal(size=n) * 100 + 57)
            target = ds.values
            n_classes = 0
        codes = rng.integers(0, 12, n)
        groups = {}
        for i, c in enumerate(codes):
            groups.setdefault(int(c), []).append(i)
        slow = weighted_quality(cell_stats_from_groups(groups, ds), metric)
        fast = grouped_weighted_quality(codes, 12, target, metric, n_classes)
        assert fast == pytest.approx(slow, abs=1e-9)
