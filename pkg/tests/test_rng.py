import numpy as np
import pytest

from irkit.rng import RngStream


def test_same_seed_and_path_replays_identically():
    a = RngStream(123).child("images", "7")
    b = RngStream(123).child("images", "7")
    assert np.array_equal(a.uniform(size=100), b.uniform(size=100))
    assert np.array_equal(a.integers(0, 1000, 50), b.integers(0, 1000, 50))


def test_distinct_paths_differ():
    a = RngStream(1).child("a")
    b = RngStream(1).child("b")
    assert not np.array_equal(a.uniform(size=32), b.uniform(size=32))


def test_distinct_seeds_differ():
    assert not np.array_equal(RngStream(1).uniform(size=32),
                              RngStream(2).uniform(size=32))


def test_child_is_independent_of_parent_consumption():
    parent = RngStream(9, ("root",))
    _ = parent.uniform(size=10)
    after = parent.child("sub").uniform(size=10)
    fresh = RngStream(9, ("root",)).child("sub").uniform(size=10)
    assert np.array_equal(after, fresh)


@pytest.mark.parametrize("path", [(), ("x",), ("a", "b", "17")])
def test_uniform_moments_within_three_sigma(path):
    # 1e4 uniforms: mean sigma = sqrt(1/12/n), var-estimator sigma from mu4
    u = RngStream(2024, path).uniform(size=10_000)
    n = len(u)
    mean_sigma = np.sqrt(1.0 / 12.0 / n)
    assert abs(u.mean() - 0.5) < 3 * mean_sigma
    var_sigma = np.sqrt((1.0 / 80.0 - 1.0 / 144.0) / n)
    assert abs(u.var() - 1.0 / 12.0) < 3 * var_sigma


def test_substream_cross_correlation_is_small():
    base = RngStream(77)
    u = base.child("left").uniform(size=10_000)
    v = base.child("right").uniform(size=10_000)
    r = np.corrcoef(u, v)[0, 1]
    assert abs(r) < 3.0 / np.sqrt(len(u))


def test_seed_must_fit_64_bits():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(1 << 64)
