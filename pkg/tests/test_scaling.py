import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paracontrol.attrs import Discretizer, Standardizer, fit_discretizer, fit_standardizer


def twenty_clusters(seed, per=30, k=3):
    rng = np.random.default_rng(seed)
    # cluster means 10 apart with a per-attribute offset; noise sd 0.5
    means = np.arange(20)[:, None] * 10.0 + rng.uniform(-1, 1, size=k)
    x = np.concatenate([means + rng.normal(scale=0.5, size=means.shape) for _ in range(per)])
    return x, means


def test_discretizer_recovers_separated_clusters():
    x, means = twenty_clusters(0)
    disc = fit_discretizer(x, bins=20)
    assert disc.n_bins == (20, 20, 20)
    for a in range(3):
        # sample means of each cluster, the exact k-means optimum for this data
        truth = np.sort(np.array([x[np.abs(x[:, a] - m) < 3, a].mean() for m in means[:, a]]))
        np.testing.assert_allclose(disc.centers[a], truth, atol=1e-9)


def test_bin_center_maps_back_to_its_bin():
    x, _ = twenty_clusters(1)
    disc = fit_discretizer(x, bins=20)
    for a in range(x.shape[1]):
        for b in range(20):
            assert disc.discretize(np.array([disc.bin_center(i, b) if i == a else 0.0 for i in range(3)]))[a] == b


def test_few_distinct_values_get_one_bin_each():
    x = np.array([[0.0, 1.0], [1.0, 1.0], [1.0, 2.0], [3.0, 1.0]])
    disc = fit_discretizer(x, bins=20)
    np.testing.assert_array_equal(disc.centers[0], [0.0, 1.0, 3.0])
    np.testing.assert_array_equal(disc.discretize([[0.4, 1.6], [2.5, 9.0]]), [[0, 1], [2, 1]])


def test_edges_are_midpoints_and_ties_go_up():
    disc = Discretizer((np.array([0.0, 2.0, 10.0]),))
    np.testing.assert_array_equal(disc.edges(0), [1.0, 6.0])
    np.testing.assert_array_equal(disc.discretize([[1.0], [0.999], [6.0], [-5.0], [50.0]]).ravel(), [1, 0, 2, 0, 2])
    np.testing.assert_array_equal(disc.quantize([[5.0]]), [[2.0]])


def test_discretizer_round_trip_and_validation():
    disc = fit_discretizer(np.arange(60.0).reshape(30, 2), bins=4)
    again = Discretizer.from_dict(disc.to_dict())
    for a, b in zip(disc.centers, again.centers):
        np.testing.assert_array_equal(a, b)
    with pytest.raises(ValueError, match="attributes"):
        disc.discretize(np.zeros(3))
    with pytest.raises(ValueError, match="bins"):
        fit_discretizer(np.zeros((3, 2)), bins=0)
    with pytest.raises(ValueError, match="non-finite"):
        fit_discretizer(np.array([[np.nan, 1.0]]))


def test_standardizer_uses_population_std_and_guards_constants():
    x = np.array([[1.0, 5.0], [3.0, 5.0], [5.0, 5.0]])
    s = fit_standardizer(x)
    np.testing.assert_allclose(s.mean, [3.0, 5.0])
    np.testing.assert_allclose(s.std, [np.sqrt(8 / 3), 1.0])
    assert s.constant == (1,)
    z = s.apply(x)
    np.testing.assert_allclose(z[:, 1], 0.0)
    np.testing.assert_allclose(s.invert(z), x)
    again = Standardizer.from_dict(s.to_dict())
    np.testing.assert_array_equal(again.std, s.std)
    assert again.constant == (1,)


def test_standardizer_needs_two_rows():
    with pytest.raises(ValueError, match="at least 2"):
        fit_standardizer(np.ones((1, 3)))



def test_standardizer_by_hand():
    st_ = fit_standardizer(np.array([[1.0], [2.0], [3.0]]))
    # population std of {1, 2, 3} is sqrt(2/3)
    np.testing.assert_allclose(st_.apply([[1.0], [3.0]]).ravel(), [-np.sqrt(1.5), np.sqrt(1.5)], atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 40), st.integers(1, 5), st.integers(0, 2**31))
def test_standardized_columns_have_zero_mean_unit_variance(n, k, seed):
    x = np.random.default_rng(seed).normal(loc=5.0, scale=3.0, size=(n, k))
    z = fit_standardizer(x).apply(x)
    np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=1e-9)
    np.testing.assert_allclose(z.var(axis=0), 1.0, rtol=1e-9)


def test_single_distinct_value_gives_one_bin():
    disc = fit_discretizer(np.full((10, 1), 4.0))
    assert disc.n_bins == (1,)
    assert disc.discretize([[100.0]])[0, 0] == 0
