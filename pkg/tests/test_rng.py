import numpy as np

from shiftspec.rng import RandomStream


def test_same_key_same_draws():
    a = RandomStream(42, 7).uniform(size=1000)
    b = RandomStream(42, 7).uniform(size=1000)
    assert np.array_equal(a, b)


def test_streams_are_order_independent():
    base = RandomStream(5)
    first = base.substream(3).standard_normal(size=100)
    # consuming another stream in between must not disturb stream 3
    base2 = RandomStream(5)
    _ = base2.substream(9).standard_normal(size=1000)
    second = base2.substream(3).standard_normal(size=100)
    assert np.array_equal(first, second)


def test_uniform_range_and_mean():
    u = RandomStream(0).uniform(-2.0, 2.0, size=200_000)
    assert u.min() >= -2.0 and u.max() <= 2.0
    assert abs(u.mean()) < 0.02


def test_standard_normal_moments():
    z = RandomStream(1).standard_normal(size=400_000)
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1.0) < 0.01
    assert np.all(np.isfinite(z))


def test_flat_simplex():
    s = RandomStream(2)
    for m in (2, 3, 6):
        w = s.flat_simplex(m)
        assert w.shape == (m,)
        assert np.all(w >= 0)
        assert abs(w.sum() - 1.0) < 1e-12


def test_integers_bounds():
    idx = RandomStream(3).integers(17, size=10_000)
    assert idx.min() >= 0 and idx.max() < 17


def test_bernoulli_signs():
    y = RandomStream(4).bernoulli_signs(0.75, size=100_000)
    assert set(np.unique(y)) == {-1.0, 1.0}
    assert abs(np.mean(y == 1.0) - 0.75) < 0.01
