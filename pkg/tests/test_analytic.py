import math

import numpy as np
import pytest
from scipy import special, stats

from shiftspec import analytic


class TestProbit:
    def test_median_is_zero(self):
        assert analytic.probit(0.5) == 0.0

    def test_known_quantile(self):
        # high-precision oracle: Phi(1) = 0.8413447460685429
        assert analytic.probit(0.841345) == pytest.approx(1.0, abs=1e-5)

    def test_known_cdf(self):
        assert analytic.probit_inv(1.959964) == pytest.approx(0.975, abs=1e-6)

    def test_matches_scipy_quantile(self):
        p = np.linspace(1e-7, 1 - 1e-7, 20001)
        err = np.abs(analytic.normal_quantile(p) - stats.norm.ppf(p))
        assert float(err.max()) < 1e-8

    def test_matches_scipy_cdf(self):
        x = np.linspace(-8.0, 8.0, 20001)
        err = np.abs(analytic.normal_cdf(x) - stats.norm.cdf(x))
        assert float(err.max()) < 1e-12

    def test_round_trip(self):
        z = np.linspace(-5.0, 5.0, 4001)
        back = analytic.probit(analytic.probit_inv(z))
        assert float(np.abs(back - z).max()) < 1e-8

    def test_rejects_boundary(self):
        for bad in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(ValueError):
                analytic.probit(bad)


class TestErf:
    def test_matches_scipy(self):
        x = np.linspace(-6, 6, 5001)
        assert float(np.abs(analytic.erf(x) - special.erf(x)).max()) < 1e-14

    def test_erfc_tails(self):
        for v in (0.3, 1.0, 3.5, 6.0, 12.0, 25.0):
            ours = analytic.erfc(v)
            ref = special.erfc(v)
            assert ours == pytest.approx(ref, rel=1e-12)


class TestGaussianAccuracy:
    def test_orthogonal_gives_half(self):
        acc = analytic.gaussian_accuracy([1.0, 0.0], [0.0, 3.0], np.eye(2))
        assert acc == pytest.approx(0.5, abs=1e-15)

    def test_two_dim_monte_carlo(self):
        # frozen from a 1e7-sample Monte Carlo of the generative model
        acc = analytic.gaussian_accuracy([1.0, 1.0], [1.0, 1.0], np.eye(2))
        assert acc == pytest.approx(0.9213503964748575, abs=1e-12)
        rng = np.random.default_rng(7)
        hits = 0
        n = 10_000_000
        for _ in range(10):
            y = rng.choice([-1.0, 1.0], size=n // 10)
            x = y[:, None] + rng.standard_normal((n // 10, 2))
            hits += int(np.sum((x @ np.ones(2)) * y > 0))
        assert acc == pytest.approx(hits / n, abs=1e-3)

    def test_four_dim_value(self):
        acc = analytic.gaussian_accuracy(np.ones(4), np.ones(4), np.eye(4))
        assert acc == pytest.approx(0.9772498680518208, abs=1e-12)

    def test_monotone_in_snr(self):
        w = np.array([1.0, 2.0])
        sigma = np.array([[2.0, 0.3], [0.3, 1.0]])
        scales = np.linspace(0.1, 3.0, 15)
        accs = [analytic.gaussian_accuracy(w, s * np.array([1.0, 0.5]), sigma)
                for s in scales]
        assert all(a < b for a, b in zip(accs, accs[1:]))

    def test_symmetry(self):
        w = np.array([0.3, -1.2, 0.7])
        mu = np.array([0.5, 0.1, -0.4])
        sigma = np.diag([1.0, 2.0, 0.5])
        a_pos = analytic.gaussian_accuracy(w, mu, sigma)
        a_neg = analytic.gaussian_accuracy(w, -mu, sigma)
        assert a_pos + a_neg == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_projection(self):
        with pytest.raises(ValueError, match="degenerate projection"):
            analytic.gaussian_accuracy([1.0, 0.0], [1.0, 1.0],
                                       np.diag([0.0, 1.0]))

    def test_prior_variant(self):
        w = np.ones(2)
        mu = np.ones(2)
        acc = analytic.gaussian_accuracy(w, mu, np.eye(2), prior=0.7)
        r = math.sqrt(2.0)
        assert acc == pytest.approx(0.7 * stats.norm.cdf(r) + 0.15, abs=1e-12)


class TestSnrSummary:
    def test_accuracy_consistent(self):
        s = analytic.snr_summary([1.0, 1.0], [1.0, 1.0], np.eye(2))
        assert s.accuracy == pytest.approx(analytic.normal_cdf(s.snr), abs=1e-15)


class TestPValue:
    def test_example_r_half_n20(self):
        # t = 2.449490, df = 18 -> two-sided p ~ 0.0249
        p = analytic.pearson_p_value(0.5, 20)
        assert p == pytest.approx(0.0249, abs=5e-4)
        t = 0.5 * math.sqrt(18 / 0.75)
        assert p == pytest.approx(2 * stats.t.sf(t, 18), abs=1e-12)

    def test_perfect_correlation(self):
        assert analytic.pearson_p_value(1.0, 10) == 0.0
        assert analytic.pearson_p_value(-1.0, 10) == 0.0

    def test_matches_scipy_broadly(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            r = rng.uniform(-0.99, 0.99)
            n = int(rng.integers(4, 500))
            t = abs(r) * math.sqrt((n - 2) / (1 - r * r))
            assert analytic.pearson_p_value(r, n) == pytest.approx(
                2 * stats.t.sf(t, n - 2), rel=1e-9, abs=1e-12)


class TestBetainc:
    def test_matches_scipy(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            a = rng.uniform(0.3, 80.0)
            b = rng.uniform(0.3, 80.0)
            x = rng.uniform(0.0, 1.0)
            assert analytic.betainc_reg(a, b, x) == pytest.approx(
                special.betainc(a, b, x), abs=1e-12)
