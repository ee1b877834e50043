"""Tests for pvpop.kernels — special functions, quadrature and samplers."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import special, stats

from pvpop.errors import DomainError
from pvpop.kernels import (
    QuadratureRule,
    RngSeed,
    Sampler,
    binomial_lower_tail,
    binomial_pmf,
    binomial_upper_tail,
    gauss_legendre,
    regularized_incomplete_beta,
    std_normal_cdf,
    std_normal_quantile,
    student_t_cdf,
)


class TestStdNormal:
    def test_cdf_at_zero(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_cdf_975(self):
        assert std_normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-6)

    def test_reflection(self):
        assert std_normal_cdf(-2.3) == pytest.approx(1.0 - std_normal_cdf(2.3), abs=1e-15)

    def test_reflection_random(self):
        x = np.random.default_rng(1).uniform(-8, 8, 1000)
        total = std_normal_cdf(x) + std_normal_cdf(-x)
        assert np.max(np.abs(total - 1.0)) <= 1e-14

    def test_cdf_matches_erfc(self):
        x = np.linspace(-6, 6, 49)
        expected = 0.5 * special.erfc(-x / math.sqrt(2.0))
        assert np.allclose(std_normal_cdf(x), expected, rtol=1e-13, atol=1e-16)

    def test_cdf_rejects_non_finite(self):
        with pytest.raises(DomainError):
            std_normal_cdf(math.inf)
        with pytest.raises(DomainError):
            std_normal_cdf(math.nan)

    def test_quantile_values(self):
        assert std_normal_quantile(0.5) == 0.0
        assert std_normal_quantile(0.9) == pytest.approx(1.2816, abs=1e-4)
        assert std_normal_quantile(0.975) == pytest.approx(1.9600, abs=1e-4)

    def test_quantile_inverts_cdf(self):
        for p in (1e-8, 0.01, 0.3, 0.77, 0.999999):
            assert std_normal_cdf(std_normal_quantile(p)) == pytest.approx(p, abs=1e-10)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_quantile_domain(self, p):
        with pytest.raises(DomainError):
            std_normal_quantile(p)


class TestIncompleteBeta:
    def test_upper_endpoint(self):
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0

    def test_reflection(self):
        total = regularized_incomplete_beta(2.5, 3.5, 0.3) + regularized_incomplete_beta(
            3.5, 2.5, 0.7
        )
        assert total == pytest.approx(1.0, abs=1e-14)

    def test_uniform(self):
        assert regularized_incomplete_beta(1.0, 1.0, 0.37) == pytest.approx(0.37, abs=1e-15)

    @pytest.mark.parametrize(
        "a,b",
        [(0.2, 0.8), (0.5, 0.5), (2.5, 3.5), (10.2, 40.8), (120.0, 380.0), (0.2, 500.8)],
    )
    def test_matches_scipy(self, a, b):
        x = np.linspace(0.0, 1.0, 41)
        ours = regularized_incomplete_beta(a, b, x)
        assert np.allclose(ours, special.betainc(a, b, x), rtol=1e-10, atol=1e-13)

    def test_monotone_in_x(self):
        x = np.linspace(0.0, 1.0, 501)
        values = regularized_incomplete_beta(3.2, 7.8, x)
        assert np.all(np.diff(values) >= 0.0)

    @pytest.mark.parametrize("a,b,x", [(0.0, 1.0, 0.5), (1.0, -1.0, 0.5), (1.0, 1.0, 1.1)])
    def test_domain(self, a, b, x):
        with pytest.raises(DomainError):
            regularized_incomplete_beta(a, b, x)


class TestStudentT:
    def test_symmetry_at_zero(self):
        for df in (1.0, 3.0, 99.0):
            assert student_t_cdf(0.0, df) == 0.5

    def test_large_df_limit(self):
        assert student_t_cdf(1.5, 1e6) == pytest.approx(std_normal_cdf(1.5), abs=1e-6)

    def test_known_value(self):
        assert student_t_cdf(2.0, 5) == pytest.approx(0.9490, abs=1e-4)

    @pytest.mark.parametrize("df", [1.0, 2.5, 5.0, 30.0, 200.0])
    def test_matches_reference_grid(self, df):
        x = np.linspace(-6.0, 6.0, 50)
        assert np.allclose(student_t_cdf(x, df), stats.t.cdf(x, df), rtol=0.0, atol=1e-9)

    def test_infinite_argument(self):
        assert student_t_cdf(math.inf, 4.0) == 1.0
        assert student_t_cdf(-math.inf, 4.0) == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            student_t_cdf(1.0, 0.0)


class TestBinomial:
    def test_degenerate(self):
        assert binomial_pmf(0, 7, 0.0) == 1.0
        assert binomial_pmf(7, 7, 1.0) == 1.0

    def test_normalization(self):
        pmf = binomial_pmf(np.arange(21), 20, 0.2)
        assert math.fsum(pmf) == pytest.approx(1.0, abs=1e-12)

    def test_upper_tail(self):
        assert binomial_upper_tail(4, 20, 0.2) == pytest.approx(0.5886, abs=1e-4)
        assert binomial_upper_tail(0, 20, 0.2) == 1.0

    def test_lower_tail(self):
        assert binomial_lower_tail(4, 20, 0.2) == pytest.approx(0.6296, abs=1e-4)

    def test_exact_rational(self):
        p = Fraction(3, 10)
        for n in (1, 7, 30):
            for y in range(n + 1):
                exact = math.comb(n, y) * p**y * (1 - p) ** (n - y)
                assert binomial_pmf(y, n, 0.3) == pytest.approx(float(exact), rel=1e-12)

    def test_large_n_stays_finite(self):
        pmf = binomial_pmf(np.arange(1001), 1000, 0.35)
        assert np.all(np.isfinite(pmf))
        assert math.fsum(pmf) == pytest.approx(1.0, abs=1e-12)

    def test_y_above_n(self):
        with pytest.raises(DomainError):
            binomial_pmf(5, 4, 0.5)


class TestGaussLegendre:
    def test_square(self):
        assert gauss_legendre(8).integrate(lambda x: x**2) == pytest.approx(2.0 / 3.0, abs=1e-14)

    def test_constant(self):
        assert gauss_legendre(8).integrate(np.ones_like) == pytest.approx(2.0, abs=1e-14)

    def test_degree_exactness(self):
        rule = gauss_legendre(4)
        assert rule.integrate(lambda x: x**6) == pytest.approx(2.0 / 7.0, abs=1e-13)
        assert rule.integrate(lambda x: x**7) == pytest.approx(0.0, abs=1e-13)

    def test_beta_density_normalization(self):
        rule = gauss_legendre(64)
        area = rule.integrate(lambda p: stats.beta.pdf(p, 3, 5), 0.0, 1.0)
        assert area == pytest.approx(1.0, abs=1e-10)

    def test_random_posterior_normalization(self):
        rng = np.random.default_rng(7)
        rule = gauss_legendre(64)
        for _ in range(100):
            n = int(rng.integers(1, 41))
            y = int(rng.integers(0, n + 1))
            area = rule.integrate(lambda p: stats.beta.pdf(p, 1 + y, 1 + n - y), 0.0, 1.0)
            assert area == pytest.approx(1.0, abs=1e-9)

    def test_rule_invariants(self):
        rule = gauss_legendre(64)
        assert rule.order == 64
        assert math.fsum(rule.weights) == pytest.approx(2.0, abs=1e-12)
        assert np.all(np.diff(rule.nodes) > 0)

    def test_normal_scale(self):
        u, uc, weights = gauss_legendre(64).normal_scale()
        assert math.fsum(weights) == pytest.approx(1.0, abs=1e-15)
        assert np.allclose(u + uc, 1.0, rtol=0.0, atol=1e-15)
        assert uc[-1] < 1e-14
        assert float(np.dot(weights, u)) == pytest.approx(0.5, abs=1e-14)
        assert float(np.dot(weights, u * u)) == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_order_too_small(self):
        with pytest.raises(DomainError):
            gauss_legendre(1)

    def test_bad_weights_rejected(self):
        with pytest.raises(DomainError):
            QuadratureRule(nodes=np.array([-0.5, 0.5]), weights=np.array([1.0, 0.5]), order=2)


class TestSamplers:
    def test_same_seed_same_draws(self):
        a = Sampler(42, 3).normal(0.0, 1.0, 100)
        b = Sampler(42, 3).normal(0.0, 1.0, 100)
        assert np.array_equal(a, b)

    def test_streams_differ(self):
        a = Sampler(42, 0).uniform(size=10)
        b = Sampler(42, 1).uniform(size=10)
        assert not np.array_equal(a, b)

    def test_rng_seed_helper(self):
        assert np.array_equal(
            RngSeed(9).sampler(2).uniform(size=5), Sampler(9, 2).uniform(size=5)
        )

    def test_gamma_mean_shape_scale(self):
        draws = Sampler(5).gamma(2.0, 0.5, 1_000_000)
        se = math.sqrt(2.0) * 0.5 / math.sqrt(draws.size)
        assert abs(draws.mean() - 1.0) <= 4 * se

    def test_beta_mean(self):
        draws = Sampler(6).beta(0.5, 0.5, 1_000_000)
        se = math.sqrt(0.125) / math.sqrt(draws.size)
        assert abs(draws.mean() - 0.5) <= 4 * se

    def test_truncated_normal_positive(self):
        draws = Sampler(8).truncated_normal(1.0, math.sqrt(0.05), 0.0, 100_000)
        assert np.all(draws > 0.0)

    def test_truncated_normal_scalar(self):
        value = Sampler(8).truncated_normal(0.0, 1.0, 0.0)
        assert isinstance(value, float) and value > 0.0

    def test_integers_inclusive(self):
        draws = Sampler(3).integers(0, 2, 10_000)
        assert set(np.unique(draws)) == {0, 1, 2}

    def test_invalid_parameters(self):
        s = Sampler(1)
        with pytest.raises(DomainError):
            s.gamma(-1.0, 1.0)
        with pytest.raises(DomainError):
            s.normal(0.0, 0.0)
        with pytest.raises(DomainError):
            s.beta(0.0, 1.0)

    def test_invalid_seed(self):
        with pytest.raises(DomainError):
            RngSeed(-1)
        with pytest.raises(DomainError):
            RngSeed(2**64)
