import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from vecmkit.errors import InsufficientDataError, NotPositiveDefiniteError, SingularDesignError
from vecmkit.linreg import gaussian_loglik, info_criteria, log_det_pd, multi_ols, ols


class TestOls:
    def test_exact_fit(self, rng):
        X = rng.normal(size=(12, 2))
        fit = ols(X @ [2.0, -1.0], X)
        np.testing.assert_allclose(fit.coefficients, [2.0, -1.0], atol=1e-12)
        assert fit.rss == pytest.approx(0.0, abs=1e-20)

    def test_mean(self):
        fit = ols([1.0, 2.0, 3.0, 4.0, 5.0], np.ones((5, 1)))
        assert fit.coefficients[0] == pytest.approx(3.0, abs=1e-14)

    def test_matches_normal_equations_oracle(self):
        r = np.random.default_rng(10)
        X = np.column_stack([np.ones(10), r.normal(size=(10, 2))])
        y = X @ [0.5, 1.5, -2.0] + r.normal(size=10)
        fit = ols(y, X)
        beta, tstats, rss = oracles.normal_equations(y.tolist(), X.tolist())
        np.testing.assert_allclose(fit.coefficients, [float(b) for b in beta], rtol=0, atol=1e-8)
        np.testing.assert_allclose(fit.t_stats, [float(t) for t in tstats], rtol=1e-8)
        assert fit.rss == pytest.approx(float(rss), rel=1e-9)

    def test_rank_deficient(self, rng):
        x = rng.normal(size=20)
        with pytest.raises(SingularDesignError):
            ols(rng.normal(size=20), np.column_stack([x, 2 * x]))

    def test_too_few_rows(self, rng):
        with pytest.raises(InsufficientDataError):
            ols(rng.normal(size=3), rng.normal(size=(3, 3)))

    def test_invariants(self, rng):
        X = np.column_stack([np.ones(30), rng.normal(size=(30, 3))])
        y = rng.normal(size=30)
        fit = ols(y, X)
        assert np.abs(X.T @ fit.residuals).max() < 1e-8 * np.linalg.norm(y)
        assert fit.rss == pytest.approx(float(fit.residuals @ fit.residuals), rel=1e-9)
        np.testing.assert_allclose(fit.t_stats, fit.coefficients / fit.std_errors, rtol=1e-14)
        small = ols(y, X[:, :2])
        assert fit.rss <= small.rss

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.01, 1000.0), st.integers(0, 2 ** 32 - 1))
    def test_scale_equivariance(self, c, seed):
        r = np.random.default_rng(seed)
        X = np.column_stack([np.ones(25), r.normal(size=(25, 2))])
        y = r.normal(size=25)
        a, b = ols(y, X), ols(c * y, X)
        np.testing.assert_allclose(b.coefficients, c * a.coefficients, rtol=1e-10, atol=1e-12 * c)
        np.testing.assert_allclose(b.residuals, c * a.residuals, rtol=1e-10, atol=1e-12 * c)
        assert b.rss == pytest.approx(c * c * a.rss, rel=1e-10)

    def test_log_likelihood_convention(self, rng):
        X = np.ones((40, 1))
        fit = ols(rng.normal(size=40), X)
        n = 40
        expected = -0.5 * n * (np.log(2 * np.pi) + np.log(fit.rss / n) + 1.0)
        assert fit.log_likelihood == pytest.approx(expected, rel=1e-14)


class TestMultiOls:
    def test_columns_match_single_equation(self, rng):
        X = np.column_stack([np.ones(30), rng.normal(size=(30, 2))])
        Y = rng.normal(size=(30, 3))
        fit = multi_ols(Y, X)
        for j in range(3):
            single = ols(Y[:, j], X)
            np.testing.assert_allclose(fit.coefficients[:, j], single.coefficients, rtol=1e-12)
            np.testing.assert_allclose(fit.std_errors[:, j], single.std_errors, rtol=1e-12)


class TestInfoCriteria:
    def test_penalty_monotone(self):
        sigma = np.array([[1.0, 0.2], [0.2, 0.5]])
        small = info_criteria(sigma, 50, 3, 2)
        large = info_criteria(sigma, 50, 5, 2)
        for a, b in zip(small[:3], large[:3]):
            assert a < b

    def test_matches_formula_oracle(self):
        r = np.random.default_rng(3)
        A = r.normal(size=(3, 3))
        sigma = A @ A.T + np.eye(3)
        got = info_criteria(sigma, 47, 7, 3)
        want = oracles.info_criteria(np.linalg.slogdet(sigma)[1], 47, 7, 3)
        np.testing.assert_allclose(got, [float(w) for w in want], rtol=1e-9)

    def test_common_sample_convention(self):
        # five series, lag 1, 47 usable rows: ln|Sigma| = -4.6446 maps to these
        # reference values when m = k p + 1 and n = T - max_lag
        n, k, m = 47, 5, 6
        logdet = -4.6446
        sigma = np.diag(np.full(k, np.exp(logdet / k)))
        aic, hq, sc, fpe = info_criteria(sigma, n, m, k)
        assert aic == pytest.approx(-3.368, abs=6e-4)
        assert hq == pytest.approx(-2.9236, abs=6e-4)
        assert sc == pytest.approx(-2.1870, abs=6e-4)
        assert fpe == pytest.approx(0.0347, abs=1e-4)

    @pytest.mark.parametrize("lag, gap", [(1, -0.4724), (2, -0.8266), (3, -1.1810)])
    def test_penalty_gap(self, lag, gap):
        # AIC - SC depends only on (n, k, m): three series, 47 usable rows
        n, k = 47, 3
        aic, _, sc, _ = info_criteria(np.eye(k), n, k * lag + 1, k)
        assert aic - sc == pytest.approx(gap, abs=2e-4)

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefiniteError):
            info_criteria(np.array([[1.0, 2.0], [2.0, 1.0]]), 30, 2, 2)


def test_log_det_and_loglik(rng):
    A = rng.normal(size=(3, 3))
    S = A @ A.T + np.eye(3)
    assert log_det_pd(S) == pytest.approx(np.linalg.slogdet(S)[1], rel=1e-12)
    n = 60
    expected = -0.5 * n * (3 * np.log(2 * np.pi) + np.linalg.slogdet(S)[1] + 3)
    assert gaussian_loglik(S, n) == pytest.approx(expected, rel=1e-12)
