import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from vecmkit import DgpSpec, generate
from vecmkit.errors import NotPositiveDefiniteError, UnsupportedDimensionError
from vecmkit.johansen import (
    DET_CASES,
    critical_value,
    eigen_problem,
    johansen_test,
    max_table_dimension,
    parse_det_case,
    reduced_rank,
)


def _random_moments(seed, k=3, n=200):
    r = np.random.default_rng(seed)
    R0 = r.normal(size=(n, k))
    R1 = R0 @ r.normal(size=(k, k)) * 0.3 + r.normal(size=(n, k))
    return R0.T @ R0 / n, R0.T @ R1 / n, R1.T @ R1 / n


class TestEigenProblem:
    def test_no_covariance(self):
        vals, _ = eigen_problem(np.eye(3), np.zeros((3, 3)), np.eye(3))
        np.testing.assert_array_equal(vals, 0.0)

    def test_closed_form(self):
        d = np.array([0.9, 0.5, 0.2])
        vals, _ = eigen_problem(np.eye(3), np.diag(d), np.eye(3))
        np.testing.assert_allclose(vals, d ** 2, atol=1e-14)

    def test_matches_direct_spectrum_oracle(self):
        S00, S01, S11 = _random_moments(99)
        vals, _ = eigen_problem(S00, S01, S11)
        want = [float(v) for v in oracles.generalized_spectrum(S00, S01, S11)]
        np.testing.assert_allclose(vals, want, rtol=0, atol=1e-8)

    def test_eigenvectors_are_s11_orthonormal(self):
        S00, S01, S11 = _random_moments(5)
        _, V = eigen_problem(S00, S01, S11)
        np.testing.assert_allclose(V.T @ S11 @ V, np.eye(3), atol=1e-8)

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefiniteError):
            eigen_problem(np.eye(2), np.zeros((2, 2)), np.array([[1.0, 2.0], [2.0, 1.0]]))


class TestCriticalValues:
    def test_restricted_constant_ladder(self):
        trace = [critical_value("restricted_constant", "trace", d) for d in range(1, 6)]
        eigen = [critical_value("restricted_constant", "eigen", d) for d in range(1, 6)]
        assert trace == [9.24, 19.96, 34.91, 53.12, 76.07]
        assert eigen == [9.24, 15.67, 22.00, 28.14, 34.40]

    @pytest.mark.parametrize("case", DET_CASES)
    def test_monotone_in_level_and_dimension(self, case):
        for stat in ("trace", "eigen"):
            prev = -np.inf
            for d in range(1, max_table_dimension(case) + 1):
                lo, mid, hi = (critical_value(case, stat, d, lv) for lv in ("10%", "5%", "1%"))
                assert lo < mid < hi
                assert mid > prev
                prev = mid

    def test_out_of_range(self):
        with pytest.raises(UnsupportedDimensionError):
            critical_value("restricted_constant", "trace", 40)

    def test_aliases(self):
        assert parse_det_case("const") == "restricted_constant"
        assert parse_det_case("Unrestricted-Constant") == "unrestricted_constant"
        with pytest.raises(ValueError):
            parse_det_case("quadratic")


class TestJohansenTest:
    def test_oracle_equivalence(self, trivariate):
        res = johansen_test(trivariate, 2, "restricted_constant")
        want = oracles.johansen_eigenvalues(trivariate.matrix.tolist(), 2, True)
        np.testing.assert_allclose(res.eigenvalues, [float(v) for v in want], rtol=0, atol=1e-8)

    def test_oracle_equivalence_unrestricted(self, trivariate):
        res = johansen_test(trivariate, 3, "unrestricted_constant")
        want = oracles.johansen_eigenvalues(trivariate.matrix.tolist(), 3, False)
        np.testing.assert_allclose(res.eigenvalues, [float(v) for v in want], rtol=0, atol=1e-8)

    @pytest.mark.parametrize("case", DET_CASES)
    def test_invariants(self, trivariate, case):
        res = johansen_test(trivariate, 2, case)
        lam = res.eigenvalues
        assert np.all(np.diff(lam) <= 0) and np.all(lam >= 0) and np.all(lam < 1)
        n = res.n_obs
        np.testing.assert_allclose(res.eigen_stats, -n * np.log1p(-lam), rtol=0, atol=2.0 ** -33)
        for r in range(res.k - 1):
            assert res.trace_stats[r] == res.eigen_stats[r] + res.trace_stats[r + 1]
            assert res.trace_stats[r] - res.eigen_stats[r] - res.trace_stats[r + 1] == 0
        assert res.trace_stats[-1] == res.eigen_stats[-1]
        crit = res.trace_critical[:, 1]
        first_accept = next((r for r in range(res.k) if res.trace_stats[r] <= crit[r]), res.k)
        assert res.decided_rank == first_accept

    def test_finds_rank_two(self, trivariate):
        assert johansen_test(trivariate, 2).decided_rank == 2

    def test_s11_orthonormal_vectors(self, trivariate):
        rr = reduced_rank(trivariate.matrix, 2, "restricted_constant")
        V = rr.eigenvectors
        np.testing.assert_allclose(V.T @ rr.S11 @ V, np.eye(V.shape[1]), atol=1e-8)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(1e-2, 1e2), st.integers(0, 2))
    def test_scale_invariance(self, trivariate, c, col):
        y = trivariate.matrix.copy()
        y[:, col] *= c
        a = johansen_test(trivariate, 2)
        b = johansen_test(y, 2)
        np.testing.assert_allclose(b.eigenvalues, a.eigenvalues, atol=1e-8)
        np.testing.assert_allclose(b.trace_stats, a.trace_stats, rtol=1e-8, atol=1e-8)

    def test_too_many_series_for_table(self):
        k = max_table_dimension("restricted_constant") + 1
        y = np.cumsum(np.random.default_rng(0).normal(size=(200, k)), axis=0)
        with pytest.raises(UnsupportedDimensionError):
            johansen_test(y, 1)

    def test_independent_walks_rank_zero(self):
        d = generate(DgpSpec("random_walk", {"k": 3}, T=500, seed=3))
        assert johansen_test(d, 2).decided_rank == 0
