import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from vecmkit import fit_vecm
from vecmkit.diagnostics import (
    arch_lm,
    diagnose,
    jarque_bera,
    jarque_bera_statistic,
    portmanteau,
    portmanteau_statistic,
)
from vecmkit.errors import InsufficientDataError


class TestJarqueBera:
    def test_matches_moment_oracle(self):
        u = np.random.default_rng(12).standard_t(4, size=(12, 2))
        res = jarque_bera(u)
        assert res.statistic == pytest.approx(float(oracles.jarque_bera(u.tolist())), abs=1e-9)
        assert res.df == 4

    def test_zero_for_normal_moments(self):
        # symmetric three-point law with P(0) = 2/3 has kurtosis exactly 3
        x = np.array([-1.0, 0, 0, 0, 0, 1.0])
        y = np.array([0, -1.0, 1.0, 0, 0, 0])
        skew, kurt = jarque_bera_statistic(np.column_stack([x, y]))
        assert skew == pytest.approx(0.0, abs=1e-12)
        assert kurt == pytest.approx(0.0, abs=1e-12)

    def test_heavy_tails_rejected(self, rng):
        assert jarque_bera(rng.standard_t(3, size=(500, 2))).p_value < 0.01


class TestPortmanteau:
    def test_univariate_ljung_box(self, rng):
        u = rng.normal(size=80)
        T = len(u)
        c0 = u @ u / T
        want = T * T * sum((u[j:] @ u[:-j] / T / c0) ** 2 / (T - j) for j in range(1, 6))
        assert portmanteau_statistic(u, 5) == pytest.approx(want, rel=1e-12)

    def test_degrees_of_freedom(self, rng):
        res = portmanteau(rng.normal(size=(100, 3)), h=10, lag_order=2)
        assert res.df == 9 * 8 and res.lags == 10

    def test_nondecreasing_in_h(self, rng):
        u = rng.normal(size=(60, 2))
        q = [portmanteau_statistic(u, h) for h in range(1, 15)]
        assert all(b >= a for a, b in zip(q, q[1:]))

    def test_horizon_checks(self, rng):
        with pytest.raises(ValueError):
            portmanteau(rng.normal(size=(50, 2)), h=2, lag_order=2)
        with pytest.raises(InsufficientDataError):
            portmanteau(rng.normal(size=(8, 2)), h=10)

    def test_detects_autocorrelation(self, rng):
        e = rng.normal(size=(301, 2))
        u = e[1:] + 0.7 * e[:-1]
        assert portmanteau(u, 10).p_value < 0.001


class TestArch:
    def test_univariate_is_t_r_squared(self, rng):
        u = rng.normal(size=200)
        q = 3
        v = (u - u.mean()) ** 2
        n = len(v) - q
        X = np.column_stack([np.ones(n)] + [v[q - j: len(v) - j] for j in range(1, q + 1)])
        y = v[q:]
        coef = np.linalg.lstsq(X, y, rcond=None)[0]
        r2 = 1 - np.sum((y - X @ coef) ** 2) / np.sum((y - y.mean()) ** 2)
        res = arch_lm(u, q)
        assert res.statistic == pytest.approx(n * r2, rel=1e-10)
        assert res.df == q

    def test_degrees_of_freedom(self, rng):
        assert arch_lm(rng.normal(size=(200, 3)), 5).df == 5 * 36

    def test_saturates_when_overparameterised(self, rng):
        # 5 lags of 15 vech products exceed 40 observations: exact fit
        res = arch_lm(rng.normal(size=(45, 5)), 5)
        assert res.p_value == pytest.approx(1.0, abs=1e-9)

    def test_detects_arch(self):
        from vecmkit import DgpSpec, generate

        e = generate(DgpSpec("arch1", {"omega": 1.0, "a": 0.6}, T=1000, seed=4)).matrix
        assert arch_lm(e, 5).p_value < 0.01

    def test_too_short(self, rng):
        with pytest.raises(InsufficientDataError):
            arch_lm(rng.normal(size=(6, 2)), 5)


@settings(max_examples=20, deadline=None)
@given(st.floats(1e-3, 1e3), st.integers(0, 2 ** 32 - 1))
def test_scale_invariance(c, seed):
    u = np.random.default_rng(seed).normal(size=(80, 2))
    for fn in (lambda x: portmanteau(x, 6), jarque_bera, lambda x: arch_lm(x, 2)):
        a, b = fn(u).statistic, fn(c * u).statistic
        assert b == pytest.approx(a, rel=1e-8, abs=1e-8)


def test_diagnose_uses_levels_lag_order(trivariate):
    m = fit_vecm(trivariate, 3, 2)
    rep = diagnose(m)
    assert rep.portmanteau.df == 9 * (10 - 3)
    assert rep.lags_used == {"portmanteau": 10, "arch": 5}
    for p in (rep.portmanteau_p, rep.jarque_bera_p, rep.arch_p):
        assert 0.0 <= p <= 1.0
