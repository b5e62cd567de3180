from dataclasses import replace

import numpy as np
import pytest

from vecmkit import fit_vecm
from vecmkit.dynamics import (
    bootstrap_bands,
    fevd,
    fevd_companion,
    fevd_from_irf,
    irf,
    simulate_levels,
    vecm_to_var_levels,
)
from vecmkit.errors import NotPositiveDefiniteError
from vecmkit.varmodel import VarModel


def _var(A, sigma, names=None):
    A = np.asarray(A, dtype=float)
    if A.ndim == 2:
        A = A[None]
    p, k, _ = A.shape
    return VarModel(k=k, p=p, intercepts=np.zeros(k), lag_coefficients=A,
                    sigma=np.asarray(sigma, dtype=float),
                    variable_names=names or [f"y{i + 1}" for i in range(k)])


@pytest.fixture(scope="module")
def model():
    from vecmkit import DgpSpec, generate

    spec = DgpSpec("vecm", {"alpha": [[-0.3, 0.0], [0.1, -0.4], [0.0, 0.2]],
                            "beta": [[1, 0], [0, 1], [-1, -1]],
                            "gamma": [[[0.2, 0, 0], [0, 0.1, 0], [0, 0, 0]]]}, T=200, seed=7)
    return fit_vecm(generate(spec), 2, 2)


@pytest.fixture(scope="module")
def bands(model):
    return bootstrap_bands(model, 5, replications=100, seed=3)


class TestLevelsForm:
    def test_pure_random_walk(self, model):
        k = model.k
        m = replace(model, alpha=np.zeros((k, model.r)), gamma=np.zeros_like(model.gamma))
        var = vecm_to_var_levels(m)
        np.testing.assert_array_equal(var.lag_coefficients[0], np.eye(k))
        np.testing.assert_array_equal(var.lag_coefficients[1], np.zeros((k, k)))

    def test_unit_roots(self, model):
        ev = np.abs(vecm_to_var_levels(model).companion_eigenvalues())
        assert np.sum(np.abs(ev - 1.0) < 1e-6) == model.k - model.r
        assert np.all(ev < 1.0 + 1e-6)

    def test_rebuild_levels_from_residuals(self, model):
        var = vecm_to_var_levels(model)
        p = model.p_levels
        y = simulate_levels(var, model.data[:p], model.residuals, t0=p)
        np.testing.assert_allclose(y, model.data, atol=1e-9)

    def test_fitted_round_trip(self, model):
        var = vecm_to_var_levels(model)
        y = model.data
        p = model.p_levels
        rows = np.arange(p, y.shape[0])
        levels = var.one_step(y, rows)
        np.testing.assert_allclose(levels, y[p - 1:-1] + model.fitted(), atol=1e-10)


class TestImpulseResponses:
    def test_ar1_decay(self):
        res = irf(_var([[0.5]], [[1.0]]), horizon=8)
        np.testing.assert_allclose(res.responses[:, 0, 0], 0.5 ** np.arange(9), rtol=1e-14)

    def test_diagonal_var(self):
        var = _var(np.diag([0.5, -0.3]), np.diag([2.0, 0.5]))
        res = irf(var, 6)
        assert np.all(res.responses[:, 0, 1] == 0) and np.all(res.responses[:, 1, 0] == 0)
        fe = fevd(var, 6)
        np.testing.assert_allclose(fe.decomposition("y1")[:, 0], 1.0)
        np.testing.assert_allclose(fe.decomposition("y2")[:, 1], 1.0)

    def test_impact_is_cholesky_factor(self):
        sigma = np.array([[4.0, 1.0], [1.0, 2.0]])
        res = irf(_var([[0.2, 0.1], [0.0, 0.3]], sigma), 3)
        np.testing.assert_array_equal(res.responses[0], np.linalg.cholesky(sigma))
        assert res.response("y1", "y1")[0] == pytest.approx(2.0)
        assert res.response("y2", "y1")[0] == 0.0

    def test_reordering_permutes_ma_matrices(self, model):
        a = irf(model, 5)
        order = [model.variable_names[i] for i in (2, 0, 1)]
        b = irf(model, 5, order)
        perm = [2, 0, 1]
        np.testing.assert_array_equal(b.ma_matrices, a.ma_matrices[:, perm][:, :, perm])

    def test_bad_ordering(self, model):
        with pytest.raises(ValueError):
            irf(model, 5, ["y1", "y2", "zz"])

    def test_singular_covariance(self):
        with pytest.raises(NotPositiveDefiniteError):
            irf(_var(np.eye(2) * 0.5, np.ones((2, 2))), 3)

    def test_long_rows(self, model):
        rows = list(irf(model, 2).long_rows())
        assert len(rows) == 3 * 9
        assert rows[0][:3] == (0, "y1", "y1") and rows[0][4] is None


class TestVarianceDecomposition:
    def test_rows_sum_to_one(self, model):
        fe = fevd(model, 9)
        np.testing.assert_allclose(fe.shares.sum(axis=2), 1.0, atol=1e-9)
        assert fe.horizons.tolist() == list(range(1, 10))

    def test_first_variable_own_share_at_one(self, model):
        fe = fevd(model, 4)
        assert fe.shares[0, 0, 0] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("ordering", [None, ["y3", "y1", "y2"]])
    def test_two_routes_agree(self, model, ordering):
        a = fevd(model, 9, ordering)
        b = fevd_companion(model, 9, ordering)
        np.testing.assert_allclose(a.shares, b.shares, atol=1e-10)
        assert a.ordering == b.ordering

    def test_from_irf(self, model):
        np.testing.assert_array_equal(fevd_from_irf(irf(model, 5)).shares, fevd(model, 5).shares)


class TestBootstrap:
    def test_deterministic(self, model, bands):
        again = bootstrap_bands(model, 5, replications=100, seed=3)
        np.testing.assert_array_equal(again.lower, bands.lower)
        np.testing.assert_array_equal(again.upper, bands.upper)

    def test_worker_invariance(self, model, bands):
        par = bootstrap_bands(model, 5, replications=100, seed=3, workers=4)
        np.testing.assert_array_equal(par.lower, bands.lower)
        np.testing.assert_array_equal(par.upper, bands.upper)

    def test_seed_changes_bands(self, model, bands):
        other = bootstrap_bands(model, 5, replications=100, seed=4)
        assert not np.array_equal(other.lower, bands.lower)

    def test_bands_bracket_point(self, bands):
        assert np.all(bands.lower <= bands.responses)
        assert np.all(bands.responses <= bands.upper)
        assert bands.metadata["replications"] == 100
        assert bands.metadata["failed_replications"] == 0

    def test_band_accessor(self, bands):
        lo, up = bands.band("y1", "y2")
        assert lo.shape == up.shape == (6,)
        with pytest.raises(ValueError):
            irf(_var([[0.5]], [[1.0]]), 3).band("y1", "y1")

    @pytest.mark.parametrize("kwargs", [{"replications": 99}, {"level": 1.0}])
    def test_argument_checks(self, model, kwargs):
        with pytest.raises(ValueError):
            bootstrap_bands(model, 3, **kwargs)
