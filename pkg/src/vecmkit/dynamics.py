"""
Impulse responses and forecast-error variance decompositions.

A VECM is first rewritten as a VAR in levels; its moving-average
matrices do not die out (the unit roots persist), so long-horizon
responses are permanent effects. Orthogonalisation uses the Cholesky
factor of the residual covariance under a caller-chosen ordering.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import BootstrapError, NotPositiveDefiniteError, VecmkitError
from .varmodel import VarModel, fit_var
from .vecm import VecmModel, _fit_array


def vecm_to_var_levels(m: VecmModel) -> VarModel:
    """
    A_1 = I + alpha beta' + Gamma_1, A_j = Gamma_j - Gamma_{j-1},
    A_p = -Gamma_{p-1}.
    """
    k, p = m.k, m.p_levels
    G = m.gamma
    A = np.zeros((p, k, k))
    A[0] = np.eye(k) + m.pi
    if p > 1:
        A[0] += G[0]
        for j in range(1, p - 1):
            A[j] = G[j] - G[j - 1]
        A[p - 1] = -G[p - 2]
    trend = m.trend if np.any(m.trend) else None
    return VarModel(
        k=k,
        p=p,
        intercepts=m.intercepts.copy(),
        lag_coefficients=A,
        sigma=m.sigma,
        variable_names=list(m.variable_names),
        residuals=m.residuals,
        log_likelihood=m.log_likelihood,
        trend=trend,
        data=m.data,
    )


def _as_var(model) -> VarModel:
    return vecm_to_var_levels(model) if isinstance(model, VecmModel) else model


def _permutation(names: list, ordering: Optional[Sequence[str]]) -> list:
    ordering = list(names if ordering is None else ordering)
    if sorted(ordering) != sorted(names):
        raise ValueError(f"ordering {ordering} is not a permutation of {names}")
    return [names.index(n) for n in ordering]


def _cholesky(sigma: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("residual covariance is not positive definite") from None


@dataclass(frozen=True)
class IrfResult:
    """
    ``responses[h, i, j]``: response of ``ordering[i]`` at horizon h to a
    one-standard-deviation orthogonal shock in ``ordering[j]``.
    """

    responses: np.ndarray  # (H + 1, k, k)
    ma_matrices: np.ndarray  # non-orthogonalised Phi_h, same ordering
    ordering: list
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    metadata: dict = field(default_factory=dict)

    @property
    def horizons(self) -> np.ndarray:
        return np.arange(self.responses.shape[0])

    def response(self, shock: str, responder: str) -> np.ndarray:
        j = self.ordering.index(shock)
        i = self.ordering.index(responder)
        return self.responses[:, i, j]

    def band(self, shock: str, responder: str):
        if self.lower is None:
            raise ValueError("no bootstrap bands attached")
        j = self.ordering.index(shock)
        i = self.ordering.index(responder)
        return self.lower[:, i, j], self.upper[:, i, j]

    def long_rows(self):
        """(horizon, shock, responder, value, lower, upper) tuples."""
        H1, k, _ = self.responses.shape
        for h in range(H1):
            for j in range(k):
                for i in range(k):
                    lo = None if self.lower is None else float(self.lower[h, i, j])
                    up = None if self.upper is None else float(self.upper[h, i, j])
                    yield (h, self.ordering[j], self.ordering[i], float(self.responses[h, i, j]), lo, up)


@dataclass(frozen=True)
class FevdResult:
    """``shares[h-1, i, j]``: share of ``ordering[i]``'s h-step error variance due to shock j."""

    shares: np.ndarray  # (H, k, k)
    ordering: list

    @property
    def horizons(self) -> np.ndarray:
        return np.arange(1, self.shares.shape[0] + 1)

    def decomposition(self, variable: str) -> np.ndarray:
        """(H, k) shares of ``variable`` by shock source."""
        return self.shares[:, self.ordering.index(variable), :]


def _orthogonal_irf(var: VarModel, horizon: int, perm: list):
    phi = var.ma_matrices(horizon)[:, perm][:, :, perm]
    P = _cholesky(var.sigma[np.ix_(perm, perm)])
    return phi @ P, phi


def irf(model, horizon: int = 9, ordering: Optional[Sequence[str]] = None) -> IrfResult:
    """
    Orthogonalised impulse responses Theta_h = Phi_h P for h = 0..H.

    ``model`` may be a VecmModel (converted to levels) or a VarModel.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    var = _as_var(model)
    perm = _permutation(var.variable_names, ordering)
    theta, phi = _orthogonal_irf(var, horizon, perm)
    return IrfResult(theta, phi, [var.variable_names[i] for i in perm])


def fevd_from_irf(result: IrfResult) -> FevdResult:
    """Shares from cumulated squared orthogonalised responses."""
    sq = np.cumsum(result.responses ** 2, axis=0)
    total = sq.sum(axis=2, keepdims=True)
    return FevdResult((sq / total)[:-1], list(result.ordering))


def fevd(model, horizon: int = 9, ordering: Optional[Sequence[str]] = None) -> FevdResult:
    """Variance decomposition for forecast steps 1..H."""
    return fevd_from_irf(irf(model, horizon, ordering))


def fevd_companion(model, horizon: int = 9, ordering: Optional[Sequence[str]] = None) -> FevdResult:
    """
    Same decomposition computed from powers of the companion matrix:
    MSE_h = sum_s J F^s J' Sigma J F^s' J', contribution of shock j =
    sum_s (J F^s J' p_j)^2.
    """
    var = _as_var(model)
    perm = _permutation(var.variable_names, ordering)
    k, p = var.k, var.p
    F = var.companion()
    J = np.zeros((k, k * p))
    J[:, :k] = np.eye(k)
    sigma = var.sigma
    P = _cholesky(sigma[np.ix_(perm, perm)])
    Pm = np.zeros((k, k))
    Pm[np.ix_(perm, range(k))] = P  # columns: shocks in ordering; rows: model order
    power = np.eye(k * p)
    mse = np.zeros(k)
    contrib = np.zeros((k, k))
    shares = np.zeros((horizon, k, k))
    for h in range(horizon):
        psi = J @ power @ J.T
        mse += np.diag(psi @ sigma @ psi.T)
        contrib += (psi @ Pm) ** 2
        shares[h] = (contrib / mse[:, None])[perm]
        power = power @ F
    return FevdResult(shares, [var.variable_names[i] for i in perm])


def simulate_levels(var: VarModel, initial: np.ndarray, innovations: np.ndarray, t0: int) -> np.ndarray:
    """Rebuild levels from ``p`` initial rows and a stream of innovations."""
    k, p = var.k, var.p
    n = innovations.shape[0]
    y = np.empty((p + n, k))
    y[:p] = initial
    drive = var.intercepts + innovations
    if var.trend is not None:
        drive = drive + np.outer(t0 + np.arange(n), var.trend)
    # [A_1 ... A_p] against [y_{t-1}; ...; y_{t-p}]
    A = np.hstack(list(var.lag_coefficients))
    for i in range(n):
        t = p + i
        y[t] = drive[i] + A @ y[t - p:t][::-1].ravel()
    return y


def _replicate(model, var: VarModel, horizon: int, perm: list, u: np.ndarray, seed_seq):
    rng = np.random.default_rng(seed_seq)
    n = u.shape[0]
    draw = u[rng.integers(0, n, size=n)]
    y0 = model.data[: var.p]
    y = simulate_levels(var, y0, draw, t0=var.p)
    if isinstance(model, VecmModel):
        refit = _fit_array(y, model.variable_names, model.p_levels, model.r, model.det_case)
        refit_var = vecm_to_var_levels(refit)
    else:
        refit_var = fit_var(y, var.p)
    theta, _ = _orthogonal_irf(refit_var, horizon, perm)
    return theta


def bootstrap_bands(
    model,
    horizon: int = 9,
    ordering: Optional[Sequence[str]] = None,
    replications: int = 1000,
    seed: int = 0,
    level: float = 0.95,
    workers: int = 1,
) -> IrfResult:
    """
    Residual-resampling percentile bands for orthogonalised IRFs.

    Each replication resamples the centred residuals with replacement,
    rebuilds the levels through the level-VAR form from the original
    first ``p`` observations, and re-estimates at the same (p, r) and
    deterministic case. Replication b draws from the b-th child of
    ``SeedSequence(seed)``, so the bands do not depend on ``workers``.
    Percentile intervals that exclude the point estimate are widened to
    include it; the number of such cells is recorded in ``metadata``.
    """
    if replications < 100:
        raise ValueError("use at least 100 bootstrap replications")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    point = irf(model, horizon, ordering)
    var = _as_var(model)
    if var.data is None or var.residuals is None:
        raise ValueError("bootstrap needs a model fitted to data")
    perm = _permutation(var.variable_names, ordering)
    u = var.residuals - var.residuals.mean(axis=0)
    children = np.random.SeedSequence(seed).spawn(replications)

    def one(b):
        try:
            return _replicate(model, var, horizon, perm, u, children[b])
        except (VecmkitError, np.linalg.LinAlgError):
            return None

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            draws = list(pool.map(one, range(replications)))
    else:
        draws = [one(b) for b in range(replications)]
    ok = [d for d in draws if d is not None]
    failures = replications - len(ok)
    if failures > 0.10 * replications:
        raise BootstrapError(f"{failures} of {replications} bootstrap re-estimations failed")
    stack = np.stack(ok)
    alpha = (1.0 - level) / 2.0
    lower = np.quantile(stack, alpha, axis=0)
    upper = np.quantile(stack, 1.0 - alpha, axis=0)
    outside = (point.responses < lower) | (point.responses > upper)
    lower = np.minimum(lower, point.responses)
    upper = np.maximum(upper, point.responses)
    meta = {
        "interval": "percentile",
        "level": level,
        "replications": replications,
        "failed_replications": failures,
        "seed": seed,
        "cells_widened_to_point": int(outside.sum()),
    }
    return IrfResult(point.responses, point.ma_matrices, point.ordering, lower, upper, meta)
