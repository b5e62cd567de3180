"""
Vector autoregressions: OLS estimation, lag-order selection and
bivariate Granger causality tests.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from .errors import InsufficientDataError
from .linreg import gaussian_loglik, info_criteria, multi_ols, ols

CRITERIA = ("AIC", "HQ", "SC", "FPE")


@dataclass(frozen=True)
class VarModel:
    """
    y_t = intercepts + trend * t + sum_j A_j y_{t-j} + e_t.

    ``t`` is the 0-based row index of the observation in the levels data;
    ``trend`` is zero unless the model came from a restricted-trend VECM.
    """

    k: int
    p: int
    intercepts: np.ndarray
    lag_coefficients: np.ndarray  # (p, k, k)
    sigma: np.ndarray
    variable_names: list
    residuals: Optional[np.ndarray] = None
    log_likelihood: float = float("nan")
    trend: Optional[np.ndarray] = None
    data: Optional[np.ndarray] = field(default=None, repr=False)

    def companion(self) -> np.ndarray:
        k, p = self.k, self.p
        F = np.zeros((k * p, k * p))
        F[:k] = np.hstack(list(self.lag_coefficients))
        if p > 1:
            F[k:, :-k] = np.eye(k * (p - 1))
        return F

    def companion_eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.companion())

    def one_step(self, history: np.ndarray, t: Optional[np.ndarray] = None) -> np.ndarray:
        """
        One-step forecasts of rows p .. m-1 of the m x k ``history``,
        computed through the companion form. ``t`` holds the row indices
        fed to the trend term, if any.
        """
        history = np.asarray(history, dtype=float)
        k, p = self.k, self.p
        n = history.shape[0] - p
        # state_t = [y_{t-1}, ..., y_{t-p}]
        states = np.hstack([history[p - 1 - j: p - 1 - j + n] for j in range(p)])
        out = (self.companion() @ states.T).T[:, :k] + self.intercepts
        if self.trend is not None and t is not None:
            out = out + np.outer(t, self.trend)
        return out

    def ma_matrices(self, horizon: int) -> np.ndarray:
        """Phi_0 .. Phi_H of the moving-average representation."""
        k, p = self.k, self.p
        phi = np.zeros((horizon + 1, k, k))
        phi[0] = np.eye(k)
        for h in range(1, horizon + 1):
            acc = np.zeros((k, k))
            for j in range(1, min(h, p) + 1):
                acc += phi[h - j] @ self.lag_coefficients[j - 1]
            phi[h] = acc
        return phi


@dataclass(frozen=True)
class LagSelection:
    table: dict  # lag -> {criterion: value}
    chosen: dict  # criterion -> lag
    recommended: int
    n_obs: int

    @property
    def lags(self) -> list:
        return sorted(self.table)

    @property
    def unanimous(self) -> bool:
        return len(set(self.chosen.values())) == 1


@dataclass(frozen=True)
class GrangerResult:
    cause: str
    effect: str
    lag: int
    statistic: float
    p_value: float
    df: tuple

    @property
    def reject_at_5pct(self) -> bool:
        return self.p_value < 0.05


def _values(d):
    if hasattr(d, "matrix"):
        return d.matrix, list(d.names)
    y = np.asarray(d, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    return y, [f"y{i + 1}" for i in range(y.shape[1])]


def var_design(y: np.ndarray, p: int, start: Optional[int] = None, intercept: bool = True):
    """Rows t = start .. T-1 of the VAR(p) regression (default start = p)."""
    T = y.shape[0]
    start = p if start is None else start
    t = np.arange(start, T)
    cols = [np.ones((len(t), 1))] if intercept else []
    cols += [y[t - j] for j in range(1, p + 1)]
    return y[t], np.hstack(cols)


def fit_var(d, p: int = 1, include_intercept: bool = True) -> VarModel:
    """
    Equation-by-equation OLS of a VAR(p).

    ``sigma`` uses divisor T - p (the ML estimate).
    """
    y, names = _values(d)
    T, k = y.shape
    if p < 1:
        raise ValueError("lag order must be at least 1")
    if T - p <= k * p + int(include_intercept):
        raise InsufficientDataError(
            f"VAR({p}) with k={k} needs more than {k * p + 1 + p} observations (T={T})"
        )
    Y, X = var_design(y, p, intercept=include_intercept)
    fit = multi_ols(Y, X)
    coef = fit.coefficients
    off = int(include_intercept)
    intercepts = coef[0].copy() if include_intercept else np.zeros(k)
    A = np.stack([coef[off + j * k: off + (j + 1) * k].T for j in range(p)])
    sigma = fit.sigma_ml
    return VarModel(
        k=k,
        p=p,
        intercepts=intercepts,
        lag_coefficients=A,
        sigma=sigma,
        variable_names=names,
        residuals=fit.residuals,
        log_likelihood=gaussian_loglik(sigma, fit.n_obs),
        data=y,
    )


def select_lag_order(d, max_lag: int = 3) -> LagSelection:
    """
    AIC, HQ, SC and FPE for VAR(1) .. VAR(max_lag) on the common sample
    t = max_lag .. T-1. The recommendation is the modal choice across the
    four criteria, ties going to the smaller lag.
    """
    y, _ = _values(d)
    T, k = y.shape
    if max_lag < 1:
        raise ValueError("max_lag must be at least 1")
    if T - max_lag <= k * max_lag + 1:
        raise InsufficientDataError(
            f"lag selection up to {max_lag} with k={k} needs more observations (T={T})"
        )
    table = {}
    for p in range(1, max_lag + 1):
        Y, X = var_design(y, p, start=max_lag)
        fit = multi_ols(Y, X)
        aic, hq, sc, fpe = info_criteria(fit.sigma_ml, fit.n_obs, X.shape[1], k)
        table[p] = {"AIC": aic, "HQ": hq, "SC": sc, "FPE": fpe}
    chosen = {c: min(table, key=lambda p, c=c: (table[p][c], p)) for c in CRITERIA}
    return LagSelection(table, chosen, recommend_lag(chosen), T - max_lag)


def recommend_lag(chosen: dict) -> int:
    """Most frequent lag among the criteria's choices; ties go to the smaller lag."""
    votes = Counter(chosen.values())
    top = max(votes.values())
    return min(p for p, v in votes.items() if v == top)


def granger_test(d, cause: str, effect: str, lag: int = 2) -> GrangerResult:
    """
    Bivariate Granger causality F-test.

    Restricted: effect on a constant and its own ``lag`` lags.
    Unrestricted: adds ``lag`` lags of ``cause``. With n usable rows the
    statistic is F(lag, n - 2 lag - 1).
    """
    if cause == effect:
        raise ValueError("cause and effect must be different series")
    x = np.asarray(d[cause].values, dtype=float)
    y = np.asarray(d[effect].values, dtype=float)
    T = len(y)
    n = T - lag
    df2 = n - 2 * lag - 1
    if lag < 1 or df2 < 1:
        raise InsufficientDataError(f"Granger test with lag {lag} needs more than {3 * lag + 1} observations")
    t = np.arange(lag, T)
    own = np.column_stack([y[t - j] for j in range(1, lag + 1)])
    other = np.column_stack([x[t - j] for j in range(1, lag + 1)])
    const = np.ones((n, 1))
    restricted = ols(y[t], np.hstack([const, own]))
    unrestricted = ols(y[t], np.hstack([const, own, other]))
    f = ((restricted.rss - unrestricted.rss) / lag) / (unrestricted.rss / df2)
    p = float(stats.f.sf(f, lag, df2))
    return GrangerResult(cause, effect, lag, float(f), p, (lag, df2))
