"""
Residual diagnostics for VAR / VECM systems (Lutkepohl 2005, ch. 4.4-4.5).

* adjusted portmanteau (multivariate Ljung-Box) test for autocorrelation,
* multivariate Jarque-Bera test on Cholesky-standardised residuals,
* multivariate ARCH-LM test on vech(u_t u_t').

Every statistic is built from scale-free quantities, so multiplying all
residuals by a positive constant leaves it unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import InsufficientDataError, NotPositiveDefiniteError


@dataclass(frozen=True)
class DiagnosticStat:
    statistic: float
    df: int
    p_value: float
    lags: int = 0


@dataclass(frozen=True)
class DiagnosticReport:
    portmanteau: DiagnosticStat
    jarque_bera: DiagnosticStat
    arch: DiagnosticStat

    @property
    def portmanteau_p(self) -> float:
        return self.portmanteau.p_value

    @property
    def jarque_bera_p(self) -> float:
        return self.jarque_bera.p_value

    @property
    def arch_p(self) -> float:
        return self.arch.p_value

    @property
    def lags_used(self) -> dict:
        return {"portmanteau": self.portmanteau.lags, "arch": self.arch.lags}


def _matrix(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    return u


def portmanteau_statistic(u, h: int) -> float:
    """Q*_h = T^2 sum_j tr(C_j' C_0^-1 C_j C_0^-1) / (T - j)."""
    u = _matrix(u)
    T = u.shape[0]
    C0 = u.T @ u / T
    try:
        C0_inv = np.linalg.inv(np.linalg.cholesky(C0))
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("residual covariance is singular") from None
    C0_inv = C0_inv.T @ C0_inv
    q = 0.0
    for j in range(1, h + 1):
        Cj = u[j:].T @ u[:-j] / T
        q += np.trace(Cj.T @ C0_inv @ Cj @ C0_inv) / (T - j)
    return float(T * T * q)


def portmanteau(u, h: int = 10, lag_order: int = 0) -> DiagnosticStat:
    """
    Adjusted portmanteau test up to lag ``h``.

    ``lag_order`` is the VAR order in levels of the model that produced
    ``u``; the chi-square reference has k^2 (h - lag_order) degrees of freedom.
    """
    u = _matrix(u)
    T, k = u.shape
    if h <= lag_order:
        raise ValueError(f"horizon h={h} must exceed the model lag order {lag_order}")
    if T <= h + 1:
        raise InsufficientDataError(f"portmanteau horizon {h} too large for {T} residuals")
    stat = portmanteau_statistic(u, h)
    df = k * k * (h - lag_order)
    return DiagnosticStat(stat, df, float(stats.chi2.sf(stat, df)), h)


def jarque_bera_statistic(u) -> tuple:
    """Skewness and kurtosis components of the multivariate JB statistic."""
    u = _matrix(u)
    T, k = u.shape
    u = u - u.mean(axis=0)
    sigma = u.T @ u / T
    try:
        L = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("residual covariance is singular") from None
    w = np.linalg.solve(L, u.T).T
    b1 = np.mean(w ** 3, axis=0)
    b2 = np.mean(w ** 4, axis=0)
    skew = T * float(b1 @ b1) / 6.0
    kurt = T * float((b2 - 3.0) @ (b2 - 3.0)) / 24.0
    return skew, kurt


def jarque_bera(u) -> DiagnosticStat:
    u = _matrix(u)
    if u.shape[0] < 3:
        raise InsufficientDataError("Jarque-Bera needs at least 3 residual rows")
    skew, kurt = jarque_bera_statistic(u)
    stat = skew + kurt
    df = 2 * u.shape[1]
    return DiagnosticStat(stat, df, float(stats.chi2.sf(stat, df)), 0)


def _vech_products(u: np.ndarray) -> np.ndarray:
    k = u.shape[1]
    rows, cols = np.tril_indices(k)
    return u[:, rows] * u[:, cols]


def arch_lm(u, q: int = 5) -> DiagnosticStat:
    """
    Multivariate ARCH-LM test with ``q`` lags.

    Regresses vech(u_t u_t') on a constant and its own ``q`` lags;
    LM = n K (K+1) R2_m / 2 with R2_m = 1 - 2/(K(K+1)) tr(Omega Omega_0^-1),
    chi-square with q K^2 (K+1)^2 / 4 degrees of freedom. When the lag
    regressors outnumber the observations the minimum-norm fit is exact,
    R2_m = 1 and the statistic saturates.
    """
    u = _matrix(u)
    T, k = u.shape
    if q < 1:
        raise ValueError("q must be at least 1")
    u = u - u.mean(axis=0)
    v = _vech_products(u)
    m = v.shape[1]
    n = T - q
    if n < 2:
        raise InsufficientDataError(f"ARCH-LM with q={q} needs more than {q + 1} residual rows")
    Y = v[q:]
    X = np.hstack([np.ones((n, 1))] + [v[q - j: T - j] for j in range(1, q + 1)])
    coef, *_ = np.linalg.lstsq(X, Y, rcond=None)
    e = Y - X @ coef
    Yc = Y - Y.mean(axis=0)
    omega = e.T @ e / n
    omega0 = Yc.T @ Yc / n
    try:
        ratio = np.trace(np.linalg.solve(omega0, omega.T).T)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("vech products have a singular covariance") from None
    r2m = 1.0 - ratio / m
    stat = 0.5 * n * k * (k + 1) * r2m
    df = q * m * m
    return DiagnosticStat(float(stat), df, float(stats.chi2.sf(stat, df)), q)


def diagnose(model, h: int = 10, arch_lags: int = 5) -> DiagnosticReport:
    """All three tests on a fitted VarModel or VecmModel."""
    u = model.residuals
    lag_order = getattr(model, "p_levels", None) or model.p
    return DiagnosticReport(
        portmanteau=portmanteau(u, h, lag_order),
        jarque_bera=jarque_bera(u),
        arch=arch_lm(u, arch_lags),
    )
