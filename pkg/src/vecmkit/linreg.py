"""
Least-squares core used by every test and model in the package.

All fits go through a Householder QR factorisation of the design matrix.
The Gaussian log-likelihood keeps its constant term:

    logL = -n/2 * (ln(2*pi) + ln(rss/n) + 1)

and the system analogue ``-n/2 * (k ln(2 pi) + ln|Sigma| + k)`` with
``Sigma = E'E / n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientDataError,
    NotPositiveDefiniteError,
    SingularDesignError,
)

LOG_2PI = math.log(2.0 * math.pi)
_RANK_TOL = 1e-10


@dataclass(frozen=True)
class OlsFit:
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_stats: np.ndarray
    residuals: np.ndarray
    rss: float
    sigma2: float
    n_obs: int
    n_params: int
    log_likelihood: float

    @property
    def df_resid(self) -> int:
        return self.n_obs - self.n_params

    @property
    def aic(self) -> float:
        return -2.0 * self.log_likelihood + 2.0 * self.n_params


@dataclass(frozen=True)
class MultiOlsFit:
    """Equation-by-equation OLS of several responses on one design."""

    coefficients: np.ndarray  # (n_params, n_eq)
    std_errors: np.ndarray  # (n_params, n_eq)
    residuals: np.ndarray  # (n_obs, n_eq)
    n_obs: int
    n_params: int

    @property
    def t_stats(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.std_errors > 0, self.coefficients / self.std_errors, np.nan)

    @property
    def sigma_ml(self) -> np.ndarray:
        """Residual covariance with divisor n_obs."""
        return self.residuals.T @ self.residuals / self.n_obs


def _qr(X: np.ndarray):
    n, m = X.shape
    if n <= m:
        raise InsufficientDataError(
            f"OLS needs more observations than parameters (n={n}, params={m})"
        )
    Q, R = np.linalg.qr(X, mode="reduced")
    diag = np.abs(np.diag(R))
    # a column is dependent when its component orthogonal to earlier columns vanishes
    col_norms = np.linalg.norm(X, axis=0)
    if m and (
        not np.all(np.isfinite(diag))
        or np.any(col_norms == 0)
        or np.any(diag <= _RANK_TOL * col_norms)
    ):
        raise SingularDesignError(
            f"design matrix ({n}x{m}) is rank deficient or numerically singular"
        )
    return Q, R


def _solve(X: np.ndarray, Y: np.ndarray):
    Q, R = _qr(X)
    coef = np.linalg.solve(R, Q.T @ Y)
    resid = Y - X @ coef
    Rinv = np.linalg.solve(R, np.eye(R.shape[0]))
    # diag((X'X)^-1) = squared row norms of R^-1
    xtx_diag = np.sum(Rinv * Rinv, axis=1)
    return coef, resid, xtx_diag


def ols(y, X) -> OlsFit:
    """
    Ordinary least squares of ``y`` on the columns of ``X``.

    Raises
    ------
    InsufficientDataError
        If ``X`` has no more rows than columns.
    SingularDesignError
        If ``X`` is (numerically) rank deficient.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError(f"shape mismatch: y {y.shape}, X {X.shape}")
    n, m = X.shape
    coef, resid, xtx_diag = _solve(X, y)
    rss = float(resid @ resid)
    sigma2 = rss / (n - m)
    se = np.sqrt(sigma2 * xtx_diag)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, coef / se, np.nan)
    if rss > 0:
        loglik = -0.5 * n * (LOG_2PI + math.log(rss / n) + 1.0)
    else:
        loglik = math.inf
    return OlsFit(coef, se, t, resid, rss, sigma2, n, m, loglik)


def multi_ols(Y, X) -> MultiOlsFit:
    """OLS of every column of ``Y`` on ``X``; standard errors use divisor n - m."""
    Y = np.asarray(Y, dtype=float)
    X = np.asarray(X, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    n, m = X.shape
    coef, resid, xtx_diag = _solve(X, Y)
    sigma2 = np.sum(resid * resid, axis=0) / (n - m)
    se = np.sqrt(np.outer(xtx_diag, sigma2))
    return MultiOlsFit(coef, se, resid, n, m)


def residualize(Y, X):
    """Residuals of ``Y`` after projecting on ``X`` (returns ``Y`` if X has no columns)."""
    Y = np.asarray(Y, dtype=float)
    if X is None or X.shape[1] == 0:
        return Y.copy()
    Q, _ = _qr(X)
    return Y - Q @ (Q.T @ Y)


def log_det_pd(S: np.ndarray) -> float:
    """log|S| via Cholesky; raises if S is not positive definite."""
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("matrix is not positive definite") from None
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def gaussian_loglik(sigma: np.ndarray, n_obs: int) -> float:
    """Concentrated multivariate Gaussian log-likelihood for ML covariance ``sigma``."""
    k = sigma.shape[0]
    return -0.5 * n_obs * (k * LOG_2PI + log_det_pd(sigma) + k)


def info_criteria(sigma, n_obs: int, n_params_per_equation: int, k: int):
    """
    Multivariate information criteria from the ML residual covariance.

    With ``m`` parameters per equation and ``n`` observations::

        AIC = ln|S| + 2 k m / n
        HQ  = ln|S| + 2 ln(ln n) k m / n
        SC  = ln|S| + ln(n) k m / n
        FPE = ((n + m) / (n - m))**k * |S|

    Returns
    -------
    tuple of float
        ``(aic, hq, sc, fpe)``.
    """
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    n, m = n_obs, n_params_per_equation
    if n <= m:
        raise InsufficientDataError(f"n_obs={n} must exceed parameters per equation={m}")
    logdet = log_det_pd(sigma)
    penalty = k * m / n
    aic = logdet + 2.0 * penalty
    hq = logdet + 2.0 * math.log(math.log(n)) * penalty
    sc = logdet + math.log(n) * penalty
    fpe = ((n + m) / (n - m)) ** k * math.exp(logdet)
    return aic, hq, sc, fpe
