"""
Vector error-correction models estimated by reduced-rank (Johansen) ML.

The short-run system is

    dy_t = alpha * beta' z_{t-1} + sum_j Gamma_j dy_{t-j} + mu + e_t

where ``z_{t-1}`` is ``y_{t-1}`` stacked with the restricted
deterministic term (1 or t) when there is one. ``beta`` is reported in
Phillips form: its leading r x r block (under the chosen variable
ordering) is the identity, so ECT i is normalised on variable i.
Given beta, alpha, Gamma and mu come from equation-by-equation OLS,
which reproduces the ML residuals exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import stats

from .errors import InsufficientDataError, NormalizationError, RankError
from .johansen import (
    JohansenResult,
    build_regressors,
    eigen_problem,
    johansen_test,
    parse_det_case,
)
from .linreg import LOG_2PI, gaussian_loglik, log_det_pd, multi_ols


def significance_stars(p: float) -> str:
    """``***`` < 0.1%, ``**`` < 1%, ``*`` < 5%, ``.`` < 10%."""
    if not np.isfinite(p):
        return ""
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    if p < 0.10:
        return "."
    return ""


@dataclass(frozen=True)
class CoefficientTable:
    """Per-equation estimates; arrays are (n_equations, n_regressors)."""

    equations: list
    regressors: list
    estimate: np.ndarray
    std_error: np.ndarray
    t_stat: np.ndarray
    p_value: np.ndarray

    def rows(self):
        for i, eq in enumerate(self.equations):
            for j, reg in enumerate(self.regressors):
                yield (
                    eq,
                    reg,
                    float(self.estimate[i, j]),
                    float(self.std_error[i, j]),
                    float(self.t_stat[i, j]),
                    float(self.p_value[i, j]),
                    significance_stars(self.p_value[i, j]),
                )

    def get(self, equation: str, regressor: str) -> tuple:
        i = self.equations.index(equation)
        j = self.regressors.index(regressor)
        return float(self.estimate[i, j]), float(self.p_value[i, j])


@dataclass(frozen=True)
class VecmModel:
    k: int
    p_diff: int
    r: int
    alpha: np.ndarray  # (k, r)
    beta: np.ndarray  # (k or k+1, r)
    gamma: np.ndarray  # (p_diff, k, k)
    intercepts: np.ndarray  # (k,) implied constant in the dy equations
    trend: np.ndarray  # (k,) coefficient on the 0-based row index t
    residuals: np.ndarray  # (T - p_diff - 1, k)
    sigma: np.ndarray
    log_likelihood: float
    ect_series: np.ndarray  # (T - p_diff - 1, r): beta' z_{t-1}
    variable_names: list
    det_case: str
    ordering: list
    coefficients: CoefficientTable = field(repr=False)
    johansen: JohansenResult = field(repr=False)
    data: np.ndarray = field(repr=False)
    time_index: np.ndarray = field(repr=False)

    @property
    def p_levels(self) -> int:
        return self.p_diff + 1

    @property
    def n_obs(self) -> int:
        return self.residuals.shape[0]

    @property
    def beta_levels(self) -> np.ndarray:
        """Rows of beta that load on the k variables."""
        return self.beta[: self.k]

    @property
    def pi(self) -> np.ndarray:
        return self.alpha @ self.beta_levels.T

    @property
    def pi_full(self) -> np.ndarray:
        return self.alpha @ self.beta.T

    @property
    def beta_deterministic_names(self) -> list:
        return {"restricted_constant": ["const"], "restricted_trend": ["trend"]}.get(
            self.det_case, []
        )

    def regressors(self):
        """(Z0, Z1, Z2) for the estimation sample."""
        return build_regressors(self.data, self.p_levels, self.det_case)

    def ect(self, y: Optional[np.ndarray] = None) -> np.ndarray:
        """Error-correction terms beta' z_{t-1} recomputed from levels."""
        y = self.data if y is None else np.asarray(y, dtype=float)
        _, Z1, _ = build_regressors(y, self.p_levels, self.det_case)
        return Z1 @ self.beta

    def fitted(self) -> np.ndarray:
        """One-step fitted values of dy on the estimation sample."""
        Z0, _, _ = self.regressors()
        return Z0 - self.residuals

    @property
    def aic(self) -> float:
        n_params = self.coefficients.estimate.size
        return -2.0 * self.log_likelihood + 2.0 * n_params


@dataclass(frozen=True)
class WeakExogeneityResult:
    variable: str
    lr_statistic: float
    p_value: float
    df: int
    restricted_log_likelihood: float
    unrestricted_log_likelihood: float

    @property
    def weakly_exogenous_at_10pct(self) -> bool:
        return self.p_value >= 0.10

    def weakly_exogenous(self, level: float = 0.10) -> bool:
        return self.p_value >= level


@dataclass(frozen=True)
class LongRunVector:
    coefficients: dict  # variable (and deterministic term) -> coefficient
    normalization_variable: str

    def equation(self, digits: int = 4) -> str:
        """Presentation form ``x = c1*y + c2*z`` with right-hand signs reversed."""
        terms = []
        for name, c in self.coefficients.items():
            if name == self.normalization_variable or c == 0.0:
                continue
            terms.append(f"{-c:+.{digits}f}*{name}")
        rhs = " ".join(terms) if terms else "0"
        if rhs.startswith("+"):
            rhs = rhs[1:]
        return f"{self.normalization_variable} = {rhs}"


def _phillips(beta_raw: np.ndarray, perm: Sequence[int], r: int) -> np.ndarray:
    block = beta_raw[list(perm[:r])]
    if abs(np.linalg.det(block)) < 1e-12 * max(1.0, np.abs(block).max() ** r):
        raise NormalizationError("leading block of beta is singular")
    return beta_raw @ np.linalg.inv(block)


def _workable_ordering(beta: np.ndarray, names: list, r: int) -> list:
    k = len(names)
    for combo in itertools.combinations(range(k), r):
        block = beta[list(combo)]
        if abs(np.linalg.det(block)) > 1e-8:
            rest = [i for i in range(k) if i not in combo]
            return [names[i] for i in list(combo) + rest]
    return []


def _lag_names(names, p_diff):
    return [f"d({n})(-{j})" for j in range(1, p_diff + 1) for n in names]


def _fit_array(
    y: np.ndarray,
    names: list,
    p_levels: int,
    r: int,
    det_case: str,
    time_index=None,
    ordering: Optional[Sequence[str]] = None,
    johansen: Optional[JohansenResult] = None,
) -> VecmModel:
    T, k = y.shape
    if p_levels < 1:
        raise ValueError("p_levels must be at least 1")
    if r == 0:
        raise RankError(
            "cointegrating rank 0: no error-correction term; fit a VAR in differences instead"
        )
    if r >= k:
        raise RankError(f"rank {r} = k: the system is stationary; fit a VAR in levels instead")
    if r < 0:
        raise RankError("rank must be positive")
    if johansen is None:
        johansen = johansen_test(y, p_levels, det_case)
    ordering = list(names if ordering is None else ordering)
    if sorted(ordering) != sorted(names):
        raise ValueError(f"ordering {ordering} is not a permutation of {names}")
    perm = [names.index(n) for n in ordering]
    beta_raw = johansen.eigenvectors[:, :r]
    try:
        beta = _phillips(beta_raw, perm, r)
    except NormalizationError:
        workable = _workable_ordering(beta_raw[:k], names, r)
        raise NormalizationError(
            f"cannot normalise beta on {ordering[:r]}; try ordering {workable}"
        ) from None
    for i, row in enumerate(perm[:r]):
        # exact identity block after normalisation
        beta[row] = 0.0
        beta[row, i] = 1.0

    Z0, Z1, Z2 = build_regressors(y, p_levels, det_case)
    ect = Z1 @ beta
    X = np.hstack([ect, Z2])
    n = X.shape[0]
    if n <= X.shape[1]:
        raise InsufficientDataError(
            f"VECM with k={k}, p={p_levels}, r={r} has {X.shape[1]} regressors for {n} observations"
        )
    fit = multi_ols(Z0, X)
    coef = fit.coefficients  # (m, k)
    p_diff = p_levels - 1
    alpha = coef[:r].T.copy()
    gamma = np.stack([coef[r + j * k: r + (j + 1) * k].T for j in range(p_diff)]) if p_diff else np.zeros((0, k, k))
    const = np.zeros(k)
    trend = np.zeros(k)
    if det_case in ("unrestricted_constant", "restricted_trend"):
        const = coef[r + p_diff * k].copy()
    if det_case == "restricted_constant":
        const = alpha @ beta[k]
    if det_case == "restricted_trend":
        trend = alpha @ beta[k]
    sigma = fit.sigma_ml
    loglik = gaussian_loglik(sigma, n)

    reg_names = [f"ECT{i + 1}" for i in range(r)] + _lag_names(names, p_diff)
    if det_case in ("unrestricted_constant", "restricted_trend"):
        reg_names.append("const")
    t_stats = fit.t_stats.T
    df = n - X.shape[1]
    p_values = 2.0 * stats.t.sf(np.abs(t_stats), df)
    table = CoefficientTable(
        equations=[f"d({nm})" for nm in names],
        regressors=reg_names,
        estimate=coef.T.copy(),
        std_error=fit.std_errors.T.copy(),
        t_stat=t_stats,
        p_value=p_values,
    )
    if time_index is None:
        time_index = np.arange(T)
    return VecmModel(
        k=k,
        p_diff=p_diff,
        r=r,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        intercepts=const,
        trend=trend,
        residuals=fit.residuals,
        sigma=sigma,
        log_likelihood=loglik,
        ect_series=ect,
        variable_names=list(names),
        det_case=det_case,
        ordering=ordering,
        coefficients=table,
        johansen=johansen,
        data=y,
        time_index=np.asarray(time_index),
    )


def fit_vecm(
    d,
    p_levels: int = 2,
    r: int = 1,
    det_case: str = "restricted_constant",
    ordering: Optional[Sequence[str]] = None,
) -> VecmModel:
    """
    Estimate a rank-``r`` VECM with ``p_levels - 1`` lagged differences.

    Parameters
    ----------
    d : Dataset
        Levels of the k series.
    p_levels : int
        Lag order of the underlying VAR in levels.
    r : int
        Cointegrating rank, 0 < r < k.
    det_case : str
        See :mod:`vecmkit.johansen`.
    ordering : sequence of str, optional
        Variable order used for the Phillips normalisation of beta;
        defaults to the dataset order.
    """
    det_case = parse_det_case(det_case)
    return _fit_array(d.matrix, list(d.names), p_levels, r, det_case, d.time_index, ordering)


def unrestricted_log_likelihood(m: VecmModel) -> float:
    """Concentrated ML log-likelihood from the Johansen eigenvalues."""
    rr = m.johansen.rr
    return -0.5 * rr.n_obs * (
        m.k * LOG_2PI + m.k + log_det_pd(rr.S00) + float(np.sum(np.log1p(-rr.eigenvalues[: m.r])))
    )


def alpha_restriction_test(m: VecmModel, A: np.ndarray, label: str = "") -> WeakExogeneityResult:
    """
    Likelihood-ratio test of alpha = A psi for a k x s matrix ``A``.

    Restricted estimation conditions on B' dy_t, where B spans the
    orthogonal complement of A, and solves the reduced eigenproblem.
    The statistic is chi-square with r (k - s) degrees of freedom.
    """
    rr = m.johansen.rr
    k, r = m.k, m.r
    A = np.asarray(A, dtype=float).reshape(k, -1)
    s = A.shape[1]
    if s < r:
        raise ValueError(f"restriction leaves {s} free rows for rank {r}")
    Q, _ = np.linalg.qr(A, mode="complete")
    A_o = Q[:, :s]
    B = Q[:, s:]
    S00, S01, S11 = rr.S00, rr.S01, rr.S11
    n = rr.n_obs
    S_aa = A_o.T @ S00 @ A_o
    S_a1 = A_o.T @ S01
    if B.shape[1]:
        S_bb = B.T @ S00 @ B
        S_ab = A_o.T @ S00 @ B
        S_b1 = B.T @ S01
        S_bb_inv = np.linalg.inv(S_bb)
        S_aa_b = S_aa - S_ab @ S_bb_inv @ S_ab.T
        S_a1_b = S_a1 - S_ab @ S_bb_inv @ S_b1
        S_11_b = S11 - S_b1.T @ S_bb_inv @ S_b1
        logdet_b = log_det_pd(S_bb)
    else:
        S_aa_b, S_a1_b, S_11_b = S_aa, S_a1, S11
        logdet_b = 0.0
    lam_r, _ = eigen_problem(S_aa_b, S_a1_b, S_11_b)
    logl_u = unrestricted_log_likelihood(m)
    logl_r = -0.5 * n * (
        k * LOG_2PI + k + logdet_b + log_det_pd(S_aa_b) + float(np.sum(np.log1p(-lam_r[:r])))
    )
    lr = max(2.0 * (logl_u - logl_r), 0.0)
    df = r * (k - s)
    p = float(stats.chi2.sf(lr, df)) if df > 0 else 1.0
    return WeakExogeneityResult(label, lr, p, df, logl_r, logl_u)


def weak_exogeneity_test(m: VecmModel, variable: str) -> WeakExogeneityResult:
    """LR test that ``variable``'s row of alpha is zero (df = r)."""
    if variable not in m.variable_names:
        raise KeyError(f"{variable!r} is not in the model ({m.variable_names})")
    i = m.variable_names.index(variable)
    A = np.delete(np.eye(m.k), i, axis=1)
    return alpha_restriction_test(m, A, label=variable)


def normalize_long_run(m: VecmModel, ordering: Optional[Sequence[str]] = None) -> list:
    """
    Phillips-normalised cointegrating vectors under ``ordering``.

    Vector i has coefficient 1 on ``ordering[i]`` and 0 on the other
    leading variables. Deterministic rows of beta are carried along.
    """
    names = m.variable_names
    ordering = list(names if ordering is None else ordering)
    if sorted(ordering) != sorted(names):
        raise ValueError(f"ordering {ordering} is not a permutation of {names}")
    if m.r < 1:
        raise RankError("no cointegrating vectors to normalise")
    perm = [names.index(n) for n in ordering]
    try:
        beta = _phillips(m.beta, perm, m.r)
    except NormalizationError:
        workable = _workable_ordering(m.beta_levels, names, m.r)
        raise NormalizationError(
            f"cannot normalise on {ordering[: m.r]}; try ordering {workable}"
        ) from None
    labels = list(names) + m.beta_deterministic_names
    vectors = []
    for i in range(m.r):
        coefs = {}
        for name in ordering + m.beta_deterministic_names:
            row = labels.index(name)
            value = float(beta[row, i])
            if name in ordering[: m.r]:
                value = 1.0 if name == ordering[i] else 0.0
            coefs[name] = value
        vectors.append(LongRunVector(coefs, ordering[i]))
    return vectors


def renormalized(m: VecmModel, ordering: Sequence[str]) -> VecmModel:
    """Same model with beta in Phillips form under another ordering."""
    return _fit_array(
        m.data, m.variable_names, m.p_levels, m.r, m.det_case, m.time_index, ordering, m.johansen
    )


class SubsetChain(NamedTuple):
    lag_selection: object
    johansen: JohansenResult
    model: VecmModel


def restrict_to_subset(
    d,
    keep: Sequence[str],
    max_lag: int = 3,
    det_case: str = "restricted_constant",
    p_levels: Optional[int] = None,
    rank: Optional[int] = None,
) -> SubsetChain:
    """
    Re-run lag selection, Johansen and VECM estimation on ``keep``.

    ``p_levels`` and ``rank`` default to the recommended lag and the
    trace-test rank of the reduced system.
    """
    from .varmodel import select_lag_order

    keep = list(keep)
    if len(keep) < 2:
        raise ValueError("keep at least two variables")
    missing = [n for n in keep if n not in d]
    if missing:
        raise KeyError(f"variables not in dataset: {missing}")
    sub = d.select(keep)
    selection = select_lag_order(sub, max_lag)
    p = selection.recommended if p_levels is None else p_levels
    jo = johansen_test(sub, p, det_case)
    r = jo.decided_rank if rank is None else rank
    model = _fit_array(sub.matrix, keep, p, r, parse_det_case(det_case), sub.time_index, None, jo)
    return SubsetChain(selection, jo, model)
