"""
Johansen reduced-rank regression and cointegration rank tests.

Deterministic cases (``det_case``):

``none``
    no deterministic terms anywhere.
``unrestricted_constant``
    constant in the short-run equations (linear trend in levels).
``restricted_constant``
    constant only inside the cointegrating relations (default).
``restricted_trend``
    unrestricted constant plus a trend inside the cointegrating relations.

Critical values are static tables indexed by k - r (1..11 or 1..12).
The two restricted cases use Osterwald-Lenum (1992) Tables 1* and 2*;
the other two use MacKinnon, Haug & Michelis (1999).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InsufficientDataError,
    NotPositiveDefiniteError,
    UnsupportedDimensionError,
)
from .linreg import residualize

DET_CASES = ("none", "unrestricted_constant", "restricted_constant", "restricted_trend")

# columns: 10%, 5%, 1%; rows: k - r = 1, 2, ...
_CV = {
    "restricted_constant": {
        "eigen": [
            (7.52, 9.24, 12.97), (13.75, 15.67, 20.20), (19.77, 22.00, 26.81),
            (25.56, 28.14, 33.24), (31.66, 34.40, 39.79), (37.45, 40.30, 46.82),
            (43.25, 46.45, 51.91), (48.91, 52.00, 57.95), (54.35, 57.42, 63.71),
            (60.25, 63.57, 69.94), (66.02, 69.74, 76.63),
        ],
        "trace": [
            (7.52, 9.24, 12.97), (17.85, 19.96, 24.60), (32.00, 34.91, 41.07),
            (49.65, 53.12, 60.16), (71.86, 76.07, 84.45), (97.18, 102.14, 111.01),
            (126.58, 131.70, 143.09), (159.48, 165.58, 177.20), (196.37, 202.92, 215.74),
            (236.54, 244.15, 257.68), (282.45, 291.40, 307.64),
        ],
    },
    "restricted_trend": {
        "eigen": [
            (10.49, 12.25, 16.26), (16.85, 18.96, 23.65), (23.11, 25.54, 30.34),
            (29.12, 31.46, 36.65), (34.75, 37.52, 42.36), (40.91, 43.97, 49.51),
            (46.32, 49.42, 54.71), (52.16, 55.50, 62.46), (57.87, 61.29, 67.88),
            (63.18, 66.23, 73.73), (69.26, 72.72, 79.23),
        ],
        "trace": [
            (10.49, 12.25, 16.26), (22.76, 25.32, 30.45), (39.06, 42.44, 48.45),
            (59.14, 62.99, 70.05), (83.20, 87.31, 96.58), (110.42, 114.90, 124.75),
            (141.01, 146.76, 158.49), (176.67, 182.82, 196.08), (215.17, 222.21, 234.41),
            (256.72, 263.42, 279.07), (303.13, 310.81, 327.45),
        ],
    },
    "none": {
        "eigen": [
            (2.9762, 4.1296, 6.9406), (9.4748, 11.2246, 15.0923),
            (15.7175, 17.7961, 22.2519), (21.8370, 24.1592, 29.0609),
            (27.9160, 30.4428, 35.7359), (33.9271, 36.6301, 42.2333),
            (39.9085, 42.7679, 48.6606), (45.8930, 48.8795, 55.0335),
            (51.8528, 54.9629, 61.3449), (57.7954, 61.0404, 67.6415),
            (63.7248, 67.0756, 73.8856), (69.6513, 73.0946, 80.0937),
        ],
        "trace": [
            (2.9762, 4.1296, 6.9406), (10.4741, 12.3212, 16.3640),
            (21.7781, 24.2761, 29.5147), (37.0339, 40.1749, 46.5716),
            (56.2839, 60.0627, 67.6367), (79.5329, 83.9383, 92.7136),
            (106.7351, 111.7797, 121.7375), (137.9954, 143.6691, 154.7977),
            (173.2292, 179.5199, 191.8122), (212.4721, 219.4051, 232.8291),
            (255.6732, 263.2603, 277.9962), (302.9054, 311.1288, 326.9716),
        ],
    },
    "unrestricted_constant": {
        "eigen": [
            (2.7055, 3.8415, 6.6349), (12.2971, 14.2639, 18.5200),
            (18.8928, 21.1314, 25.8650), (25.1236, 27.5858, 32.7172),
            (31.2379, 33.8777, 39.3693), (37.2786, 40.0763, 45.8662),
            (43.2947, 46.2299, 52.3069), (49.2855, 52.3622, 58.6634),
            (55.2412, 58.4332, 64.9960), (61.2041, 64.5040, 71.2525),
            (67.1307, 70.5392, 77.4877), (73.0563, 76.5734, 83.7105),
        ],
        "trace": [
            (2.7055, 3.8415, 6.6349), (13.4294, 15.4943, 19.9349),
            (27.0669, 29.7961, 35.4628), (44.4929, 47.8545, 54.6815),
            (65.8202, 69.8189, 77.8202), (91.1090, 95.7542, 104.9637),
            (120.3673, 125.6185, 135.9825), (153.6341, 159.5290, 171.0905),
            (190.8714, 197.3772, 210.0366), (232.1030, 239.2468, 253.2526),
            (277.3740, 285.1402, 300.2821), (326.5354, 334.9795, 351.2150),
        ],
    },
}

_LEVEL_COLUMN = {"10%": 0, "5%": 1, "1%": 2}


_STAT_GRID_BITS = 32


def parse_det_case(det_case) -> str:
    value = str(det_case).strip().lower().replace("-", "_").replace(" ", "_")
    aliases = {
        "const": "restricted_constant",
        "constant": "restricted_constant",
        "rc": "restricted_constant",
        "uc": "unrestricted_constant",
        "rt": "restricted_trend",
        "trend": "restricted_trend",
        "nc": "none",
    }
    value = aliases.get(value, value)
    if value not in DET_CASES:
        raise ValueError(f"unknown deterministic case {det_case!r}; choose from {DET_CASES}")
    return value


def critical_value(det_case: str, statistic: str, dim: int, level: str = "5%") -> float:
    """Tabulated critical value for ``k - r = dim``."""
    table = _CV[parse_det_case(det_case)][statistic]
    if not 1 <= dim <= len(table):
        raise UnsupportedDimensionError(
            f"no {statistic} critical values for k - r = {dim} (table covers 1..{len(table)})"
        )
    return table[dim - 1][_LEVEL_COLUMN[level]]


def max_table_dimension(det_case: str) -> int:
    return len(_CV[parse_det_case(det_case)]["trace"])


def eigen_problem(S00, S01, S11):
    """
    Solve |lambda S11 - S10 S00^-1 S01| = 0 by Cholesky reduction of S11.

    Returns
    -------
    eigenvalues : ndarray
        Sorted in decreasing order, clipped to [0, 1).
    eigenvectors : ndarray
        Columns ``v`` normalised so that ``V' S11 V = I``.
    """
    S00 = np.asarray(S00, dtype=float)
    S01 = np.asarray(S01, dtype=float)
    S11 = np.asarray(S11, dtype=float)
    try:
        L = np.linalg.cholesky(S11)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("S11 is not positive definite") from None
    try:
        L0 = np.linalg.cholesky(S00)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("S00 is not positive definite") from None
    # C = L^-1 S10 S00^-1 S01 L^-T written as W'W with W = L0^-1 S01 L^-T
    W = np.linalg.solve(L0, np.linalg.solve(L, S01.T).T)
    C = W.T @ W
    vals, vecs = np.linalg.eigh((C + C.T) / 2.0)
    order = np.argsort(vals)[::-1]
    vals = np.clip(vals[order], 0.0, np.nextafter(1.0, 0.0))
    V = np.linalg.solve(L.T, vecs[:, order])
    return vals, V


@dataclass(frozen=True)
class ReducedRank:
    """Moment matrices of the concentrated Johansen regression."""

    S00: np.ndarray
    S01: np.ndarray
    S11: np.ndarray
    R0: np.ndarray
    R1: np.ndarray
    Z2: np.ndarray
    n_obs: int
    k: int
    p: int
    det_case: str
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def build_regressors(y: np.ndarray, p: int, det_case: str):
    """
    Levels ``y`` (T x k) to (Z0, Z1, Z2) for t = p .. T-1 (0-based).

    Z0 = dy_t, Z1 = y_{t-1} (+ 1 or t when restricted), Z2 = lagged
    differences dy_{t-1} .. dy_{t-p+1} (+ 1 when unrestricted).
    """
    T, k = y.shape
    dy = np.diff(y, axis=0)  # dy[i] = y[i+1] - y[i]
    t = np.arange(p, T)
    Z0 = dy[t - 1]
    Z1 = [y[t - 1]]
    if det_case == "restricted_constant":
        Z1.append(np.ones((len(t), 1)))
    elif det_case == "restricted_trend":
        Z1.append(t.astype(float)[:, None])
    Z2 = [dy[t - 1 - j] for j in range(1, p)]
    if det_case in ("unrestricted_constant", "restricted_trend"):
        Z2.append(np.ones((len(t), 1)))
    Z1 = np.hstack(Z1)
    Z2 = np.hstack(Z2) if Z2 else np.empty((len(t), 0))
    return Z0, Z1, Z2


def reduced_rank(y: np.ndarray, p: int, det_case: str = "restricted_constant") -> ReducedRank:
    y = np.asarray(y, dtype=float)
    det_case = parse_det_case(det_case)
    if p < 1:
        raise ValueError("VAR lag order p must be at least 1")
    T, k = y.shape
    if T - p <= k * p + 1:
        raise InsufficientDataError(
            f"Johansen test with k={k}, p={p} needs more than {k * p + 1 + p} observations (T={T})"
        )
    Z0, Z1, Z2 = build_regressors(y, p, det_case)
    R0 = residualize(Z0, Z2)
    R1 = residualize(Z1, Z2)
    n = R0.shape[0]
    S00 = R0.T @ R0 / n
    S01 = R0.T @ R1 / n
    S11 = R1.T @ R1 / n
    vals, vecs = eigen_problem(S00, S01, S11)
    return ReducedRank(S00, S01, S11, R0, R1, Z2, n, k, p, det_case, vals[:k], vecs[:, :k])


@dataclass(frozen=True)
class JohansenResult:
    eigenvalues: np.ndarray
    eigen_stats: np.ndarray
    trace_stats: np.ndarray
    eigen_critical: np.ndarray  # (k, 3): 10%, 5%, 1%
    trace_critical: np.ndarray
    decided_rank: int
    lags: int
    det_case: str
    eigenvectors: np.ndarray
    n_obs: int
    variable_names: list
    rr: ReducedRank = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.eigenvalues)

    @property
    def critical_values_5pct(self) -> list:
        """``[(eigen_cv, trace_cv), ...]`` for r = 0 .. k-1."""
        return [(float(e), float(t)) for e, t in zip(self.eigen_critical[:, 1], self.trace_critical[:, 1])]

    def rank_by(self, statistic: str = "trace", level: str = "5%") -> int:
        stats = self.trace_stats if statistic == "trace" else self.eigen_stats
        crit = (self.trace_critical if statistic == "trace" else self.eigen_critical)[
            :, _LEVEL_COLUMN[level]
        ]
        for r in range(self.k):
            if not stats[r] > crit[r]:
                return r
        return self.k


def johansen_test(d, p: int = 2, det_case: str = "restricted_constant", level: str = "5%") -> JohansenResult:
    """
    Trace and maximum-eigenvalue tests for the cointegrating rank.

    ``p`` is the lag order of the VAR in levels. The rank decision uses
    the trace statistics: the smallest r whose null is not rejected.
    """
    y = d.matrix if hasattr(d, "matrix") else np.asarray(d, dtype=float)
    names = list(d.names) if hasattr(d, "names") else [f"y{i + 1}" for i in range(y.shape[1])]
    det_case = parse_det_case(det_case)
    k = y.shape[1]
    if k < 2:
        raise ValueError("Johansen test needs at least two series")
    if k > max_table_dimension(det_case):
        raise UnsupportedDimensionError(
            f"k={k} exceeds the {det_case} critical-value table ({max_table_dimension(det_case)})"
        )
    rr = reduced_rank(y, p, det_case)
    lam = rr.eigenvalues
    n = rr.n_obs
    log1m = np.log1p(-lam)
    # snap to a 2**-32 grid: sums and differences of grid values are exact in
    # float64, so trace[r] - eigen[r] - trace[r+1] is 0 in any evaluation order
    eigen_stats = np.ldexp(np.round(np.ldexp(-n * log1m, _STAT_GRID_BITS)), -_STAT_GRID_BITS)
    trace_stats = np.empty(k)
    acc = 0.0
    for r in range(k - 1, -1, -1):
        acc = acc + eigen_stats[r]
        trace_stats[r] = acc
    eig_cv = np.array([_CV[det_case]["eigen"][k - r - 1] for r in range(k)])
    tr_cv = np.array([_CV[det_case]["trace"][k - r - 1] for r in range(k)])
    result = JohansenResult(
        eigenvalues=lam,
        eigen_stats=eigen_stats,
        trace_stats=trace_stats,
        eigen_critical=eig_cv,
        trace_critical=tr_cv,
        decided_rank=0,
        lags=p,
        det_case=det_case,
        eigenvectors=rr.eigenvectors,
        n_obs=n,
        variable_names=names,
        rr=rr,
    )
    object.__setattr__(result, "decided_rank", result.rank_by("trace", level))
    return result
