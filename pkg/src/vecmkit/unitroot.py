"""
Augmented Dickey-Fuller and Phillips-Perron unit-root tests.

Both tests are left-tailed t-type statistics compared against the
Dickey-Fuller tau tables (Fuller 1976, as reprinted in Hamilton 1994,
Table B.6), interpolated linearly in 1/T between the tabulated sample
sizes. T is the length of the series handed to the test.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DegenerateError, InsufficientDataError, UnsupportedOrderError
from .linreg import ols


class DeterministicSpec(enum.Enum):
    NONE = "none"
    DRIFT = "drift"
    TREND = "drift+trend"

    @classmethod
    def parse(cls, value) -> "DeterministicSpec":
        if isinstance(value, cls):
            return value
        aliases = {
            "none": cls.NONE,
            "nc": cls.NONE,
            "drift": cls.DRIFT,
            "c": cls.DRIFT,
            "constant": cls.DRIFT,
            "drift+trend": cls.TREND,
            "trend": cls.TREND,
            "ct": cls.TREND,
        }
        try:
            return aliases[str(value).strip().lower()]
        except KeyError:
            raise ValueError(
                f"unknown deterministic spec {value!r}; use none, drift or drift+trend"
            ) from None

    @property
    def n_terms(self) -> int:
        return {"none": 0, "drift": 1, "drift+trend": 2}[self.value]


LEVELS = ("1%", "5%", "10%")

# Sample sizes of the tau table; 0.0 stands for T = infinity in 1/T space.
_TABLE_T = np.array([25, 50, 100, 250, 500, np.inf])
_TAU = {
    DeterministicSpec.NONE: {
        "1%": [-2.66, -2.62, -2.60, -2.58, -2.58, -2.58],
        "5%": [-1.95, -1.95, -1.95, -1.95, -1.95, -1.95],
        "10%": [-1.60, -1.61, -1.61, -1.62, -1.62, -1.62],
    },
    DeterministicSpec.DRIFT: {
        "1%": [-3.75, -3.58, -3.51, -3.46, -3.44, -3.43],
        "5%": [-3.00, -2.93, -2.89, -2.88, -2.87, -2.86],
        "10%": [-2.63, -2.60, -2.58, -2.57, -2.57, -2.57],
    },
    DeterministicSpec.TREND: {
        "1%": [-4.38, -4.15, -4.04, -3.99, -3.98, -3.96],
        "5%": [-3.60, -3.50, -3.45, -3.43, -3.42, -3.41],
        "10%": [-3.24, -3.18, -3.15, -3.13, -3.13, -3.12],
    },
}


def critical_values(n: int, det) -> dict:
    """Tau critical values for a series of length ``n`` (clamped at T=25)."""
    det = DeterministicSpec.parse(det)
    inv = 1.0 / _TABLE_T  # decreasing: 0.04 ... 0.0
    x = min(1.0 / max(n, 1), inv[0])
    out = {}
    for level in LEVELS:
        # np.interp wants increasing abscissae
        out[level] = float(np.interp(x, inv[::-1], np.array(_TAU[det][level])[::-1]))
    return out


@dataclass(frozen=True)
class UnitRootResult:
    test: str
    statistic: float
    critical_values: dict
    lag_or_bandwidth: int
    deterministic: DeterministicSpec
    n_obs: int

    @property
    def reject_at_5pct(self) -> bool:
        return self.statistic < self.critical_values["5%"]

    def reject(self, level: str = "5%") -> bool:
        return self.statistic < self.critical_values[level]


def _values(s) -> np.ndarray:
    v = np.asarray(getattr(s, "values", s), dtype=float)
    if v.ndim != 1:
        raise ValueError("unit-root tests take a single series")
    return v


def _check_variation(y: np.ndarray):
    if np.ptp(y) == 0.0:
        raise DegenerateError("series has zero variance; unit-root regression is degenerate")


def _deterministics(det: DeterministicSpec, n: int, start: int) -> np.ndarray:
    cols = []
    if det in (DeterministicSpec.DRIFT, DeterministicSpec.TREND):
        cols.append(np.ones(n))
    if det is DeterministicSpec.TREND:
        cols.append(np.arange(start, start + n, dtype=float))
    return np.column_stack(cols) if cols else np.empty((n, 0))


def adf_design(y: np.ndarray, lags: int, max_lag: int, det: DeterministicSpec):
    """
    Response and regressors of the ADF regression on the common sample.

    Rows run over t = max_lag + 1 .. T - 1 (0-based), so every candidate
    lag order uses the same observations. Columns are ``y[t-1]``, the
    deterministic terms, then ``dy[t-1] .. dy[t-lags]``.
    """
    dy = np.diff(y)
    n = len(dy) - max_lag
    rows = np.arange(max_lag, len(dy))  # index into dy; dy[i] = y[i+1] - y[i]
    cols = [y[rows]]
    D = _deterministics(det, n, start=max_lag + 1)
    lagged = [dy[rows - j] for j in range(1, lags + 1)]
    X = np.column_stack(cols + [D] + lagged) if (D.size or lagged) else np.column_stack(cols)
    return dy[rows], X


def adf_test(s, det="drift+trend", max_lag: int = 3, lag: Optional[int] = None) -> UnitRootResult:
    """
    Augmented Dickey-Fuller test.

    The lag order is chosen in ``0..max_lag`` by minimum AIC unless ``lag``
    fixes it. All candidate regressions share the sample that the largest
    lag leaves available; the reported statistic comes from that sample.
    """
    y = _values(s)
    det = DeterministicSpec.parse(det)
    if max_lag < 0:
        raise ValueError("max_lag must be non-negative")
    if lag is not None:
        max_lag = max(max_lag, lag)
    n_eff = len(y) - 1 - max_lag
    n_params = 1 + det.n_terms + max_lag
    if len(y) <= max_lag + 2 + det.n_terms or n_eff <= n_params:
        raise InsufficientDataError(
            f"ADF with max_lag={max_lag} and {det.value} needs a longer series (T={len(y)})"
        )
    _check_variation(y)
    if lag is None:
        candidates = range(0, max_lag + 1)
    else:
        candidates = [lag]
    best = None
    for p in candidates:
        dy, X = adf_design(y, p, max_lag, det)
        fit = ols(dy, X)
        if best is None or fit.aic < best[1].aic:
            best = (p, fit)
    p, fit = best
    return UnitRootResult(
        test="ADF",
        statistic=float(fit.t_stats[0]),
        critical_values=critical_values(len(y), det),
        lag_or_bandwidth=p,
        deterministic=det,
        n_obs=fit.n_obs,
    )


def newey_west_bandwidth(n: int) -> int:
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def bartlett_long_run_variance(e: np.ndarray, bandwidth: int) -> float:
    """Bartlett-kernel long-run variance with divisor n (no demeaning)."""
    n = len(e)
    lrv = float(e @ e) / n
    for j in range(1, bandwidth + 1):
        w = 1.0 - j / (bandwidth + 1.0)
        lrv += 2.0 * w * float(e[j:] @ e[:-j]) / n
    return lrv


def pp_test(s, det="drift+trend", bandwidth: Union[int, str, None] = "auto") -> UnitRootResult:
    """
    Phillips-Perron Z-tau test.

    Corrects the lag-0 Dickey-Fuller t-ratio with a Bartlett long-run
    variance. ``bandwidth="auto"`` uses floor(4 (T/100)^(2/9)).
    """
    y = _values(s)
    det = DeterministicSpec.parse(det)
    if len(y) < 10:
        raise InsufficientDataError(f"PP test needs at least 10 observations, got {len(y)}")
    _check_variation(y)
    if bandwidth is None or bandwidth == "auto":
        bandwidth = newey_west_bandwidth(len(y))
    bandwidth = int(bandwidth)
    if bandwidth < 0:
        raise ValueError("bandwidth must be non-negative")
    dy, X = adf_design(y, 0, 0, det)
    fit = ols(dy, X)
    n = fit.n_obs
    e = fit.residuals
    gamma0 = fit.rss / n
    lam2 = bartlett_long_run_variance(e, bandwidth)
    if lam2 <= 0:
        raise DegenerateError("non-positive long-run variance estimate")
    s_reg = math.sqrt(fit.sigma2)
    t_rho = fit.t_stats[0]
    se_rho = fit.std_errors[0]
    lam = math.sqrt(lam2)
    z_t = math.sqrt(gamma0 / lam2) * t_rho - 0.5 * (lam2 - gamma0) / lam * (n * se_rho / s_reg)
    return UnitRootResult(
        test="PP",
        statistic=float(z_t),
        critical_values=critical_values(len(y), det),
        lag_or_bandwidth=bandwidth,
        deterministic=det,
        n_obs=n,
    )


def integration_order(
    s,
    det_level="drift+trend",
    det_diff="drift",
    test: str = "pp",
    max_lag: int = 3,
    bandwidth="auto",
    level: str = "5%",
) -> int:
    """
    0 if the level rejects a unit root at ``level``, 1 if only the first
    difference does. Higher orders are outside this toolkit.
    """
    y = _values(s)
    run = {
        "pp": lambda v, d: pp_test(v, d, bandwidth),
        "adf": lambda v, d: adf_test(v, d, max_lag),
    }[test.lower()]
    if run(y, det_level).reject(level):
        return 0
    if run(np.diff(y), det_diff).reject(level):
        return 1
    name = getattr(s, "name", "series")
    raise UnsupportedOrderError(
        f"{name}: unit root not rejected in levels or first differences; "
        "I(2) or higher is not supported"
    )
