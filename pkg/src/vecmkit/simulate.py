"""
Seeded data-generating processes.

All draws come from ``numpy.random.default_rng(seed)`` (PCG64) and the
innovations are Gaussian. The generator identity is part of the fixture
contract: changing it changes every simulated dataset.

Kinds and parameters (``k`` defaults to the size implied by the
coefficients, or 1):

``white_noise``  k, sigma (scalar s.d. or k x k covariance), mean
``random_walk``  k, sigma, y0; the cumulative sum of the white noise
                 drawn with the same seed
``ar1``          phi (scalar or length-k), c, sigma; needs |phi| < 1
``var``          A (list of k x k lag matrices), c, sigma; needs the
                 companion spectral radius below 1
``vecm``         alpha, beta (k x r), r, gamma (list of k x k), c, sigma
``arch1``        omega > 0, a in [0, 1), k
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dataset import Dataset
from .errors import SpecError

KINDS = ("white_noise", "random_walk", "ar1", "var", "vecm", "arch1")
STATIONARY = {"white_noise", "ar1", "var", "arch1"}
DEFAULT_BURN_IN = 200


@dataclass(frozen=True)
class DgpSpec:
    kind: str
    params: dict = field(default_factory=dict)
    T: int = 100
    burn_in: Optional[int] = None
    seed: int = 0

    @property
    def effective_burn_in(self) -> int:
        """
        Explicit value, else 200 for ar1/var/arch1 and 0 otherwise.

        White noise has no memory to wash out, so it gets 0 too; that keeps
        ``random_walk`` equal to the cumulative sum of ``white_noise``.
        """
        if self.burn_in is not None:
            return self.burn_in
        return DEFAULT_BURN_IN if self.kind in {"ar1", "var", "arch1"} else 0


def _covariance(sigma, k: int) -> np.ndarray:
    s = np.asarray(1.0 if sigma is None else sigma, dtype=float)
    if s.ndim == 0:
        if s <= 0:
            raise SpecError("sigma must be positive")
        return np.eye(k) * float(s) ** 2
    if s.shape != (k, k):
        raise SpecError(f"sigma must be a scalar or a {k}x{k} covariance")
    try:
        np.linalg.cholesky(s)
    except np.linalg.LinAlgError:
        raise SpecError("sigma is not positive definite") from None
    return s


def _innovations(rng, n: int, k: int, sigma) -> np.ndarray:
    L = np.linalg.cholesky(_covariance(sigma, k))
    return rng.standard_normal((n, k)) @ L.T


def _vector(value, k: int, name: str) -> np.ndarray:
    v = np.asarray(0.0 if value is None else value, dtype=float)
    if v.ndim == 0:
        return np.full(k, float(v))
    if v.shape != (k,):
        raise SpecError(f"{name} must be a scalar or have length {k}")
    return v


def _lag_matrices(A, k: Optional[int], name: str) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim == 2:
        A = A[None]
    if A.ndim != 3 or A.shape[1] != A.shape[2] or (k is not None and A.shape[1] != k):
        raise SpecError(f"{name} must be a list of square matrices")
    return A


def _spectral_radius(A: np.ndarray) -> float:
    p, k, _ = A.shape
    F = np.zeros((k * p, k * p))
    F[:k] = np.hstack(list(A))
    if p > 1:
        F[k:, :-k] = np.eye(k * (p - 1))
    return float(np.max(np.abs(np.linalg.eigvals(F))))


def _recurse(A: np.ndarray, c: np.ndarray, e: np.ndarray) -> np.ndarray:
    p, k, _ = A.shape
    n = e.shape[0]
    y = np.zeros((n + p, k))
    for t in range(p, n + p):
        acc = c + e[t - p]
        for j in range(p):
            acc = acc + A[j] @ y[t - 1 - j]
        y[t] = acc
    return y[p:]


def _white_noise(rng, prm, n):
    k = int(prm.get("k", 1))
    return _vector(prm.get("mean"), k, "mean") + _innovations(rng, n, k, prm.get("sigma"))


def _random_walk(rng, prm, n):
    k = int(prm.get("k", 1))
    e = _innovations(rng, n, k, prm.get("sigma"))
    return _vector(prm.get("y0"), k, "y0") + np.cumsum(e, axis=0)


def _ar1(rng, prm, n):
    phi = np.atleast_1d(np.asarray(prm.get("phi", 0.5), dtype=float))
    k = int(prm.get("k", phi.size))
    phi = _vector(phi if phi.size > 1 else phi[0], k, "phi")
    if np.any(np.abs(phi) >= 1.0):
        raise SpecError(f"ar1 needs |phi| < 1, got {phi.tolist()}")
    A = np.diag(phi)[None]
    c = _vector(prm.get("c"), k, "c")
    return _recurse(A, c, _innovations(rng, n, k, prm.get("sigma")))


def _var(rng, prm, n):
    if "A" not in prm:
        raise SpecError("var needs lag matrices A")
    A = _lag_matrices(prm["A"], None, "A")
    k = A.shape[1]
    rho = _spectral_radius(A)
    if rho >= 1.0:
        raise SpecError(f"var is not stationary: spectral radius {rho:.6g}")
    c = _vector(prm.get("c"), k, "c")
    return _recurse(A, c, _innovations(rng, n, k, prm.get("sigma")))


def _vecm(rng, prm, n):
    try:
        alpha = np.atleast_2d(np.asarray(prm["alpha"], dtype=float))
        beta = np.atleast_2d(np.asarray(prm["beta"], dtype=float))
    except KeyError as exc:
        raise SpecError(f"vecm needs {exc.args[0]}") from None
    # 1-D inputs are single columns
    if beta.shape[0] == 1 and beta.shape[1] > 1:
        beta = beta.T
    if alpha.shape[0] == 1 and alpha.shape[1] > 1 and beta.shape[0] > 1:
        alpha = alpha.T
    if alpha.shape != beta.shape:
        raise SpecError(f"alpha {alpha.shape} and beta {beta.shape} must both be k x r")
    k, r_cols = alpha.shape
    r = int(prm.get("r", r_cols))
    pi = alpha @ beta.T
    if np.linalg.matrix_rank(pi) != r or r_cols != r or not 0 < r < k:
        raise SpecError(f"rank(alpha beta') must equal the declared r={r} with 0 < r < k={k}")
    adj = np.eye(r) + beta.T @ alpha
    if np.max(np.abs(np.linalg.eigvals(adj))) >= 1.0:
        raise SpecError("I + beta'alpha has an eigenvalue outside the unit circle")
    gamma = prm.get("gamma")
    G = _lag_matrices(gamma, k, "gamma") if gamma is not None and len(gamma) else np.zeros((0, k, k))
    c = _vector(prm.get("c"), k, "c")
    # levels form: A1 = I + Pi + G1, Aj = Gj - Gj-1, Ap = -Gp-1
    p = G.shape[0] + 1
    A = np.zeros((p, k, k))
    A[0] = np.eye(k) + pi
    if p > 1:
        A[0] += G[0]
        for j in range(1, p - 1):
            A[j] = G[j] - G[j - 1]
        A[p - 1] = -G[p - 2]
    return _recurse(A, c, _innovations(rng, n, k, prm.get("sigma")))


def _arch1(rng, prm, n):
    omega = float(prm.get("omega", 1.0))
    a = float(prm.get("a", 0.5))
    k = int(prm.get("k", 1))
    if omega <= 0 or not 0.0 <= a < 1.0:
        raise SpecError(f"arch1 needs omega > 0 and 0 <= a < 1, got omega={omega}, a={a}")
    z = rng.standard_normal((n, k))
    e = np.zeros((n, k))
    prev = np.full(k, np.sqrt(omega / (1.0 - a)))
    for t in range(n):
        e[t] = np.sqrt(omega + a * prev ** 2) * z[t]
        prev = e[t]
    return e


_GENERATORS = {
    "white_noise": _white_noise,
    "random_walk": _random_walk,
    "ar1": _ar1,
    "var": _var,
    "vecm": _vecm,
    "arch1": _arch1,
}


def generate(spec: DgpSpec) -> Dataset:
    """
    Draw a dataset named ``y1 .. yk`` indexed 1..T (or ``params['start']``).

    Raises
    ------
    SpecError
        Unknown kind, bad shapes, or parameters violating the kind's
        stationarity / rank requirements.
    """
    if spec.kind not in _GENERATORS:
        raise SpecError(f"unknown kind {spec.kind!r}; expected one of {KINDS}")
    if spec.T < 1:
        raise SpecError("T must be positive")
    burn = spec.effective_burn_in
    if burn < 0:
        raise SpecError("burn_in must be non-negative")
    if not 0 <= int(spec.seed) < 2 ** 64:
        raise SpecError("seed must be a 64-bit unsigned integer")
    rng = np.random.default_rng(int(spec.seed))
    y = _GENERATORS[spec.kind](rng, dict(spec.params), spec.T + burn)[burn:]
    if not np.all(np.isfinite(y)):
        raise SpecError("simulated path is not finite")
    k = y.shape[1]
    start = int(spec.params.get("start", 1))
    names = [f"y{i + 1}" for i in range(k)]
    return Dataset.from_matrix(names, np.arange(start, start + spec.T), y)
