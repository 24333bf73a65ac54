"""Dense-matrix primitives: z-scoring, sample covariance and a Jacobi eigensolver.

Matrices are plain 2-D ``float64`` numpy arrays. Arrays stored on the result
dataclasses are flagged read-only so the values can be shared freely.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConstantColumn,
    DimensionMismatch,
    EmptyInput,
    NoConvergence,
    NonFiniteInput,
    NotSymmetric,
)

SYMMETRY_TOL = 1e-10
DEFAULT_MAX_SWEEPS = 100


def as_matrix(data, name="data") -> np.ndarray:
    """Coerce ``data`` to a finite 2-D float64 array (copied)."""
    a = np.array(data, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteInput(f"{name} contains NaN or Inf")
    return a


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StandardizationParams:
    means: np.ndarray
    stds: np.ndarray

    def apply(self, data) -> np.ndarray:
        x = as_matrix(data)
        if x.shape[1] != self.means.shape[0]:
            raise DimensionMismatch(
                f"expected {self.means.shape[0]} columns, got {x.shape[1]}"
            )
        return (x - self.means) / self.stds

    def invert(self, z) -> np.ndarray:
        return as_matrix(z) * self.stds + self.means


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # column j pairs with eigenvalues[j]
    residual: float
    sweeps: int


def standardize(data) -> tuple[np.ndarray, StandardizationParams]:
    """Z-score every column using the sample standard deviation (n - 1)."""
    x = as_matrix(data)
    n = x.shape[0]
    if n < 2:
        raise EmptyInput(n)
    mu = x.mean(axis=0)
    sigma = x.std(axis=0, ddof=1)
    for j, s in enumerate(sigma):
        # relative test: float noise on a constant column is not real spread
        if s == 0.0 or s <= 1e-14 * max(abs(mu[j]), 1e-300):
            raise ConstantColumn(j)
    z = (x - mu) / sigma
    return z, StandardizationParams(_frozen(mu), _frozen(sigma))


def covariance_matrix(data) -> np.ndarray:
    """Sample covariance of the columns of ``data`` (divisor n - 1), exactly symmetric."""
    x = as_matrix(data)
    n = x.shape[0]
    if n < 2:
        raise EmptyInput(n)
    centered = x - x.mean(axis=0)
    c = centered.T @ centered / (n - 1)
    return (c + c.T) / 2.0


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Circle-method schedule: n-1 rounds (n even) of disjoint index pairs covering all pairs once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def symmetric_eigen(a, tolerance=None, max_sweeps=DEFAULT_MAX_SWEEPS) -> EigenDecomposition:
    """All eigenpairs of a real symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every (p, q) pair once, in a round-robin order that
    rotates disjoint pairs together. Iteration stops when the Frobenius norm
    of the off-diagonal part drops to ``tolerance`` (default
    ``1e-12 * ||a||_F``). Eigenvalues come back in descending order; each
    eigenvector is signed so its largest-magnitude entry is positive.
    """
    a = as_matrix(a, "a")
    n, m = a.shape
    if n != m:
        raise NotSymmetric(f"matrix is not square: {a.shape}")
    scale = max(float(np.max(np.abs(a))) if a.size else 0.0, 1.0)
    if np.max(np.abs(a - a.T), initial=0.0) > SYMMETRY_TOL * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-10")
    a = (a + a.T) / 2.0
    original = a.copy()
    if tolerance is None:
        tolerance = 1e-12 * float(np.linalg.norm(a))

    v = np.eye(n)
    schedule = _round_robin(n) if n > 1 else []
    sweeps = 0
    off = _off_norm(a)
    while off > tolerance:
        if sweeps >= max_sweeps:
            raise NoConvergence(max_sweeps, off)
        for p, q in schedule:
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            with np.errstate(over="ignore"):
                # tiny apq overflows theta to inf, which correctly yields t = 0
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            # A <- J^T A J with J = [[c, s], [-s, c]] on each (p, q) plane
            rp, rq = a[p, :], a[q, :]
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p], a[:, q]
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p], v[:, q]
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
        sweeps += 1
        off = _off_norm(a)

    lam = np.diag(a).copy()
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    v = v[:, order]
    if n:
        pivots = np.argmax(np.abs(v), axis=0)
        signs = np.where(v[pivots, np.arange(n)] < 0.0, -1.0, 1.0)
        v = v * signs
    return EigenDecomposition(
        eigenvalues=_frozen(lam),
        eigenvectors=_frozen(v),
        residual=eigen_residual(original, lam, v),
        sweeps=sweeps,
    )


def eigen_residual(a, eigenvalues, eigenvectors) -> float:
    """max_j ||A v_j - lambda_j v_j||_inf."""
    a = np.asarray(a, dtype=np.float64)
    if a.size == 0:
        return 0.0
    r = a @ eigenvectors - eigenvectors * eigenvalues
    return float(np.max(np.abs(r)))
