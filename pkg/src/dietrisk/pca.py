"""Principal component analysis on z-scored data via covariance + Jacobi."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidTarget
from .numerics import (
    EigenDecomposition,
    StandardizationParams,
    _frozen,
    covariance_matrix,
    standardize,
    symmetric_eigen,
)

# Eigenvalues within this fraction of the largest are rounding noise of a
# rank-deficient covariance and are reported as exactly zero.
NOISE_FLOOR = 1e-12


@dataclass(frozen=True)
class PcaModel:
    standardization: StandardizationParams
    eigenvalues: np.ndarray  # full spectrum, descending
    components: np.ndarray  # d x k, one principal axis per column
    k: int
    variance_target: float
    explained_ratio_achieved: float
    residual: float

    @property
    def n_features(self) -> int:
        return int(self.standardization.means.shape[0])

    def cumulative_ratios(self) -> np.ndarray:
        return _cumulative(self.eigenvalues)


def _clean_spectrum(lam: np.ndarray) -> np.ndarray:
    lam = lam.copy()
    top = lam[0] if lam.size else 0.0
    lam[np.abs(lam) <= NOISE_FLOOR * max(top, 0.0)] = 0.0
    return lam


def _cumulative(lam: np.ndarray) -> np.ndarray:
    csum = np.cumsum(lam)
    # dividing by the last partial sum makes the final entry exactly 1.0
    return csum / csum[-1]


def select_k(eigenvalues, variance_target: float) -> int:
    """Smallest m with cumulative explained ratio at m >= variance_target."""
    if not 0.0 < variance_target <= 1.0:
        raise InvalidTarget(f"variance_target must be in (0, 1], got {variance_target}")
    cum = _cumulative(np.asarray(eigenvalues, dtype=np.float64))
    return int(np.argmax(cum >= variance_target)) + 1


def fit_pca(data, variance_target: float = 0.95, tolerance=None) -> PcaModel:
    if not 0.0 < variance_target <= 1.0:
        raise InvalidTarget(f"variance_target must be in (0, 1], got {variance_target}")
    z, params = standardize(data)
    cov = covariance_matrix(z)
    eig: EigenDecomposition = symmetric_eigen(cov, tolerance)
    lam = _clean_spectrum(eig.eigenvalues)
    k = select_k(lam, variance_target)
    achieved = float(_cumulative(lam)[k - 1])
    return PcaModel(
        standardization=params,
        eigenvalues=_frozen(lam),
        components=_frozen(eig.eigenvectors[:, :k].copy()),
        k=k,
        variance_target=float(variance_target),
        explained_ratio_achieved=achieved,
        residual=eig.residual,
    )


def transform(model: PcaModel, data) -> np.ndarray:
    """Project rows of ``data`` onto the retained components (rows x k)."""
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != model.n_features:
        raise DimensionMismatch(
            f"model expects {model.n_features} columns, got shape {x.shape}"
        )
    return model.standardization.apply(x) @ model.components


def inverse_transform(model: PcaModel, scores) -> np.ndarray:
    """Map reduced coordinates back to the standardized feature space."""
    s = np.asarray(scores, dtype=np.float64)
    return s @ model.components.T


def explained_variance_ratios(model: PcaModel) -> np.ndarray:
    lam = model.eigenvalues
    return lam / lam.sum()
