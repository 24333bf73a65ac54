"""Davies-Bouldin index and the k sweep used to pick the cluster count."""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import CoincidentBarycenters, DietRiskError, DimensionMismatch, TooFewClusters
from .kmeans import Clustering, KMeansConfig, fit_kmeans
from .numerics import _frozen, as_matrix
from .rng import derive_seed


@dataclass(frozen=True)
class DbBreakdown:
    barycenters: np.ndarray
    per_cluster_dispersion: np.ndarray  # mean member distance to barycenter
    barycenter_distances: np.ndarray  # k x k, zero diagonal
    per_cluster_M: np.ndarray  # worst-case similarity ratio per cluster
    db_index: float


@dataclass(frozen=True)
class SweepEntry:
    k: int
    db_index: Optional[float]
    inertia: Optional[float]
    seed: int
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class KSweepResult:
    entries: tuple
    k_range: tuple
    suggested_k: Optional[int]
    clusterings: dict

    def curve(self) -> list[tuple[int, float]]:
        return [(e.k, e.db_index) for e in self.entries if e.ok]


def davies_bouldin(points, assignments) -> DbBreakdown:
    """Davies-Bouldin index with all intermediate quantities.

    ``assignments`` may be a :class:`Clustering` or a plain label vector.
    Barycenters are recomputed from the labels, never taken from centroids.
    Labels must be 0..k-1 with every cluster non-empty.
    """
    x = as_matrix(points, "points")
    labels = np.asarray(
        assignments.assignments if isinstance(assignments, Clustering) else assignments,
        dtype=np.intp,
    )
    if labels.shape != (len(x),):
        raise DimensionMismatch("one label per point is required")
    k = int(labels.max()) + 1 if labels.size else 0
    if isinstance(assignments, Clustering):
        k = assignments.k
    if k < 2:
        raise TooFewClusters(f"Davies-Bouldin needs at least 2 clusters, got {k}")
    counts = np.bincount(labels, minlength=k)
    if np.any(counts == 0) or labels.min() < 0:
        raise TooFewClusters(f"empty clusters: {np.flatnonzero(counts == 0).tolist()}")

    bary = np.zeros((k, x.shape[1]))
    np.add.at(bary, labels, x)
    bary /= counts[:, None]

    dist_to_bary = np.sqrt(np.sum((x - bary[labels]) ** 2, axis=1))
    delta = np.bincount(labels, weights=dist_to_bary, minlength=k) / counts

    diff = bary[:, None, :] - bary[None, :, :]
    big_delta = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(big_delta, 0.0)
    off = ~np.eye(k, dtype=bool)
    if np.any(big_delta[off] == 0.0):
        a, b = np.argwhere((big_delta == 0.0) & off)[0]
        raise CoincidentBarycenters(int(a), int(b))

    ratios = np.full((k, k), -np.inf)
    ratios[off] = ((delta[:, None] + delta[None, :])[off]) / big_delta[off]
    m = ratios.max(axis=1)
    return DbBreakdown(
        barycenters=_frozen(bary),
        per_cluster_dispersion=_frozen(delta),
        barycenter_distances=_frozen(big_delta),
        per_cluster_M=_frozen(m),
        db_index=float(m.mean()),
    )


def suggest_k(ks, values) -> Optional[int]:
    """k at the largest discrete second difference of the DB curve.

    A heuristic stand-in for reading the elbow off a plot; ``None`` when
    fewer than three consecutive points are available. Ties go to the smaller k.
    """
    ks = list(ks)
    vals = np.asarray(values, dtype=np.float64)
    if len(ks) < 3:
        return None
    second = vals[:-2] - 2.0 * vals[1:-1] + vals[2:]
    return int(ks[1 + int(np.argmax(second))])


def sweep_k(points, k_min: int, k_max: int, base_config: KMeansConfig) -> KSweepResult:
    """Fit K-Means and score it with Davies-Bouldin for every k in [k_min, k_max].

    Each k gets its own seed derived from ``(base_config.seed, k)``. A failing
    k is kept as an entry with ``error`` set; the suggestion is computed over
    the longest run of consecutive successful entries containing the most
    points (first such run on ties).
    """
    x = as_matrix(points, "points")
    if not 2 <= k_min <= k_max <= len(x):
        raise TooFewClusters(f"need 2 <= k_min <= k_max <= {len(x)}, got [{k_min}, {k_max}]")
    entries = []
    clusterings = {}
    for k in range(k_min, k_max + 1):
        seed = derive_seed(base_config.seed, k)
        try:
            cl = fit_kmeans(x, replace(base_config, k=k, seed=seed))
            db = davies_bouldin(x, cl).db_index
        except DietRiskError as exc:
            entries.append(SweepEntry(k, None, None, seed, f"{type(exc).__name__}: {exc}"))
            continue
        clusterings[k] = cl
        entries.append(SweepEntry(k, db, cl.inertia, seed))

    best_run, run = [], []
    for e in entries:
        if e.ok:
            run.append(e)
            if len(run) > len(best_run):
                best_run = list(run)
        else:
            run = []
    suggested = suggest_k([e.k for e in best_run], [e.db_index for e in best_run])
    return KSweepResult(
        entries=tuple(entries),
        k_range=(k_min, k_max),
        suggested_k=suggested,
        clusterings=clusterings,
    )
