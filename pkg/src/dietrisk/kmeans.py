"""Lloyd's K-Means with seeded restarts.

Every restart draws its own generator from ``derive_seed(seed, restart)``, so
the chosen result does not depend on the order restarts are executed in. The
winner is the lowest inertia, ties going to the lowest restart index.
"""

from dataclasses import dataclass, field
from typing import Iterator, Literal

import numpy as np

from .errors import ConfigError, DimensionMismatch, TooFewPoints
from .numerics import _frozen, as_matrix
from .rng import DEFAULT_SEED, derive_seed, make_rng

InitStrategy = Literal["random_points", "kmeanspp"]


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    seed: int = DEFAULT_SEED
    max_iterations: int = 300
    movement_tolerance: float = 1e-9
    restarts: int = 32
    init_strategy: InitStrategy = "random_points"

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.restarts < 1:
            raise ConfigError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.movement_tolerance < 0:
            raise ConfigError("movement_tolerance must be >= 0")
        if self.init_strategy not in ("random_points", "kmeanspp"):
            raise ConfigError(f"unknown init_strategy {self.init_strategy!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class Clustering:
    k: int
    centroids: np.ndarray
    assignments: np.ndarray
    inertia: float
    iterations_run: int
    seed_used: int
    restart_index: int = 0
    converged: bool = True
    inertia_history: tuple = field(default=(), repr=False)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == cluster)


def _sq_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def assign(centroids, points) -> np.ndarray:
    """Index of the nearest centroid (squared Euclidean) per point; ties go to the lowest index."""
    c = as_matrix(centroids, "centroids")
    x = as_matrix(points, "points")
    if c.shape[1] != x.shape[1]:
        raise DimensionMismatch(f"centroids have {c.shape[1]} dims, points have {x.shape[1]}")
    return np.argmin(_sq_distances(x, c), axis=1)


def _sse(points, centroids, labels) -> float:
    d = points - centroids[labels]
    return float(np.sum(d * d))


def inertia(points, clustering: Clustering) -> float:
    x = as_matrix(points, "points")
    if clustering.centroids.shape[1] != x.shape[1] or len(clustering.assignments) != len(x):
        raise DimensionMismatch("points are inconsistent with the clustering")
    return _sse(x, clustering.centroids, clustering.assignments)


def relabel(clustering: Clustering, permutation) -> Clustering:
    """Rename cluster ``i`` to ``permutation[i]``."""
    perm = np.asarray(permutation, dtype=np.intp)
    if sorted(perm.tolist()) != list(range(clustering.k)):
        raise ValueError("permutation must be a rearrangement of range(k)")
    centroids = np.empty_like(clustering.centroids)
    centroids[perm] = clustering.centroids
    return Clustering(
        k=clustering.k,
        centroids=_frozen(centroids),
        assignments=_frozen(perm[clustering.assignments]),
        inertia=clustering.inertia,
        iterations_run=clustering.iterations_run,
        seed_used=clustering.seed_used,
        restart_index=clustering.restart_index,
        converged=clustering.converged,
        inertia_history=clustering.inertia_history,
    )


def _init_centroids(points, k, rng, strategy) -> np.ndarray:
    n = len(points)
    if strategy == "random_points":
        idx = rng.choice(n, size=k, replace=False)
        return points[np.sort(idx)].copy()
    # k-means++: D^2 weighting, restricted to points not yet chosen
    chosen = [int(rng.integers(n))]
    d2 = np.sum((points - points[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        w = d2.copy()
        w[chosen] = 0.0
        total = w.sum()
        if total <= 0.0:
            remaining = np.setdiff1d(np.arange(n), chosen)
            nxt = int(remaining[rng.integers(len(remaining))])
        else:
            nxt = int(rng.choice(n, p=w / total))
        chosen.append(nxt)
        d2 = np.minimum(d2, np.sum((points - points[nxt]) ** 2, axis=1))
    return points[chosen].copy()


def _repair_empty(points, centroids, labels, k):
    """Move each empty cluster's centroid onto the point farthest from its own centroid."""
    counts = np.bincount(labels, minlength=k)
    for j in np.flatnonzero(counts == 0):
        dist = np.sum((points - centroids[labels]) ** 2, axis=1)
        # never strip a cluster of its last point
        dist[counts[labels] <= 1] = -1.0
        i = int(np.argmax(dist))
        counts[labels[i]] -= 1
        labels[i] = j
        counts[j] = 1
        centroids[j] = points[i]
    return centroids, labels


def _means(points, labels, k) -> np.ndarray:
    sums = np.zeros((k, points.shape[1]))
    np.add.at(sums, labels, points)
    counts = np.bincount(labels, minlength=k)
    return sums / counts[:, None]


def run_lloyd(points, k, rng, config: KMeansConfig, restart_index=0, seed_used=0) -> Clustering:
    """One Lloyd run from a fresh initialization drawn from ``rng``."""
    centroids = _init_centroids(points, k, rng, config.init_strategy)
    labels = assign(centroids, points)
    centroids, labels = _repair_empty(points, centroids, labels, k)

    history = []
    converged = False
    it = 0
    for it in range(1, config.max_iterations + 1):
        new_centroids = _means(points, labels, k)
        shift = float(np.max(np.sqrt(np.sum((new_centroids - centroids) ** 2, axis=1))))
        centroids = new_centroids
        history.append(_sse(points, centroids, labels))
        new_labels = assign(centroids, points)
        if np.array_equal(new_labels, labels):
            converged = True
            break
        centroids, new_labels = _repair_empty(points, centroids, new_labels, k)
        labels = new_labels
        if shift <= config.movement_tolerance:
            centroids = _means(points, labels, k)
            history.append(_sse(points, centroids, labels))
            break

    return Clustering(
        k=k,
        centroids=_frozen(centroids),
        assignments=_frozen(labels.astype(np.intp)),
        inertia=_sse(points, centroids, labels),
        iterations_run=it,
        seed_used=seed_used,
        restart_index=restart_index,
        converged=converged,
        inertia_history=tuple(history),
    )


def iter_runs(points, config: KMeansConfig) -> Iterator[Clustering]:
    """Yield every restart's result, in restart order."""
    x = as_matrix(points, "points")
    if len(x) < config.k:
        raise TooFewPoints(f"{len(x)} points cannot form {config.k} clusters")
    for r in range(config.restarts):
        seed = derive_seed(config.seed, r)
        yield run_lloyd(x, config.k, make_rng(seed), config, restart_index=r, seed_used=seed)


def fit_kmeans(points, config: KMeansConfig) -> Clustering:
    best = None
    for run in iter_runs(points, config):
        if best is None or run.inertia < best.inertia:
            best = run
    return best
