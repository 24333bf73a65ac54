"""Timing of the pieces that dominate a run, on the 170 x 94 synthetic data."""

import tempfile
import time

import numpy as np

from dietrisk.config import RunConfig
from dietrisk.kmeans import KMeansConfig, fit_kmeans
from dietrisk.numerics import symmetric_eigen
from dietrisk.pca import fit_pca, transform
from dietrisk.pipeline import report as rpt
from dietrisk.synthetic import write_synthetic_dataset


def timed(label, fn, repeat=1):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    print(f"{label:40s} {best:8.3f} s")
    return out


def main():
    rng = np.random.default_rng(0)
    b = rng.normal(size=(94, 94))
    timed("jacobi eigen 94x94", lambda: symmetric_eigen(b + b.T), repeat=5)

    with tempfile.TemporaryDirectory() as tmp:
        write_synthetic_dataset(tmp)
        cfg = RunConfig(data_dir=tmp, out_dir=f"{tmp}/out", k=20, accept_suggested_k=True,
                        threshold_quantile=0.85)
        _, matrix, _, _ = rpt.load_and_clean(cfg)
        model = timed("pca fit 170x94", lambda: fit_pca(matrix, 0.95), repeat=3)
        reduced = transform(model, matrix)
        timed("kmeans k=20, 32 restarts", lambda: fit_kmeans(reduced, KMeansConfig(k=20)), repeat=3)
        timed("full run (sweep 2..30)", lambda: rpt.run_full(cfg))


if __name__ == "__main__":
    main()
