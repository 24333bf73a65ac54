"""Full study on a data directory: k sweep, k=20 clustering, risk labels, group comparison.

    python3 scripts/reproduce_study.py --data-dir data --out-dir out/study \
        [--kcal-reference kcal.csv] [--top-deaths top30.txt]

Prints the headline numbers and leaves report.json plus the plot-data CSVs in
the output directory.
"""

import argparse
import json
from pathlib import Path

from dietrisk.config import RunConfig
from dietrisk.pipeline import report as rpt


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--data-dir", required=True)
    ap.add_argument("--out-dir", default="out/study")
    ap.add_argument("--kcal-reference")
    ap.add_argument("--top-deaths")
    ap.add_argument("--k", type=int, default=20)
    ap.add_argument("--threshold-quantile", type=float, default=0.85)
    ap.add_argument("--seed", type=int)
    args = ap.parse_args()

    cfg = RunConfig(
        data_dir=args.data_dir, out_dir=args.out_dir, kcal_reference=args.kcal_reference,
        top_deaths=args.top_deaths, k=args.k, accept_suggested_k=True, threshold_quantile=args.threshold_quantile,
    )
    if args.seed is not None:
        cfg.seed = args.seed
    report = rpt.run_full(cfg)

    p, c, lab, g = report["pca"], report["clustering"], report["labeling"], report["groups"]
    print(f"features {p['n_features_in']} -> components {p['n_components']} "
          f"({p['percent_reduction']:.2f}% reduction, explained {p['explained_ratio']:.4f})")
    print(f"DB sweep suggestion: {report['sweep']['suggested_k']}  (used k={c['k']})")
    print(f"cluster size mean {c['size_mean']:.2f}, sd {c['size_std']:.2f}")
    print(f"high-risk: {lab['n_high']} countries in clusters {lab['high_clusters']}")
    if g["kcal"]["high_mean"] is not None and g["kcal"]["low_mean"] is not None:
        print(f"kcal/day high {g['kcal']['high_mean']:.1f} vs low {g['kcal']['low_mean']:.1f} "
              f"(relative difference {100 * g['kcal_relative_difference']:+.2f}%)")
    if report["overlap"] is not None:
        o = report["overlap"]
        print(f"top-deaths overlap {o['count']}/{o['n_high']} = {100 * o['fraction']:.2f}%")
    (Path(args.out_dir) / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
