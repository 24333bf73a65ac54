"""Command-line front end.

    dietrisk validate --data-dir DATA
    dietrisk pca      --data-dir DATA --out-dir out
    dietrisk sweep    --data-dir DATA --k-min 2 --k-max 30 --out-dir out
    dietrisk cluster  --data-dir DATA --k 20 --out-dir out
    dietrisk run      --data-dir DATA --k 20 --threshold-quantile 0.85 --out-dir out

Settings come from ``--config FILE`` (YAML or JSON) first; flags given on the
command line override it. Exit codes: 0 ok, 2 configuration, 3 data
(schema/parse/join), 4 numerical failure.
"""

import argparse
import logging
import sys

from .config import RunConfig
from .errors import ConfigError, DataError, DietRiskError, NumericalError
from .pipeline import report as rpt

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

log = logging.getLogger("dietrisk")


def _add_common(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    g = p.add_argument_group("inputs")
    g.add_argument("--config", default=None, help="YAML/JSON file with RunConfig fields")
    g.add_argument("--data-dir", dest="data_dir", default=S, help="directory holding the four standard CSV files")
    g.add_argument("--fat-csv", dest="fat_csv", default=S)
    g.add_argument("--kg-csv", dest="kg_csv", default=S)
    g.add_argument("--kcal-csv", dest="kcal_csv", default=S)
    g.add_argument("--protein-csv", dest="protein_csv", default=S)
    g.add_argument("--kcal-reference", dest="kcal_reference", default=S, help="CSV with Country,KcalPerDay")
    g.add_argument("--top-deaths", dest="top_deaths", default=S, help="country list, one per line")
    g.add_argument("--out-dir", dest="out_dir", default=S)

    g = p.add_argument_group("analysis")
    g.add_argument("--variance-target", dest="variance_target", type=float, default=S)
    g.add_argument("--k", type=int, default=S)
    g.add_argument("--k-min", dest="k_min", type=int, default=S)
    g.add_argument("--k-max", dest="k_max", type=int, default=S)
    g.add_argument("--accept-suggested-k", dest="accept_suggested_k", action="store_true", default=S)
    g.add_argument("--seed", type=int, default=S)
    g.add_argument("--restarts", type=int, default=S)
    g.add_argument("--max-iterations", dest="max_iterations", type=int, default=S)
    g.add_argument("--init", choices=["random_points", "kmeanspp"], default=S)
    g.add_argument("--death-metric", dest="death_metric",
                   choices=["deaths_over_confirmed", "deaths_over_population"], default=S)
    g.add_argument("--threshold", type=float, default=S)
    g.add_argument("--threshold-quantile", dest="threshold_quantile", type=float, default=S)
    g.add_argument("--food-missing", dest="food_missing", choices=["impute_mean", "drop_rows"], default=S)
    g.add_argument("--censored", choices=["midpoint", "bound"], default=S)
    g.add_argument("--outcome-missing", dest="outcome_missing", choices=["exclude", "error"], default=S)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dietrisk", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("validate", "check schemas and the join; dry-run cleaning"),
        ("pca", "fit PCA and write the spectrum"),
        ("sweep", "Davies-Bouldin k sweep (plot data + heuristic suggestion)"),
        ("cluster", "PCA + one K-Means fit at --k"),
        ("run", "full pipeline: report and all plot data"),
    ]:
        _add_common(sub.add_parser(name, help=help_))
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
    base = RunConfig.from_file(args.config).to_dict() if args.config else {}
    base.update(overrides)
    return RunConfig.from_dict(base)


def _exit_code(exc: DietRiskError) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, DataError):
        return EXIT_DATA
    if isinstance(exc, NumericalError):
        return EXIT_NUMERIC
    return EXIT_NUMERIC


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")
    try:
        cfg = resolve_config(args)
        if args.command == "validate":
            report = rpt.validate(cfg)
            ds = report["dataset"]
            print(f"{ds['n_countries']} countries, {ds['n_features']} food features "
                  f"({ds['n_rows_clean']} x {ds['n_features_clean']} after cleaning)")
            for source, names in ds["join"]["dropped"].items():
                if names:
                    print(f"  missing from {source}: {', '.join(names)}")
            c = ds["cleaning"]
            print(f"  imputed values: {len(c['imputed'])}, dropped rows: {len(c['dropped_rows'])}, "
                  f"dropped columns: {len(c['dropped_columns'])}, censored values: {len(c['censored'])}")
        elif args.command == "pca":
            report = rpt.run_pca(cfg)
            p = report["pca"]
            print(f"{p['n_features_in']} -> {p['n_components']} components "
                  f"(explained {p['explained_ratio']:.4f}, reduction {p['percent_reduction']:.2f}%)")
        elif args.command == "sweep":
            report, result = rpt.run_sweep(cfg)
            for e in result.entries:
                db = f"{e.db_index:.6f}" if e.ok else f"FAILED ({e.error})"
                print(f"k={e.k:3d}  DB={db}")
            if result.suggested_k is None:
                print("suggested_k: none (need at least 3 points on the curve)")
            else:
                print(f"suggested_k: {result.suggested_k}  [heuristic; confirm or override with --k]")
        elif args.command == "cluster":
            report = rpt.run_cluster(cfg)
            c = report["clustering"]
            print(f"k={c['k']} inertia={c['inertia']:.6f} DB={c['davies_bouldin']} sizes={c['sizes']}")
        else:
            report = rpt.run_full(cfg)
            c, lab = report["clustering"], report["labeling"]
            print(f"PCA: {report['pca']['n_features_in']} -> {report['pca']['n_components']} components")
            print(f"k={c['k']} ({c['k_source']}), mean cluster size {c['size_mean']:.2f} (sd {c['size_std']:.2f})")
            print(f"high-risk clusters {lab['high_clusters']}: {lab['n_high']} countries "
                  f"(threshold {lab['threshold']:.4f} on Q3 of {lab['death_metric']})")
            if report["overlap"] is not None:
                o = report["overlap"]
                print(f"overlap with top list: {o['count']}/{o['n_high']} = {100 * o['fraction']:.2f}%")
            print(f"report written to {cfg.out_dir}/{rpt.REPORT_FILE}")
    except DietRiskError as exc:
        stage = getattr(exc, "stage", args.command)
        print(f"error [{stage}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
