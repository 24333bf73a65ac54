"""End-to-end orchestration and the report / plot-data writers.

Output files (under the run's ``out_dir``):

    report.json              full structured report
    fig1_db_vs_k.csv         k, db_index, inertia, seed, error
    fig2_cluster_sizes.csv   cluster, size, label
    fig3_cluster_q3.csv      cluster, q3_death_metric, threshold, label
    fig4_category_groups.csv feature, highlighted, high/low mean and std, counts
    fig5_health_groups.csv   variable, high/low mean and std, counts
    pca_spectrum.csv         component, eigenvalue, explained_ratio, cumulative_ratio
    clusters.csv             country, cluster, label
"""

import csv
import json
import math
from contextlib import contextmanager
from pathlib import Path

from .. import __version__
from ..config import RunConfig
from ..errors import ConfigError, DietRiskError
from ..kmeans import fit_kmeans
from ..pca import explained_variance_ratios
from ..validity import davies_bouldin, sweep_k
from .analysis import (
    HIGHLIGHT_CATEGORIES,
    QUANTILE_RULE,
    cluster_size_stats,
    compare_groups,
    label_clusters,
    run_reduction,
    top_deaths_overlap,
)
from .dataset import clean, load_dataset, read_country_list

REPORT_FILE = "report.json"
FIG1 = "fig1_db_vs_k.csv"
FIG2 = "fig2_cluster_sizes.csv"
FIG3 = "fig3_cluster_q3.csv"
FIG4 = "fig4_category_groups.csv"
FIG5 = "fig5_health_groups.csv"
SPECTRUM = "pca_spectrum.csv"
CLUSTERS = "clusters.csv"


@contextmanager
def stage(name: str):
    """Tag any toolkit error escaping the block with the pipeline stage it came from."""
    try:
        yield
    except DietRiskError as exc:
        if not hasattr(exc, "stage"):
            exc.stage = name
        raise


def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _header(cfg: RunConfig, command: str) -> dict:
    return {"tool": "dietrisk", "version": __version__, "command": command, "config": cfg.to_dict()}


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])


# stages


def load_and_clean(cfg: RunConfig):
    with stage("load"):
        paths = cfg.input_paths()
        table = load_dataset(
            paths["fat_csv"], paths["kg_csv"], paths["kcal_csv"], paths["protein_csv"],
            kcal_reference=cfg.kcal_reference,
        )
    with stage("clean"):
        matrix, countries, cleaning = clean(table, cfg.cleaning_policy())
    return table, matrix, countries, cleaning


def dataset_section(table, matrix, cleaning) -> dict:
    return {
        "n_countries": len(table),
        "n_features": len(table.feature_names),
        "columns_per_source": dict(table.columns_per_source),
        "join": table.join_report.to_dict(),
        "n_rows_clean": int(matrix.shape[0]),
        "n_features_clean": int(matrix.shape[1]),
        "cleaning": cleaning.to_dict(),
    }


def pca_section(model, reduction) -> dict:
    ratios = explained_variance_ratios(model)
    return {
        "n_features_in": reduction.n_features_in,
        "n_components": reduction.n_components,
        "variance_target": reduction.variance_target,
        "explained_ratio": _num(reduction.explained_ratio),
        "percent_reduction": _num(reduction.percent_reduction),
        "eigen_residual": _num(model.residual),
        "eigenvalues": [_num(v) for v in model.eigenvalues],
        "explained_ratios": [_num(v) for v in ratios],
        "cumulative_ratios": [_num(v) for v in model.cumulative_ratios()],
    }


def sweep_section(result) -> dict:
    return {
        "k_min": result.k_range[0],
        "k_max": result.k_range[1],
        "entries": [
            {"k": e.k, "db_index": _num(e.db_index), "inertia": _num(e.inertia), "seed": e.seed, "error": e.error}
            for e in result.entries
        ],
        "suggested_k": result.suggested_k,
        "suggested_k_note": "heuristic: argmax of the discrete second difference of the DB curve",
    }


def validate(cfg: RunConfig) -> dict:
    cfg.check()
    table, matrix, _, cleaning = load_and_clean(cfg)
    report = _header(cfg, "validate")
    report["dataset"] = dataset_section(table, matrix, cleaning)
    return report


def _reduce(cfg, matrix):
    with stage("pca"):
        return run_reduction(matrix, cfg.variance_target)


def run_pca(cfg: RunConfig) -> dict:
    cfg.check()
    table, matrix, _, cleaning = load_and_clean(cfg)
    model, _, reduction = _reduce(cfg, matrix)
    out = _outdir(cfg)
    _write_spectrum(out, model)
    report = _header(cfg, "pca")
    report["dataset"] = dataset_section(table, matrix, cleaning)
    report["pca"] = pca_section(model, reduction)
    write_json(out / REPORT_FILE, report)
    return report


def run_sweep(cfg: RunConfig):
    cfg.check()
    table, matrix, _, cleaning = load_and_clean(cfg)
    model, reduced, reduction = _reduce(cfg, matrix)
    with stage("sweep"):
        k_max = min(cfg.k_max, len(reduced))
        if k_max < cfg.k_min:
            raise ConfigError(f"only {len(reduced)} countries; cannot sweep from k={cfg.k_min}")
        result = sweep_k(reduced, cfg.k_min, k_max, cfg.kmeans_config(cfg.k_min))
    out = _outdir(cfg)
    _write_fig1(out, result)
    report = _header(cfg, "sweep")
    report["dataset"] = dataset_section(table, matrix, cleaning)
    report["pca"] = pca_section(model, reduction)
    report["sweep"] = sweep_section(result)
    write_json(out / REPORT_FILE, report)
    return report, result


def clustering_section(cfg, clustering, points, countries, k_source) -> dict:
    mean, std = cluster_size_stats(clustering)
    db = None
    if clustering.k >= 2:
        with stage("validity"):
            db = davies_bouldin(points, clustering).db_index
    return {
        "k": clustering.k,
        "k_source": k_source,
        "init": cfg.init,
        "restarts": cfg.restarts,
        "seed": cfg.seed,
        "seed_used": clustering.seed_used,
        "restart_index": clustering.restart_index,
        "inertia": _num(clustering.inertia),
        "iterations_run": clustering.iterations_run,
        "converged": clustering.converged,
        "davies_bouldin": _num(db),
        "sizes": [int(s) for s in clustering.sizes()],
        "size_mean": _num(mean),
        "size_std": _num(std),
        "members": [
            [countries[i] for i in clustering.members(c)] for c in range(clustering.k)
        ],
    }


def run_cluster(cfg: RunConfig) -> dict:
    """PCA + a single K-Means fit at ``cfg.k`` (stage-wise debugging)."""
    cfg.check()
    if cfg.k is None:
        raise ConfigError("cluster needs an explicit --k")
    table, matrix, countries, cleaning = load_and_clean(cfg)
    model, reduced, reduction = _reduce(cfg, matrix)
    with stage("kmeans"):
        clustering = fit_kmeans(reduced, cfg.kmeans_config(cfg.k))
    out = _outdir(cfg)
    report = _header(cfg, "cluster")
    report["dataset"] = dataset_section(table, matrix, cleaning)
    report["pca"] = pca_section(model, reduction)
    report["clustering"] = clustering_section(cfg, clustering, reduced, countries, "explicit")
    _write_fig2(out, clustering, None)
    _write_clusters(out, clustering, countries, None)
    write_json(out / REPORT_FILE, report)
    return report


def run_full(cfg: RunConfig) -> dict:
    """load -> clean -> PCA -> (sweep) -> K-Means -> DB -> label -> compare -> overlap."""
    cfg.check()
    if cfg.k is None and not cfg.accept_suggested_k:
        raise ConfigError(
            "no cluster count: pass --k, or pass --accept-suggested-k to use the sweep heuristic"
        )
    if cfg.threshold is None and cfg.threshold_quantile is None:
        raise ConfigError("no risk threshold: pass --threshold or --threshold-quantile")
    table, matrix, countries, cleaning = load_and_clean(cfg)
    model, reduced, reduction = _reduce(cfg, matrix)

    sweep = None
    k = cfg.k
    k_source = "explicit"
    if cfg.k is None or cfg.accept_suggested_k:
        with stage("sweep"):
            k_max = min(cfg.k_max, len(reduced))
            sweep = sweep_k(reduced, cfg.k_min, k_max, cfg.kmeans_config(cfg.k_min))
        if cfg.k is None:
            if sweep.suggested_k is None:
                raise ConfigError("the sweep produced no suggestion; pass --k explicitly")
            k = sweep.suggested_k
            k_source = "accepted_suggestion"

    with stage("kmeans"):
        clustering = fit_kmeans(reduced, cfg.kmeans_config(k))
    with stage("label"):
        labeling = label_clusters(
            clustering,
            countries,
            table,
            cfg.death_metric,
            cfg.threshold,
            threshold_quantile=cfg.threshold_quantile,
            outcome_missing=cfg.outcome_missing,
        )
    with stage("compare"):
        groups = compare_groups(table, labeling, cfg.cleaning_policy())
    overlap = None
    if cfg.top_deaths is not None:
        with stage("overlap"):
            try:
                top = read_country_list(cfg.top_deaths)
            except OSError as exc:
                raise ConfigError(f"cannot read top-deaths list: {exc}") from None
            overlap = top_deaths_overlap(labeling, top)

    out = _outdir(cfg)
    report = _header(cfg, "run")
    report["dataset"] = dataset_section(table, matrix, cleaning)
    report["pca"] = pca_section(model, reduction)
    report["sweep"] = sweep_section(sweep) if sweep is not None else None
    report["clustering"] = clustering_section(cfg, clustering, reduced, countries, k_source)
    report["labeling"] = labeling_section(labeling)
    report["groups"] = groups_section(groups)
    report["overlap"] = overlap_section(overlap) if overlap is not None else None

    if sweep is not None:
        _write_fig1(out, sweep)
    _write_spectrum(out, model)
    _write_fig2(out, clustering, labeling)
    _write_fig3(out, labeling)
    _write_fig4(out, groups)
    _write_fig5(out, groups)
    _write_clusters(out, clustering, countries, labeling)
    write_json(out / REPORT_FILE, report)
    return report


def labeling_section(lab) -> dict:
    return {
        "death_metric": lab.death_metric,
        "quantile_rule": QUANTILE_RULE,
        "threshold": _num(lab.threshold),
        "threshold_quantile": lab.threshold_quantile,
        "per_cluster_q3": [_num(v) for v in lab.per_cluster_q3],
        "labels": list(lab.labels),
        "high_clusters": list(lab.high_clusters),
        "high_countries": list(lab.high_countries),
        "n_high": len(lab.high_countries),
        "excluded_from_quartiles": list(lab.excluded),
    }


def _stat_dict(s) -> dict:
    return {
        "high_mean": _num(s.high_mean),
        "high_std": _num(s.high_std),
        "low_mean": _num(s.low_mean),
        "low_std": _num(s.low_std),
        "n_high": s.n_high,
        "n_low": s.n_low,
    }


def groups_section(g) -> dict:
    return {
        "n_high": g.n_high,
        "n_low": g.n_low,
        "categories": {s.name: _stat_dict(s) for s in g.categories},
        "obesity": _stat_dict(g.obesity),
        "undernourished": _stat_dict(g.undernourished),
        "kcal": _stat_dict(g.kcal),
        "kcal_relative_difference": _num(g.kcal_relative_difference),
    }


def overlap_section(o) -> dict:
    return {
        "n_high": o.n_high,
        "n_top": o.n_top,
        "count": o.count,
        "fraction": _num(o.fraction),
        "matched": list(o.matched),
        "unmatched_names": list(o.unmatched_names),
    }


# plot data


def _outdir(cfg) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_fig1(out, sweep):
    write_csv(
        out / FIG1,
        ["k", "db_index", "inertia", "seed", "error"],
        [[e.k, _num(e.db_index), _num(e.inertia), e.seed, e.error] for e in sweep.entries],
    )


def _write_spectrum(out, model):
    ratios = explained_variance_ratios(model)
    cum = model.cumulative_ratios()
    write_csv(
        out / SPECTRUM,
        ["component", "eigenvalue", "explained_ratio", "cumulative_ratio"],
        [[j + 1, float(model.eigenvalues[j]), float(ratios[j]), float(cum[j])] for j in range(len(ratios))],
    )


def _write_fig2(out, clustering, labeling):
    sizes = clustering.sizes()
    write_csv(
        out / FIG2,
        ["cluster", "size", "label"],
        [[c, int(sizes[c]), labeling.labels[c] if labeling else None] for c in range(clustering.k)],
    )


def _write_fig3(out, lab):
    write_csv(
        out / FIG3,
        ["cluster", "q3_death_metric", "threshold", "label"],
        [[c, _num(q), float(lab.threshold), lab.labels[c]] for c, q in enumerate(lab.per_cluster_q3)],
    )


def _write_fig4(out, g):
    rows = []
    for s in g.categories:
        source, _, name = s.name.partition(":")
        highlighted = int(source == "kg" and name in HIGHLIGHT_CATEGORIES)
        rows.append([s.name, highlighted, _num(s.high_mean), _num(s.high_std), _num(s.low_mean),
                     _num(s.low_std), s.n_high, s.n_low])
    write_csv(
        out / FIG4,
        ["feature", "highlighted", "high_mean", "high_std", "low_mean", "low_std", "n_high", "n_low"],
        rows,
    )


def _write_fig5(out, g):
    write_csv(
        out / FIG5,
        ["variable", "high_mean", "high_std", "low_mean", "low_std", "n_high", "n_low"],
        [
            [s.name, _num(s.high_mean), _num(s.high_std), _num(s.low_mean), _num(s.low_std), s.n_high, s.n_low]
            for s in (g.obesity, g.undernourished, g.kcal)
        ],
    )


def _write_clusters(out, clustering, countries, labeling):
    write_csv(
        out / CLUSTERS,
        ["country", "cluster", "label"],
        [
            [name, int(c), labeling.labels[int(c)] if labeling else None]
            for name, c in zip(countries, clustering.assignments)
        ],
    )
