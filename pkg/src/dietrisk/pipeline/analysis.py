"""Post-clustering analysis: risk labels, group statistics and overlap with an external list."""

import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from ..errors import ConfigError, EmptyGroup, MissingOutcome
from ..kmeans import Clustering
from ..pca import PcaModel, fit_pca, transform
from .dataset import CleaningPolicy, CountryTable, parse_censored
from .names import normalize_country

DeathMetric = Literal["deaths_over_confirmed", "deaths_over_population"]
QUANTILE_RULE = "linear interpolation between order statistics (Hyndman-Fan type 7)"

# kg-file categories singled out in the group comparison plot data.
HIGHLIGHT_CATEGORIES = (
    "Animal Products",
    "Milk - Excluding Butter",
    "Cereals - Excluding Beer",
    "Sugar & Sweeteners",
    "Meat",
    "Animal fats",
)


def quantile_type7(values: Sequence[float], q: float) -> float:
    """q-quantile by linear interpolation between order statistics."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    xs = sorted(float(v) for v in values)
    if not xs:
        raise ValueError("quantile of an empty sample")
    h = (len(xs) - 1) * q
    lo = math.floor(h)
    hi = min(lo + 1, len(xs) - 1)
    return xs[lo] + (h - lo) * (xs[hi] - xs[lo])


# reduction


@dataclass(frozen=True)
class ReductionReport:
    n_features_in: int
    n_components: int
    variance_target: float
    explained_ratio: float
    percent_reduction: float  # 100 * (d_in - k) / d_in


def run_reduction(matrix, variance_target: float = 0.95):
    """Fit PCA and project; returns ``(model, reduced_points, report)``."""
    model = fit_pca(matrix, variance_target)
    reduced = transform(model, matrix)
    d_in = model.n_features
    report = ReductionReport(
        n_features_in=d_in,
        n_components=model.k,
        variance_target=model.variance_target,
        explained_ratio=model.explained_ratio_achieved,
        percent_reduction=100.0 * (d_in - model.k) / d_in,
    )
    return model, reduced, report


# labeling


def death_metric(record, metric: DeathMetric) -> Optional[float]:
    """Death statistic for one country, in percent; ``None`` when unavailable."""
    if metric == "deaths_over_population":
        return record.deaths
    if metric == "deaths_over_confirmed":
        if record.deaths is None or not record.confirmed:
            return None
        return 100.0 * record.deaths / record.confirmed
    raise ConfigError(f"unknown death metric {metric!r}")


@dataclass(frozen=True)
class RiskLabeling:
    death_metric: str
    per_cluster_q3: tuple  # float or None (no member with an outcome)
    threshold: float
    labels: tuple  # "high" / "low" per cluster
    members: tuple  # country names per cluster
    high_countries: tuple
    excluded: tuple  # countries without a death metric, left out of the quartiles
    threshold_quantile: Optional[float] = None
    quantile_rule: str = QUANTILE_RULE

    @property
    def high_clusters(self) -> tuple:
        return tuple(i for i, lab in enumerate(self.labels) if lab == "high")

    @property
    def low_countries(self) -> tuple:
        high = set(self.high_countries)
        return tuple(c for m in self.members for c in m if c not in high)


def label_clusters(
    clustering: Clustering,
    countries: Sequence[str],
    table: CountryTable,
    metric: DeathMetric = "deaths_over_confirmed",
    threshold: Optional[float] = None,
    *,
    threshold_quantile: Optional[float] = None,
    outcome_missing: Literal["exclude", "error"] = "exclude",
) -> RiskLabeling:
    """Label each cluster high when the Q3 of its members' death metric exceeds the threshold.

    Exactly one of ``threshold`` and ``threshold_quantile`` must be given; the
    latter sets the threshold to that quantile of the per-cluster Q3 values.
    """
    if (threshold is None) == (threshold_quantile is None):
        raise ConfigError("give exactly one of threshold / threshold_quantile")
    if len(countries) != len(clustering.assignments):
        raise ConfigError("countries must align with the clustering's points")
    members = [[] for _ in range(clustering.k)]
    for name, c in zip(countries, clustering.assignments):
        members[int(c)].append(name)

    excluded = []
    q3 = []
    for group in members:
        vals = []
        for name in group:
            v = death_metric(table.record(name), metric)
            if v is None:
                if outcome_missing == "error":
                    raise MissingOutcome(name)
                excluded.append(name)
            else:
                vals.append(v)
        q3.append(quantile_type7(vals, 0.75) if vals else None)

    if threshold is None:
        present = [v for v in q3 if v is not None]
        if not present:
            raise MissingOutcome("<all clusters>")
        threshold = quantile_type7(present, threshold_quantile)

    labels = tuple("high" if v is not None and v > threshold else "low" for v in q3)
    high = tuple(sorted(n for lab, g in zip(labels, members) if lab == "high" for n in g))
    return RiskLabeling(
        death_metric=metric,
        per_cluster_q3=tuple(q3),
        threshold=float(threshold),
        labels=labels,
        members=tuple(tuple(g) for g in members),
        high_countries=high,
        excluded=tuple(sorted(excluded)),
        threshold_quantile=threshold_quantile,
    )


# group comparison


@dataclass(frozen=True)
class GroupStat:
    name: str
    high_mean: Optional[float]
    high_std: Optional[float]
    low_mean: Optional[float]
    low_std: Optional[float]
    n_high: int
    n_low: int


@dataclass(frozen=True)
class GroupComparison:
    n_high: int
    n_low: int
    categories: tuple  # GroupStat per food feature
    obesity: GroupStat
    undernourished: GroupStat
    kcal: GroupStat
    kcal_relative_difference: Optional[float]  # (high - low) / low

    def category(self, name: str) -> GroupStat:
        for s in self.categories:
            if s.name == name:
                return s
        raise KeyError(name)


def _mean_std(values):
    v = np.array([x for x in values if x is not None and not math.isnan(x)], dtype=np.float64)
    mean = float(v.mean()) if v.size else None
    std = float(v.std(ddof=1)) if v.size >= 2 else None
    return mean, std, int(v.size)


def _stat(name, high_vals, low_vals) -> GroupStat:
    hm, hs, nh = _mean_std(high_vals)
    lm, ls, nl = _mean_std(low_vals)
    return GroupStat(name, hm, hs, lm, ls, nh, nl)


def relative_difference(high: float, low: float) -> float:
    return (high - low) / low


def compare_groups(
    table: CountryTable, labeling: RiskLabeling, policy: CleaningPolicy = CleaningPolicy()
) -> GroupComparison:
    """Mean and sample std of every raw food feature and health column, high vs low group.

    Missing values are skipped per statistic; ``n_high``/``n_low`` on each
    :class:`GroupStat` count the values actually used.
    """
    high_names = labeling.high_countries
    low_names = labeling.low_countries
    if not high_names or not low_names:
        raise EmptyGroup(f"high group has {len(high_names)} countries, low group {len(low_names)}")
    high = [table.record(n) for n in high_names]
    low = [table.record(n) for n in low_names]

    cats = tuple(
        _stat(f, [r.food_features[j] for r in high], [r.food_features[j] for r in low])
        for j, f in enumerate(table.feature_names)
    )
    obesity = _stat("obesity", [r.obesity for r in high], [r.obesity for r in low])
    under = _stat(
        "undernourished",
        [parse_censored(r.undernourished, policy) for r in high],
        [parse_censored(r.undernourished, policy) for r in low],
    )
    kcal = _stat("kcal_per_day", [r.kcal_per_day for r in high], [r.kcal_per_day for r in low])
    rel = None
    if kcal.high_mean is not None and kcal.low_mean:
        rel = relative_difference(kcal.high_mean, kcal.low_mean)
    return GroupComparison(
        n_high=len(high),
        n_low=len(low),
        categories=cats,
        obesity=obesity,
        undernourished=under,
        kcal=kcal,
        kcal_relative_difference=rel,
    )


# overlap and cluster sizes


@dataclass(frozen=True)
class OverlapReport:
    n_high: int
    n_top: int
    matched: tuple
    count: int
    fraction: float  # count / n_high
    unmatched_names: tuple  # external names matching no clustered country


def top_deaths_overlap(labeling: RiskLabeling, external_top_list: Sequence[str]) -> OverlapReport:
    universe = {normalize_country(c) for m in labeling.members for c in m}
    top = {}
    for name in external_top_list:
        top.setdefault(normalize_country(name), name)
    unmatched = tuple(sorted(v for k, v in top.items() if k not in universe))
    matched = tuple(sorted(c for c in labeling.high_countries if normalize_country(c) in top))
    n_high = len(labeling.high_countries)
    return OverlapReport(
        n_high=n_high,
        n_top=len(top),
        matched=matched,
        count=len(matched),
        fraction=len(matched) / n_high if n_high else 0.0,
        unmatched_names=unmatched,
    )


def cluster_size_stats(clustering) -> tuple[float, float]:
    """Mean and sample standard deviation of cluster sizes (std is 0 for a single cluster)."""
    sizes = np.bincount(np.asarray(clustering.assignments), minlength=clustering.k).astype(float)
    std = float(sizes.std(ddof=1)) if len(sizes) > 1 else 0.0
    return float(sizes.mean()), std
