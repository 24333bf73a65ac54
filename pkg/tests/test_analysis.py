import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dietrisk.errors import ConfigError, EmptyGroup, MissingOutcome
from dietrisk.kmeans import Clustering
from dietrisk.pipeline import (
    CountryRecord,
    CountryTable,
    cluster_size_stats,
    compare_groups,
    label_clusters,
    quantile_type7,
    run_reduction,
    top_deaths_overlap,
)
from dietrisk.pipeline.analysis import RiskLabeling, relative_difference
from dietrisk.pipeline.dataset import JoinReport
from dietrisk.pipeline.names import normalize_country

from oracles import quantile_linear


def record(name, food=(1.0,), deaths=None, confirmed=None, kcal=None, obesity=None, under=None):
    return CountryRecord(
        country=name, key=normalize_country(name), food_features=tuple(food), obesity=obesity,
        undernourished=under, confirmed=confirmed, deaths=deaths, recovered=None, active=None,
        population=None, kcal_per_day=kcal,
    )


def table_of(records, features=("f",)):
    return CountryTable(tuple(records), tuple(features), JoinReport({}, {}))


def clustering_of(labels, k=None):
    labels = np.asarray(labels)
    k = k or int(labels.max()) + 1
    return Clustering(k=k, centroids=np.zeros((k, 1)), assignments=labels, inertia=0.0,
                      iterations_run=1, seed_used=0)


def labeling_of(high, low):
    return RiskLabeling("deaths_over_confirmed", (1.0, 0.0), 0.5, ("high", "low"),
                        (tuple(high), tuple(low)), tuple(sorted(high)), ())


class TestQuantile:
    def test_known_values(self):
        assert quantile_type7([1, 2, 3], 0.75) == 2.5
        assert quantile_type7([5, 6, 8], 0.75) == 7.0
        assert quantile_type7([4], 0.75) == 4.0

    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30), st.floats(0, 1))
    def test_matches_independent_and_numpy(self, xs, q):
        ours = quantile_type7(xs, q)
        assert ours == pytest.approx(quantile_linear(xs, q), abs=1e-6)
        assert ours == pytest.approx(float(np.percentile(xs, 100 * q, method="linear")), abs=1e-6)


class TestLabel:
    def test_low_cluster(self):
        t = table_of([record(n, deaths=0.01, confirmed=1.0) for n in "ABC"])
        lab = label_clusters(clustering_of([0, 0, 0]), list("ABC"), t, threshold=2.0)
        assert lab.labels == ("low",)
        assert lab.per_cluster_q3[0] == pytest.approx(1.0)
        assert lab.high_countries == ()

    def test_two_clusters(self):
        # per-cluster metrics {0.5, 0.5} and {8, 8}: Q3 0.5 and 8
        t = table_of([record("A", deaths=0.005, confirmed=1), record("B", deaths=0.005, confirmed=1),
                      record("C", deaths=0.08, confirmed=1), record("D", deaths=0.08, confirmed=1)])
        lab = label_clusters(clustering_of([0, 0, 1, 1]), list("ABCD"), t, threshold=5.0)
        assert lab.labels == ("low", "high")
        assert lab.high_countries == ("C", "D")
        assert lab.high_clusters == (1,)

    def test_population_metric(self):
        t = table_of([record("A", deaths=0.3), record("B", deaths=0.1)])
        lab = label_clusters(clustering_of([0, 1]), ["A", "B"], t, "deaths_over_population", 0.2)
        assert lab.labels == ("high", "low")

    def test_missing_outcomes(self):
        t = table_of([record("A", deaths=0.02, confirmed=1), record("B"), record("C", deaths=0.01, confirmed=0)])
        lab = label_clusters(clustering_of([0, 0, 0]), list("ABC"), t, threshold=1.0)
        assert lab.excluded == ("B", "C")
        assert lab.per_cluster_q3 == (2.0,)
        assert lab.labels == ("high",)
        assert lab.high_countries == ("A", "B", "C")
        with pytest.raises(MissingOutcome):
            label_clusters(clustering_of([0, 0, 0]), list("ABC"), t, threshold=1.0, outcome_missing="error")

    def test_threshold_quantile(self):
        recs = [record(f"c{i}", deaths=i / 100, confirmed=1) for i in range(1, 21)]
        lab = label_clusters(clustering_of(list(range(20))), [r.country for r in recs], table_of(recs),
                             threshold_quantile=0.85)
        assert lab.threshold == pytest.approx(quantile_type7(range(1, 21), 0.85))
        assert lab.labels.count("high") == 3

    def test_threshold_arguments_exclusive(self):
        t = table_of([record("A", deaths=0.1, confirmed=1)])
        with pytest.raises(ConfigError):
            label_clusters(clustering_of([0]), ["A"], t)
        with pytest.raises(ConfigError):
            label_clusters(clustering_of([0]), ["A"], t, threshold=1.0, threshold_quantile=0.5)

    @given(st.lists(st.floats(0, 10), min_size=2, max_size=12), st.floats(0, 10), st.floats(0, 5))
    def test_monotone_in_threshold(self, metrics, t0, dt):
        recs = [record(f"c{i}", deaths=m, confirmed=100.0) for i, m in enumerate(metrics)]
        labels = [i % 3 for i in range(len(recs))]
        k = len(set(labels))
        cl = clustering_of(labels, k)
        names = [r.country for r in recs]
        lo = label_clusters(cl, names, table_of(recs), threshold=t0)
        hi = label_clusters(cl, names, table_of(recs), threshold=t0 + dt)
        for a, b in zip(lo.labels, hi.labels):
            assert not (a == "low" and b == "high")
        members = {n for i, n in enumerate(names) if lo.labels[labels[i]] == "high"}
        assert set(lo.high_countries) == members
        assert set(lo.high_countries) | set(lo.low_countries) == set(names)
        assert not set(lo.high_countries) & set(lo.low_countries)


class TestCompare:
    def test_hand_computed(self):
        t = table_of([
            record("A", food=(10.0, 1.0), kcal=3000.0, obesity=20.0, under="<2.5"),
            record("B", food=(14.0, 3.0), kcal=3400.0, obesity=30.0, under="3.0"),
            record("C", food=(2.0, 5.0), kcal=2000.0, obesity=5.0, under="10"),
            record("D", food=(4.0, 9.0), kcal=2500.0, obesity=7.0, under="20"),
        ], features=("kg:Meat", "kg:Cereals - Excluding Beer"))
        g = compare_groups(t, labeling_of(["A", "B"], ["C", "D"]))
        meat = g.category("kg:Meat")
        assert (meat.high_mean, meat.low_mean) == (12.0, 3.0)
        assert meat.high_std == pytest.approx(math.sqrt(8.0))
        assert meat.low_std == pytest.approx(math.sqrt(2.0))
        cer = g.category("kg:Cereals - Excluding Beer")
        assert (cer.high_mean, cer.low_mean) == (2.0, 7.0)
        assert g.obesity.high_mean == 25.0 and g.obesity.low_mean == 6.0
        assert g.undernourished.high_mean == pytest.approx((1.25 + 3.0) / 2)
        assert g.kcal.high_mean == 3200.0 and g.kcal.low_mean == 2250.0
        assert g.kcal_relative_difference == pytest.approx(950.0 / 2250.0)
        assert (g.n_high, g.n_low) == (2, 2)

    def test_identical_groups(self):
        t = table_of([record("A", food=(5.0,), kcal=2000.0), record("B", food=(5.0,), kcal=2000.0)])
        g = compare_groups(t, labeling_of(["A"], ["B"]))
        assert g.categories[0].high_mean == g.categories[0].low_mean
        assert g.kcal_relative_difference == 0.0

    def test_missing_values_skipped(self):
        t = table_of([record("A", food=(math.nan,)), record("B", food=(4.0,)), record("C", food=(6.0,))])
        g = compare_groups(t, labeling_of(["A", "B"], ["C"]))
        s = g.categories[0]
        assert s.high_mean == 4.0 and s.n_high == 1 and s.high_std is None

    def test_empty_group(self):
        t = table_of([record("A"), record("B")])
        with pytest.raises(EmptyGroup):
            compare_groups(t, labeling_of(["A", "B"], []))

    def test_published_kcal_difference(self):
        assert 100 * relative_difference(3277.5, 2764.3) == pytest.approx(18.57, abs=0.01)


class TestOverlap:
    def lab(self):
        return labeling_of(["USA", "Spain", "Chile"], ["Peru", "Japan"])

    def test_partial(self):
        o = top_deaths_overlap(self.lab(), ["United States", "spain", "Peru", "Atlantis"])
        assert o.matched == ("Spain", "USA")
        assert o.count == 2 and o.fraction == pytest.approx(2 / 3)
        assert o.unmatched_names == ("Atlantis",)

    def test_disjoint(self):
        assert top_deaths_overlap(self.lab(), ["Peru", "Japan"]).fraction == 0.0

    def test_subset(self):
        assert top_deaths_overlap(self.lab(), ["Chile", "Spain", "USA", "Japan"]).fraction == 1.0


class TestSizes:
    def test_170_countries_20_clusters(self):
        labels = np.repeat(np.arange(20), 1)
        labels = np.concatenate([labels, np.arange(150) % 20])
        mean, _ = cluster_size_stats(clustering_of(labels, 20))
        assert mean == 8.5

    def test_equal_sizes(self):
        assert cluster_size_stats(clustering_of([0, 0, 1, 1, 2, 2])) == (2.0, 0.0)

    def test_two_and_fourteen(self):
        mean, std = cluster_size_stats(clustering_of([0] * 2 + [1] * 14))
        assert mean == 8.0
        assert std == pytest.approx(8.4853, abs=1e-4)


class TestReduction:
    def test_percent_reduction_formula(self):
        assert 100 * (94 - 23) / 94 == pytest.approx(75.53, abs=0.005)

    def test_full_target_no_reduction(self):
        x = np.random.default_rng(0).normal(size=(30, 5))
        _, reduced, rep = run_reduction(x, 1.0)
        assert rep.percent_reduction == 0.0 and reduced.shape == (30, 5)

    def test_rank_five_data(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(80, 5)) @ rng.normal(size=(5, 30))
        model, reduced, rep = run_reduction(x, 0.95)
        assert rep.n_components <= 5
        assert rep.n_features_in == 30
        assert rep.percent_reduction == pytest.approx(100 * (30 - model.k) / 30)
        assert reduced.shape == (80, model.k)
