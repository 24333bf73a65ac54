"""Dataset ingestion, cleaning, labeling and reporting for the diet/mortality study."""

from .analysis import (
    GroupComparison,
    OverlapReport,
    ReductionReport,
    RiskLabeling,
    cluster_size_stats,
    compare_groups,
    label_clusters,
    quantile_type7,
    run_reduction,
    top_deaths_overlap,
)
from .dataset import (
    CleaningPolicy,
    CleaningReport,
    CountryRecord,
    CountryTable,
    clean,
    load_dataset,
    parse_censored,
    read_country_list,
    read_kcal_reference,
)
from .names import normalize_country
