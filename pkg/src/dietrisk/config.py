"""Run configuration shared by the CLI and the scripts."""

from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import yaml

from .errors import ConfigError
from .kmeans import KMeansConfig
from .pipeline.dataset import CleaningPolicy
from .rng import DEFAULT_SEED

# File names used by the public COVID-19 Healthy Diet dataset.
STANDARD_FILES = {
    "fat_csv": "Fat_Supply_Quantity_Data.csv",
    "kg_csv": "Food_Supply_Quantity_kg_Data.csv",
    "kcal_csv": "Food_Supply_kcal_Data.csv",
    "protein_csv": "Protein_Supply_Quantity_Data.csv",
}


@dataclass
class RunConfig:
    data_dir: Optional[str] = None
    fat_csv: Optional[str] = None
    kg_csv: Optional[str] = None
    kcal_csv: Optional[str] = None
    protein_csv: Optional[str] = None
    kcal_reference: Optional[str] = None
    top_deaths: Optional[str] = None

    variance_target: float = 0.95
    k: Optional[int] = None
    k_min: int = 2
    k_max: int = 30
    accept_suggested_k: bool = False

    seed: int = DEFAULT_SEED
    restarts: int = 32
    max_iterations: int = 300
    movement_tolerance: float = 1e-9
    init: str = "random_points"

    death_metric: str = "deaths_over_confirmed"
    threshold: Optional[float] = None
    threshold_quantile: Optional[float] = None

    food_missing: str = "impute_mean"
    censored: str = "midpoint"
    outcome_missing: str = "exclude"

    out_dir: str = "out"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s): {unknown}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            data = yaml.safe_load(Path(path).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must be a mapping")
        return cls.from_dict({k.replace("-", "_"): v for k, v in data.items()})

    def to_dict(self) -> dict:
        return asdict(self)

    def dump(self, path) -> None:
        Path(path).write_text(yaml.safe_dump(self.to_dict(), sort_keys=True))

    def input_paths(self) -> dict:
        """The four food CSV paths, filling gaps from ``data_dir``."""
        out = {}
        for key, default_name in STANDARD_FILES.items():
            value = getattr(self, key)
            if value is None and self.data_dir is not None:
                value = str(Path(self.data_dir) / default_name)
            if value is None:
                raise ConfigError(f"no path for {key}; pass --{key.replace('_', '-')} or --data-dir")
            out[key] = value
        return out

    def kmeans_config(self, k: int) -> KMeansConfig:
        return KMeansConfig(
            k=k,
            seed=self.seed,
            max_iterations=self.max_iterations,
            movement_tolerance=self.movement_tolerance,
            restarts=self.restarts,
            init_strategy=self.init,
        )

    def cleaning_policy(self) -> CleaningPolicy:
        return CleaningPolicy(
            food_missing=self.food_missing,
            censored=self.censored,
            outcome_missing=self.outcome_missing,
        )

    def check(self) -> None:
        if not 0.0 < self.variance_target <= 1.0:
            raise ConfigError("variance_target must be in (0, 1]")
        if self.k is not None and self.k < 1:
            raise ConfigError("k must be >= 1")
        if not 2 <= self.k_min <= self.k_max:
            raise ConfigError("sweep bounds need 2 <= k_min <= k_max")
        if self.threshold is not None and self.threshold_quantile is not None:
            raise ConfigError("threshold and threshold_quantile are mutually exclusive")
        if self.threshold_quantile is not None and not 0.0 <= self.threshold_quantile <= 1.0:
            raise ConfigError("threshold_quantile must be in [0, 1]")
        if self.death_metric not in ("deaths_over_confirmed", "deaths_over_population"):
            raise ConfigError(f"unknown death metric {self.death_metric!r}")
        self.kmeans_config(max(self.k or 1, 1))
        self.cleaning_policy()
