"""Synthetic stand-in for the four-file diet dataset.

Writes CSVs with the public dataset's layout (country column, food category
columns, outcome columns) so the pipeline, CLI and timing checks can run
without the real data. Values come from a few latent diet profiles plus
noise; they mean nothing epidemiologically.
"""

from pathlib import Path

import numpy as np

from .config import STANDARD_FILES
from .rng import make_rng

CATEGORIES = (
    "Alcoholic Beverages", "Animal Products", "Animal fats", "Aquatic Products, Other",
    "Cereals - Excluding Beer", "Eggs", "Fish, Seafood", "Fruits - Excluding Wine", "Meat",
    "Miscellaneous", "Milk - Excluding Butter", "Offals", "Oilcrops", "Pulses", "Spices",
    "Starchy Roots", "Stimulants", "Sugar Crops", "Sugar & Sweeteners", "Treenuts",
    "Vegetal Products", "Vegetable Oils", "Vegetables",
)
# 23 + 24 + 24 + 23 = 94 food features
EXTRA_CATEGORY = "Other"
COLUMNS_PER_SOURCE = {"fat_csv": 23, "kg_csv": 24, "kcal_csv": 24, "protein_csv": 23}
OUTCOMES = ("Obesity", "Undernourished", "Confirmed", "Deaths", "Recovered", "Active", "Population")
N_LATENT = 24
UNIT = "Unit (all except Population)"


def write_synthetic_dataset(
    out_dir,
    n_countries: int = 170,
    n_profiles: int = 6,
    seed: int = 7,
    missing_food: int = 2,
    missing_outcomes: int = 4,
    with_kcal_reference: bool = True,
) -> dict:
    """Write the four food CSVs (and a kcal reference); return their paths keyed like RunConfig."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = make_rng(seed)
    names = [f"Country {i:03d}" for i in range(n_countries)]
    profile = rng.integers(n_profiles, size=n_countries)
    latent = rng.normal(size=(n_profiles, N_LATENT)) * 2.0
    z = latent[profile] + rng.normal(size=(n_countries, N_LATENT)) * np.geomspace(1.5, 0.3, N_LATENT)

    risk = rng.uniform(0.5, 6.0, size=n_profiles)[profile]
    confirmed = rng.uniform(0.01, 1.5, size=n_countries)
    deaths = confirmed * risk / 100.0 * rng.uniform(0.6, 1.4, size=n_countries)
    outcomes = {
        "Obesity": rng.uniform(2, 35, size=n_countries),
        "Undernourished": rng.uniform(1, 30, size=n_countries),
        "Confirmed": confirmed,
        "Deaths": deaths,
        "Recovered": confirmed * 0.6,
        "Active": confirmed * 0.35,
        "Population": rng.integers(50_000, 300_000_000, size=n_countries).astype(float),
    }
    censored_rows = set(rng.choice(n_countries, size=max(1, n_countries // 10), replace=False).tolist())
    outcome_gaps = set(rng.choice(n_countries, size=missing_outcomes, replace=False).tolist())

    paths = {}
    for key, width in COLUMNS_PER_SOURCE.items():
        cats = list(CATEGORIES) + ([EXTRA_CATEGORY] if width == 24 else [])
        loadings = rng.normal(size=(N_LATENT, width))
        raw = np.exp(0.25 * (z @ loadings) / np.sqrt(N_LATENT)) + rng.uniform(0, 0.05, size=(n_countries, width))
        pct = 100.0 * raw / raw.sum(axis=1, keepdims=True)
        gaps = {(int(rng.integers(n_countries)), int(rng.integers(width))) for _ in range(missing_food)}
        lines = [",".join(_quote(c) for c in ["Country", *cats, *OUTCOMES, UNIT])]
        for i, name in enumerate(names):
            cells = [name]
            cells += ["" if (i, j) in gaps else f"{pct[i, j]:.6f}" for j in range(width)]
            for col in OUTCOMES:
                v = outcomes[col][i]
                if col == "Undernourished" and i in censored_rows:
                    cells.append("<2.5")
                elif col in ("Confirmed", "Deaths") and i in outcome_gaps:
                    cells.append("")
                elif col == "Population":
                    cells.append(f"{v:.0f}")
                else:
                    cells.append(f"{v:.6f}")
            cells.append("%")
            lines.append(",".join(_quote(c) for c in cells))
        path = out / STANDARD_FILES[key]
        path.write_text("\n".join(lines) + "\n")
        paths[key] = str(path)

    if with_kcal_reference:
        kcal = 2200 + 250 * z[:, 0] / 3.0 + rng.normal(scale=60, size=n_countries)
        ref = out / "kcal_reference.csv"
        ref.write_text("Country,KcalPerDay\n" + "".join(f"{n},{v:.1f}\n" for n, v in zip(names, kcal)))
        paths["kcal_reference"] = str(ref)
    return paths


def _quote(cell: str) -> str:
    return f'"{cell}"' if "," in cell else cell
