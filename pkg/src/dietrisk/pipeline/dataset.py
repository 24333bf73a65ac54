"""Ingestion of the four food-supply CSVs and the missing-value cleaning pass."""

import csv
import math
from functools import cached_property
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

import numpy as np

from ..errors import AllRowsDropped, ConfigError, JoinError, ParseError, SchemaError
from .names import normalize_country

SOURCES = ("fat", "kg", "kcal", "protein")
OUTCOME_COLUMNS = ("Obesity", "Undernourished", "Confirmed", "Deaths", "Recovered", "Active", "Population")
TRAILING_OPTIONAL = ("Unit (all except Population)",)
_MISSING = {"", "na", "n/a", "nan", "null", "none"}


@dataclass(frozen=True)
class CountryRecord:
    country: str
    key: str
    food_features: tuple  # floats, NaN where missing
    obesity: Optional[float]
    undernourished: Optional[str]  # raw text, may be censored like "<2.5"
    confirmed: Optional[float]
    deaths: Optional[float]
    recovered: Optional[float]
    active: Optional[float]
    population: Optional[float]
    kcal_per_day: Optional[float] = None


@dataclass(frozen=True)
class JoinReport:
    rows_per_source: dict
    dropped: dict  # source -> countries absent from the final join because of that source
    kcal_missing: tuple = ()
    kcal_unmatched: tuple = ()

    def to_dict(self) -> dict:
        return {
            "rows_per_source": dict(self.rows_per_source),
            "dropped": {k: list(v) for k, v in self.dropped.items()},
            "kcal_missing": list(self.kcal_missing),
            "kcal_unmatched": list(self.kcal_unmatched),
        }


@dataclass(frozen=True)
class CountryTable:
    records: tuple
    feature_names: tuple
    join_report: JoinReport
    columns_per_source: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.records)

    @property
    def countries(self) -> tuple:
        return tuple(r.country for r in self.records)

    def feature_matrix(self) -> np.ndarray:
        return np.array([r.food_features for r in self.records], dtype=np.float64).reshape(
            len(self.records), len(self.feature_names)
        )

    @cached_property
    def _by_key(self) -> dict:
        return {r.key: r for r in self.records}

    def record(self, country: str) -> CountryRecord:
        try:
            return self._by_key[normalize_country(country)]
        except KeyError:
            raise KeyError(country) from None


@dataclass
class _SourceFile:
    name: str
    path: Path
    food_columns: list
    rows: dict  # key -> (display name, food values, outcome dict, line)


def _parse_number(text, path, line, column) -> Optional[float]:
    t = text.strip()
    if t.casefold() in _MISSING:
        return None
    try:
        v = float(t)
    except ValueError:
        raise ParseError(path, line, f"column {column!r}: not a number: {text!r}") from None
    if not math.isfinite(v):
        raise ParseError(path, line, f"column {column!r}: non-finite value {text!r}")
    if v < 0:
        raise ParseError(path, line, f"column {column!r}: negative value {v}")
    return v


def _read_rows(path: Path):
    try:
        with open(path, newline="", encoding="utf-8-sig") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParseError(path, 0, f"cannot read file: {exc}") from None
    except (UnicodeDecodeError, csv.Error) as exc:
        raise ParseError(path, 0, str(exc)) from None
    if not rows or not any(cell.strip() for cell in rows[0]):
        raise ParseError(path, 1, "empty file (no header row)")
    return rows


def _read_food_file(name: str, path) -> _SourceFile:
    path = Path(path)
    rows = _read_rows(path)
    header = [h.strip() for h in rows[0]]
    if not header or header[0].casefold() != "country":
        raise SchemaError(f"{path}: first column must be 'Country', got {header[:1]}")
    missing = [c for c in OUTCOME_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {missing}")
    first_outcome = min(header.index(c) for c in OUTCOME_COLUMNS)
    food_columns = header[1:first_outcome]
    if not food_columns:
        raise SchemaError(f"{path}: no food category columns before the outcome columns")
    extra = [c for c in header[first_outcome:] if c not in OUTCOME_COLUMNS and c not in TRAILING_OPTIONAL]
    if extra:
        raise SchemaError(f"{path}: unexpected column(s) {extra}")
    col = {c: i for i, c in enumerate(header)}

    out = {}
    for line, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise ParseError(path, line, f"expected {len(header)} fields, got {len(row)}")
        display = row[0].strip()
        if not display:
            raise ParseError(path, line, "empty country name")
        key = normalize_country(display)
        if key in out:
            raise ParseError(path, line, f"duplicate country {display!r}")
        food = tuple(
            _nan(_parse_number(row[col[c]], path, line, c)) for c in food_columns
        )
        outcomes = {
            c: (row[col[c]].strip() or None)
            if c == "Undernourished"
            else _parse_number(row[col[c]], path, line, c)
            for c in OUTCOME_COLUMNS
        }
        und = outcomes["Undernourished"]
        if und is not None and und.casefold() not in _MISSING:
            _parse_number(und.lstrip("<"), path, line, "Undernourished")
        out[key] = (display, food, outcomes, line)
    if not out:
        raise ParseError(path, 2, "no data rows")
    return _SourceFile(name, path, food_columns, out)


def _nan(v):
    return math.nan if v is None else v


def read_kcal_reference(path) -> dict:
    """``Country, KcalPerDay`` -> {normalized name: (display, kcal or None)}."""
    path = Path(path)
    rows = _read_rows(path)
    header = [h.strip() for h in rows[0]]
    if header[:2] != ["Country", "KcalPerDay"]:
        raise SchemaError(f"{path}: expected header 'Country,KcalPerDay', got {header}")
    out = {}
    for line, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) < 2:
            raise ParseError(path, line, "expected 2 fields")
        key = normalize_country(row[0])
        if key in out:
            raise ParseError(path, line, f"duplicate country {row[0]!r}")
        out[key] = (row[0].strip(), _parse_number(row[1], path, line, "KcalPerDay"))
    return out


def read_country_list(path) -> list[str]:
    """One country per line; blank lines and ``#`` comments are ignored."""
    names = []
    with open(path, encoding="utf-8-sig") as fh:
        for raw in fh:
            s = raw.strip()
            if s and not s.startswith("#"):
                names.append(s)
    return names


def load_dataset(fat_csv, kg_csv, kcal_csv, protein_csv, kcal_reference=None) -> CountryTable:
    """Inner-join the four food files on normalized country name.

    Food columns are prefixed with their source (``fat:``, ``kg:``, ``kcal:``,
    ``protein:``). Outcome columns come from the fat file. The kcal reference,
    if given, is left-joined. Records are sorted by normalized name.
    """
    sources = [_read_food_file(n, p) for n, p in zip(SOURCES, (fat_csv, kg_csv, kcal_csv, protein_csv))]
    keys = set(sources[0].rows)
    for s in sources[1:]:
        keys &= set(s.rows)
    if not keys:
        raise JoinError("no country is present in all four food files")
    union = set().union(*(s.rows for s in sources))
    dropped = {}
    for s in sources:
        absent = sorted(union - set(s.rows))
        dropped[s.name] = [_display(sources, k) for k in absent]

    kcal = read_kcal_reference(kcal_reference) if kcal_reference is not None else None
    feature_names = tuple(f"{s.name}:{c}" for s in sources for c in s.food_columns)
    records = []
    for key in sorted(keys):
        display, _, outcomes, _ = sources[0].rows[key]
        food = tuple(v for s in sources for v in s.rows[key][1])
        kcal_value = None
        if kcal is not None and key in kcal:
            kcal_value = kcal[key][1]
        records.append(
            CountryRecord(
                country=display,
                key=key,
                food_features=food,
                obesity=outcomes["Obesity"],
                undernourished=outcomes["Undernourished"],
                confirmed=outcomes["Confirmed"],
                deaths=outcomes["Deaths"],
                recovered=outcomes["Recovered"],
                active=outcomes["Active"],
                population=outcomes["Population"],
                kcal_per_day=kcal_value,
            )
        )
    kcal_missing = ()
    kcal_unmatched = ()
    if kcal is not None:
        kcal_missing = tuple(r.country for r in records if r.kcal_per_day is None)
        kcal_unmatched = tuple(sorted(kcal[k][0] for k in set(kcal) - keys))
    report = JoinReport(
        rows_per_source={s.name: len(s.rows) for s in sources},
        dropped=dropped,
        kcal_missing=kcal_missing,
        kcal_unmatched=kcal_unmatched,
    )
    return CountryTable(
        records=tuple(records),
        feature_names=feature_names,
        join_report=report,
        columns_per_source={s.name: len(s.food_columns) for s in sources},
    )


def _display(sources, key):
    for s in sources:
        if key in s.rows:
            return s.rows[key][0]
    return key


# cleaning


@dataclass(frozen=True)
class CleaningPolicy:
    food_missing: Literal["impute_mean", "drop_rows"] = "impute_mean"
    censored: Literal["midpoint", "bound"] = "midpoint"
    outcome_missing: Literal["exclude", "error"] = "exclude"

    def __post_init__(self):
        if self.food_missing not in ("impute_mean", "drop_rows"):
            raise ConfigError(f"unknown food_missing policy {self.food_missing!r}")
        if self.censored not in ("midpoint", "bound"):
            raise ConfigError(f"unknown censored policy {self.censored!r}")
        if self.outcome_missing not in ("exclude", "error"):
            raise ConfigError(f"unknown outcome_missing policy {self.outcome_missing!r}")


@dataclass(frozen=True)
class CleaningReport:
    policy: CleaningPolicy
    imputed: tuple = ()  # (country, feature, value)
    dropped_rows: tuple = ()
    dropped_columns: tuple = ()
    censored: tuple = ()  # (country, raw, value)
    kept_features: tuple = ()

    @property
    def is_empty(self) -> bool:
        return not (self.imputed or self.dropped_rows or self.dropped_columns or self.censored)

    def to_dict(self) -> dict:
        return {
            "policy": {
                "food_missing": self.policy.food_missing,
                "censored": self.policy.censored,
                "outcome_missing": self.policy.outcome_missing,
            },
            "imputed": [list(t) for t in self.imputed],
            "dropped_rows": list(self.dropped_rows),
            "dropped_columns": list(self.dropped_columns),
            "censored": [list(t) for t in self.censored],
            "n_features_kept": len(self.kept_features),
        }


def parse_censored(raw: Optional[str], policy: CleaningPolicy = CleaningPolicy()) -> Optional[float]:
    """Numeric value of a possibly left-censored field: ``"<2.5"`` -> 1.25 (midpoint) or 2.5 (bound)."""
    if raw is None:
        return None
    t = raw.strip()
    if t.casefold() in _MISSING:
        return None
    if t.startswith("<"):
        bound = float(t[1:])
        return bound / 2.0 if policy.censored == "midpoint" else bound
    return float(t)


def clean(table: CountryTable, policy: CleaningPolicy = CleaningPolicy()):
    """Turn the table into a finite feature matrix.

    Returns ``(matrix, countries, report)`` where ``countries`` lists the row
    order of ``matrix``. Constant columns are always dropped and reported.
    """
    if len(table) == 0:
        raise AllRowsDropped("empty table")
    x = table.feature_matrix()
    countries = list(table.countries)
    names = list(table.feature_names)
    imputed, dropped_rows, censored = [], [], []

    missing = np.isnan(x)
    if policy.food_missing == "drop_rows":
        bad = missing.any(axis=1)
        dropped_rows = [c for c, b in zip(countries, bad) if b]
        x = x[~bad]
        countries = [c for c, b in zip(countries, bad) if not b]
        if len(x) == 0:
            raise AllRowsDropped("every country has a missing food feature")
    elif missing.any():
        for j in np.flatnonzero(missing.any(axis=0)):
            present = x[~missing[:, j], j]
            if present.size == 0:
                continue  # column dropped below
            mean = float(present.mean())
            for i in np.flatnonzero(missing[:, j]):
                x[i, j] = mean
                imputed.append((countries[i], names[j], mean))

    empty_cols = np.isnan(x).all(axis=0) if len(x) else np.zeros(len(names), bool)
    constant = np.zeros(len(names), dtype=bool)
    if len(x):
        with np.errstate(invalid="ignore"):
            constant = np.nanmax(x, axis=0) == np.nanmin(x, axis=0)
    drop = empty_cols | constant
    dropped_columns = [n for n, d in zip(names, drop) if d]
    x = x[:, ~drop]
    names = [n for n, d in zip(names, drop) if not d]

    kept = set(countries)
    for r in table.records:
        if r.country in kept and r.undernourished and r.undernourished.strip().startswith("<"):
            censored.append((r.country, r.undernourished.strip(), parse_censored(r.undernourished, policy)))

    imputed.sort(key=lambda t: (t[0], t[1]))
    report = CleaningReport(
        policy=policy,
        imputed=tuple(imputed),
        dropped_rows=tuple(dropped_rows),
        dropped_columns=tuple(dropped_columns),
        censored=tuple(censored),
        kept_features=tuple(names),
    )
    return x, tuple(countries), report
