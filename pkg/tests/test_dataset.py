import shutil
from pathlib import Path

import numpy as np
import pytest

from dietrisk.config import STANDARD_FILES
from dietrisk.errors import AllRowsDropped, ConfigError, JoinError, ParseError, SchemaError
from dietrisk.pipeline import (
    CleaningPolicy,
    clean,
    load_dataset,
    normalize_country,
    parse_censored,
    read_country_list,
)

FILES = [STANDARD_FILES[k] for k in ("fat_csv", "kg_csv", "kcal_csv", "protein_csv")]


def load_dir(d, kcal=True):
    d = Path(d)
    ref = d / "kcal_reference.csv" if kcal and (d / "kcal_reference.csv").exists() else None
    return load_dataset(*(d / f for f in FILES), kcal_reference=ref)


@pytest.fixture
def tiny_copy(tiny_dir, tmp_path):
    for f in tiny_dir.iterdir():
        shutil.copy(f, tmp_path / f.name)
    return tmp_path


def write_food(path, rows, header="Country,A,B,Obesity,Undernourished,Confirmed,Deaths,Recovered,Active,Population"):
    Path(path).write_text(header + "\n" + "\n".join(rows) + "\n")


def three_country_dir(tmp_path, drop_from_last=None):
    rows = ["Uno,1,2,3,4,1,0.1,0.5,0.4,100", "Dos,2,1,5,<2.5,2,0.1,1,0.5,200", "Tres,3,5,1,7,3,0.3,2,1,300"]
    for i, f in enumerate(FILES):
        r = rows if not (drop_from_last and i == 3) else [x for x in rows if not x.startswith(drop_from_last)]
        write_food(tmp_path / f, r)
    return tmp_path


class TestNormalize:
    @pytest.mark.parametrize("raw,expected", [
        ("  Germany ", "germany"),
        ("GERMANY", "germany"),
        ("Côte d'Ivoire", "cote d'ivoire"),
        ("USA", "united states of america"),
        ("United States of America", "united states of america"),
        ("US", "united states of america"),
        ("Czech Republic", "czechia"),
        ("New   Zealand", "new zealand"),
    ])
    def test_cases(self, raw, expected):
        assert normalize_country(raw) == expected


class TestLoad:
    def test_clean_join(self, tmp_path):
        table = load_dir(three_country_dir(tmp_path))
        assert len(table) == 3
        assert table.feature_names == tuple(f"{s}:{c}" for s in ("fat", "kg", "kcal", "protein") for c in "AB")
        assert table.countries == ("Dos", "Tres", "Uno")  # sorted by normalized name
        assert all(not v for v in table.join_report.dropped.values())

    def test_country_missing_from_one_file(self, tmp_path):
        table = load_dir(three_country_dir(tmp_path, drop_from_last="Tres"))
        assert table.countries == ("Dos", "Uno")
        assert table.join_report.dropped["protein"] == ["Tres"]

    def test_tiny_fixture(self, tiny_dir):
        table = load_dir(tiny_dir)
        assert table.countries == ("Alpha", "Bravo", "Charlie", "Delta", "Echo", "Foxtrot")
        assert len(table.feature_names) == 8
        assert table.join_report.dropped["kg"] == ["Golf"]
        assert table.join_report.kcal_unmatched == ("Atlantis",)
        assert table.record("echo").kcal_per_day == 3300.0
        assert table.record("Alpha").undernourished == "<2.5"
        assert np.isnan(table.record("Bravo").food_features[7])

    def test_byte_identical_reload(self, tiny_dir):
        assert load_dir(tiny_dir) == load_dir(tiny_dir)

    def test_missing_deaths_column(self, tiny_copy):
        p = tiny_copy / FILES[1]
        p.write_text(p.read_text().replace("Deaths", "Fatalities"))
        with pytest.raises(SchemaError, match="Deaths"):
            load_dir(tiny_copy)

    def test_empty_file(self, tiny_copy):
        (tiny_copy / FILES[2]).write_text("")
        with pytest.raises(ParseError) as exc:
            load_dir(tiny_copy)
        assert exc.value.line == 1

    def test_bad_number_reports_line(self, tiny_copy):
        p = tiny_copy / FILES[0]
        lines = p.read_text().splitlines()
        lines[3] = lines[3].replace("12,", "twelve,", 1)
        p.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError) as exc:
            load_dir(tiny_copy)
        assert exc.value.line == 4

    def test_bad_undernourished(self, tiny_copy):
        p = tiny_copy / FILES[0]
        p.write_text(p.read_text().replace("<2.5", "<abc", 1))
        with pytest.raises(ParseError):
            load_dir(tiny_copy)

    def test_negative_rejected(self, tmp_path):
        d = three_country_dir(tmp_path)
        write_food(d / FILES[0], ["Uno,-1,2,3,4,1,0.1,0.5,0.4,100"])
        with pytest.raises(ParseError, match="negative"):
            load_dir(d)

    def test_duplicate_country(self, tmp_path):
        d = three_country_dir(tmp_path)
        write_food(d / FILES[0], ["Uno,1,2,3,4,1,0.1,0.5,0.4,100", " uno ,1,2,3,4,1,0.1,0.5,0.4,100"])
        with pytest.raises(ParseError, match="duplicate"):
            load_dir(d)

    def test_empty_intersection(self, tmp_path):
        d = three_country_dir(tmp_path)
        write_food(d / FILES[3], ["Cuatro,1,2,3,4,1,0.1,0.5,0.4,100"])
        with pytest.raises(JoinError):
            load_dir(d)


class TestClean:
    def test_no_missing_is_identity(self, tmp_path):
        table = load_dir(three_country_dir(tmp_path))
        x, countries, report = clean(table, CleaningPolicy(censored="bound"))
        np.testing.assert_array_equal(x, table.feature_matrix())
        assert countries == table.countries
        assert not report.imputed and not report.dropped_rows and not report.dropped_columns

    def test_impute_mean(self, tiny_dir):
        table = load_dir(tiny_dir)
        x, _, report = clean(table)
        assert report.imputed == (("Bravo", "protein:Y", 23.0),)
        assert x[1, 7] == 23.0
        assert not np.isnan(x).any()

    def test_drop_rows(self, tiny_dir):
        x, countries, report = clean(load_dir(tiny_dir), CleaningPolicy(food_missing="drop_rows"))
        assert "Bravo" not in countries and x.shape == (5, 8)
        assert report.dropped_rows == ("Bravo",)

    def test_censored_report(self, tiny_dir):
        _, _, report = clean(load_dir(tiny_dir))
        assert ("Alpha", "<2.5", 1.25) in report.censored
        assert len(report.censored) == 3

    def test_constant_column_dropped(self, tmp_path):
        d = three_country_dir(tmp_path)
        write_food(d / FILES[0], ["Uno,7,2,3,4,1,0.1,0.5,0.4,100", "Dos,7,1,5,4,2,0.1,1,0.5,200",
                                  "Tres,7,5,1,7,3,0.3,2,1,300"])
        x, _, report = clean(load_dir(d))
        assert report.dropped_columns == ("fat:A",)
        assert x.shape == (3, 7)

    def test_all_rows_dropped(self, tmp_path):
        d = three_country_dir(tmp_path)
        write_food(d / FILES[0], ["Uno,,2,3,4,1,0.1,0.5,0.4,100", "Dos,1,,5,4,2,0.1,1,0.5,200",
                                  "Tres,,5,1,7,3,0.3,2,1,300"])
        with pytest.raises(AllRowsDropped):
            clean(load_dir(d), CleaningPolicy(food_missing="drop_rows"))

    def test_bad_policy(self):
        with pytest.raises(ConfigError):
            CleaningPolicy(food_missing="guess")


@pytest.mark.parametrize("raw,policy,expected", [
    ("<2.5", CleaningPolicy(), 1.25),
    ("<2.5", CleaningPolicy(censored="bound"), 2.5),
    ("7.1", CleaningPolicy(), 7.1),
    ("", CleaningPolicy(), None),
    (None, CleaningPolicy(), None),
])
def test_parse_censored(raw, policy, expected):
    assert parse_censored(raw, policy) == expected


def test_read_country_list(tiny_dir):
    assert read_country_list(tiny_dir / "top_deaths.txt") == ["delta", "Foxtrot", "Atlantis"]


def test_synthetic_has_94_features(synthetic_dir):
    table = load_dir(synthetic_dir)
    assert len(table) == 170
    assert len(table.feature_names) == 94
    assert table.columns_per_source == {"fat": 23, "kg": 24, "kcal": 24, "protein": 23}
