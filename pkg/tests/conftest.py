import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"
REAL_DATA_FILES = (
    "Fat_Supply_Quantity_Data.csv",
    "Food_Supply_Quantity_kg_Data.csv",
    "Food_Supply_kcal_Data.csv",
    "Protein_Supply_Quantity_Data.csv",
)

_acceptance_lines = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, text): exit criterion of the toolkit")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        number, text = marker.args
        note = ""
        if rep.skipped and isinstance(rep.longrepr, tuple):
            note = f"  ({rep.longrepr[2]})"
        _acceptance_lines.append((number, item.name, f"{status:4s}  criterion {number}: {text}{note}"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(_acceptance_lines, key=lambda t: (float(t[0]), t[1])):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def synthetic_dir(tmp_path_factory):
    from dietrisk.synthetic import write_synthetic_dataset

    d = tmp_path_factory.mktemp("synthetic")
    write_synthetic_dataset(d)
    return d


@pytest.fixture(scope="session")
def tiny_dir():
    return FIXTURES / "tiny"


@pytest.fixture(scope="session")
def real_data_dir():
    """Directory with the public 170-country dataset, if one is available locally."""
    candidates = [os.environ.get("DIETRISK_DATA_DIR"), str(Path(__file__).parents[1] / "data")]
    for c in candidates:
        if c and all((Path(c) / f).is_file() for f in REAL_DATA_FILES):
            return Path(c)
    pytest.skip("public COVID-19 Healthy Diet dataset not available (set DIETRISK_DATA_DIR)")
