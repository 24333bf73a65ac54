"""Run the acceptance tests and print one PASS/FAIL/SKIP line per criterion.

Extra arguments go to pytest, e.g. ``python3 scripts/run_acceptance.py -x``.
"""

import sys
from pathlib import Path

import pytest

root = Path(__file__).resolve().parents[1]
sys.exit(pytest.main([str(root / "tests" / "test_acceptance.py"), "-q", "-p", "no:cacheprovider", *sys.argv[1:]]))
