"""The eleven acceptance criteria; one PASS/FAIL line per criterion.

Run directly (python3 tests/test_acceptance.py) or through pytest.
"""
import sys

import pytest

from metaplectic.acceptance import CRITERIA, run_criterion, run_suite
from metaplectic.cover_gl2 import ensure_validated
from metaplectic.localfield import FieldConfig


def line(r) -> str:
    verdict = "PASS" if r["ok"] else "FAIL"
    extra = f"  ({r['error']})" if r["error"] else ""
    limit = f"limit {r['limit_seconds']}s" if r["limit_seconds"] else "no limit"
    return f"criterion {r['criterion']:2d} {verdict}  {r['title']}  [{r['seconds']:.1f}s, {limit}]{extra}"


@pytest.fixture(scope="module", autouse=True)
def _validated():
    for p, n in [(5, 2), (7, 3), (13, 4)]:
        ensure_validated(FieldConfig(p, n))


@pytest.mark.slow
@pytest.mark.parametrize("crit", CRITERIA, ids=lambda c: f"criterion_{c.number:02d}")
def test_criterion(crit, capsys):
    r = run_criterion(crit)
    with capsys.disabled():
        print("\n" + line(r))
    assert r["within_limit"], f"took {r['seconds']}s, limit {r['limit_seconds']}s"
    assert r["ok"], r["error"] or r["result"]


if __name__ == "__main__":
    results = run_suite()
    for r in results:
        print(line(r))
    sys.exit(0 if all(r["ok"] for r in results) else 1)
