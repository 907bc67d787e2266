"""Acceptance table: one printed PASS/FAIL line per criterion.

Reference values are computed inside each criterion before comparison
(brute force over bijections or labelings, closed formulas).  Time limits
below are the pinned tolerances; the seed comes from DISTLAB_SEED (default 0).
"""

import pytest

from distlab.suite import CRITERIA, run_criterion

# seconds allowed per criterion
TIME_LIMIT = {1: 8.0, 2: 10.0, 3: 60.0, 4: 10.0, 5: 60.0, 6: 30.0, 7: 300.0,
              8: 300.0, 9: 120.0, 10: 120.0, 11: 120.0, 12: 120.0}
TABLE_LIMIT = 300.0

_elapsed = {}


@pytest.mark.parametrize("number", [n for n, _, _ in CRITERIA], ids=[f"c{n:02d}-{t.replace(' ', '-')}" for n, t, _ in CRITERIA])
def test_criterion(number, capsys):
    row = run_criterion(number)
    _elapsed[number] = row.elapsed_s
    within = row.elapsed_s <= TIME_LIMIT[number]
    with capsys.disabled():
        print(f"\n{row.line()} [{row.elapsed_s:.2f} s, limit {TIME_LIMIT[number]:.0f} s]")
        if not row.ok:
            for c in row.checks:
                print(f"     {c}")
    assert within, f"criterion {number} took {row.elapsed_s:.1f} s"
    assert row.ok, row.detail


def test_table_budget(capsys):
    missing = [n for n, _, _ in CRITERIA if n not in _elapsed]
    for n in missing:
        _elapsed[n] = run_criterion(n).elapsed_s
    total = sum(_elapsed.values())
    with capsys.disabled():
        print(f"\n[{'PASS' if total <= TABLE_LIMIT else 'FAIL'}] table total {total:.1f} s, limit {TABLE_LIMIT:.0f} s")
    assert total <= TABLE_LIMIT
