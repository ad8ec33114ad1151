"""End-to-end acceptance matrix: one test per criterion, each with its time budget.

Run ``pytest tests/test_acceptance.py -v`` to see one PASS/FAIL line per
criterion in the terminal summary.
"""

import time

import pytest

from d2dmotif.pointprocess import NetworkConfig
from d2dmotif.validate import CRITERIA, CRITERIA_TITLES, criterion_trials, tolerances

TRIALS = 10_000
SEED = 0
# Wall-clock budget per criterion in seconds.
BUDGETS = {1: 10, 2: 120, 3: 600, 4: 1200, 5: 60, 6: 1800, 7: 600, 8: 600, 9: 120, 10: 120}

@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, acceptance_log):
    start = time.perf_counter()
    checks = CRITERIA[number](NetworkConfig(), criterion_trials(number, TRIALS), SEED, tolerances())
    elapsed = time.perf_counter() - start
    failed = [c for c in checks if not c.passed]
    in_time = elapsed < BUDGETS[number]
    verdict = "PASS" if checks and not failed and in_time else "FAIL"
    acceptance_log[number] = (f"criterion {number:2d} {verdict}  {CRITERIA_TITLES[number]} "
                       f"({len(checks) - len(failed)}/{len(checks)} checks, {elapsed:.1f} s "
                       f"of {BUDGETS[number]} s)")
    print(acceptance_log[number])
    for c in checks:
        print("  " + c.line())
    assert checks
    assert not failed, "\n".join(c.line() for c in failed)
    assert in_time, f"took {elapsed:.1f} s, budget {BUDGETS[number]} s"
