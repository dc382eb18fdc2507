"""Acceptance battery: one line per criterion, printed as it is checked."""

import time

import pytest

from snowflake_ot.suite import CRITERIA

SEED = 0


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    t0 = time.perf_counter()
    res = CRITERIA[number](SEED)
    res.seconds = time.perf_counter() - t0
    with capsys.disabled():
        print("\n" + res.line(), flush=True)
    assert res.passed, res.details
    assert res.seconds <= res.budget, f"took {res.seconds:.1f} s, budget {res.budget} s"
