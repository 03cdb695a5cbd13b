"""Acceptance suite: every criterion at its stated tolerance.

Each test prints the one-line pass/fail record (visible with pytest -s or in
the CLI driver `stratwave acceptance`).  Criteria carry their own grid
choices; rationale lives in stratwave.acceptance.
"""

import pytest

from stratwave.acceptance import CRITERIA, run_criterion

CRITERION_IDS = list(CRITERIA.keys())


@pytest.mark.parametrize("cid", CRITERION_IDS)
def test_criterion(cid):
    result = run_criterion(cid)
    print(result.line())
    assert result.passed, result.line()
