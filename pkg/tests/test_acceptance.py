"""Acceptance criteria; one pass/fail line per criterion is printed in the summary."""

import pytest

from tswaves.acceptance import CRITERIA, run_criterion

from conftest import record_line


@pytest.mark.parametrize("ident", list(CRITERIA))
def test_criterion(ident):
    r = run_criterion(ident, workers=2)
    record_line(r.line())
    print(r.line())
    assert r.passed, r.summary
