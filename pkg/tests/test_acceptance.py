"""Acceptance criteria at their stated tolerances; one PASS/FAIL line each."""

import pytest

from hardedge import acceptance


@pytest.mark.parametrize("check", acceptance.CHECKS, ids=lambda c: c.__name__)
def test_criterion(check, capsys):
    res = check()
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.failures
