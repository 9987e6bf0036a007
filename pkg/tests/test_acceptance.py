"""End-to-end acceptance criteria; each prints one PASS/FAIL line."""

import pytest

from pmsim.acceptance import CRITERIA, run_criterion

pytestmark = pytest.mark.slow


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA],
                         ids=[f"{c[0]}-{c[1].replace(' ', '-')}" for c in CRITERIA])
def test_criterion(number, capsys):
    res = run_criterion(number)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.ok, res.detail
