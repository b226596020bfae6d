"""Acceptance gate: every criterion must pass at its stated tolerance.

Runs the same checks as ``ringform acceptance`` and prints one line per
criterion (visible with ``pytest -s`` or on failure).
"""

import pytest

from ringform import acceptance


@pytest.mark.parametrize(
    "cid,name,fn",
    acceptance.CRITERIA,
    ids=[f"criterion_{cid:02d}" for cid, _, _ in acceptance.CRITERIA],
)
def test_criterion(cid, name, fn):
    passed, detail = fn()
    status = "PASS" if passed else "FAIL"
    print(f"{status}  criterion {cid}: {name}\n      {detail}")
    assert passed, f"criterion {cid} ({name}): {detail}"
