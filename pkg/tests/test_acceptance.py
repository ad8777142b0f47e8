"""Acceptance gate A1-A11.

Each criterion prints one summary line (``A3 PASS 5/5 checks``) followed by
its individual measurements, and fails if any measurement misses its
tolerance.  Run as ``pytest tests/test_acceptance.py -s`` or directly with
``python tests/test_acceptance.py``.
"""
import sys

import pytest

from liouspace.verification import CRITERIA

GROUPS = {}
for key in CRITERIA:
    GROUPS.setdefault(key.split(".")[0], []).append(key)
ORDER = sorted(GROUPS, key=lambda k: int(k[1:]))


def evaluate(criterion):
    results = [r for key in GROUPS[criterion] for r in CRITERIA[key]()]
    ok = sum(r.passed for r in results)
    status = "PASS" if ok == len(results) else "FAIL"
    summary = f"{criterion} {status} {ok}/{len(results)} checks"
    return results, summary


@pytest.mark.parametrize("criterion", ORDER)
def test_criterion(criterion, capsys):
    results, summary = evaluate(criterion)
    with capsys.disabled():
        print(f"\n{summary}")
        for r in results:
            print(f"    {r.line()}")
    failed = [r.name for r in results if not r.passed]
    assert not failed, f"{criterion} failed: {failed}"


def test_all_criteria_present():
    assert ORDER == [f"A{i}" for i in range(1, 12)]


if __name__ == "__main__":
    bad = 0
    for c in ORDER:
        _, line = evaluate(c)
        print(line)
        bad += "FAIL" in line
    sys.exit(1 if bad else 0)
