"""Shared registry for acceptance-criterion outcomes.

test_acceptance.py records one entry per criterion; conftest.py prints them
as a PASS/FAIL block at the end of the pytest run.
"""

RESULTS = []


def record(name: str, ok: bool, detail: str = "") -> None:
    RESULTS.append((name, ok, detail))
