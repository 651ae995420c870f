"""Acceptance bookkeeping.

Tests marked ``@pytest.mark.acceptance(number, title)`` are grouped per
criterion. A criterion passes only if every one of its tests passed; the
terminal summary prints one line per criterion.
"""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, str] = {}
_members: dict[str, int] = {}
_outcomes: dict[int, list[tuple[str, str]]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker is None:
            continue
        number, title = marker.args
        _criteria[number] = title
        _members[item.nodeid] = number


def _first_line(report) -> str:
    crash = getattr(report.longrepr, "reprcrash", None)
    if crash is not None:
        return crash.message.splitlines()[0]
    if isinstance(report.longrepr, tuple):  # skip: (path, line, reason)
        return str(report.longrepr[2]).removeprefix("Skipped: ")
    return ""


def pytest_runtest_logreport(report):
    number = _members.get(report.nodeid)
    if number is None:
        return
    if report.failed:
        _outcomes.setdefault(number, []).append(("FAIL", _first_line(report)))
    elif report.skipped:
        _outcomes.setdefault(number, []).append(("SKIP", _first_line(report)))
    elif report.when == "call":
        _outcomes.setdefault(number, []).append(("PASS", ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        results = _outcomes.get(number, [])
        states = {state for state, _ in results}
        if not results:
            state, note = "NOT RUN", ""
        elif "FAIL" in states:
            state = "FAIL"
            note = next(n for s, n in results if s == "FAIL")
        elif "SKIP" in states:
            state = "SKIP"
            note = next(n for s, n in results if s == "SKIP")
        else:
            state, note = "PASS", ""
        line = f"{state:<4} [{number}] {_criteria[number]}"
        if note:
            line += f" :: {note}"
        terminalreporter.write_line(line)
