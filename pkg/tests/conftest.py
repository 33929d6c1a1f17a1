"""Shared pytest plumbing.

Acceptance checks register their outcome here so the run ends with one
PASS/FAIL line per check, printed even when assertions abort a check early.
"""

from __future__ import annotations

_ACCEPTANCE: list[tuple[str, bool]] = []


def record_acceptance(label: str, passed: bool) -> None:
    _ACCEPTANCE.append((label, passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance checks")
    for label, passed in _ACCEPTANCE:
        terminalreporter.write_line(f"{label}: {'PASS' if passed else 'FAIL'}")
