"""Shared fixtures; collects acceptance verdicts for the terminal summary."""

import pytest

_CRITERIA: dict[int, tuple[bool | None, str]] = {}


@pytest.fixture
def criterion():
    """``criterion(k, passed, detail)`` records acceptance criterion k; None means skipped."""

    def record(k: int, passed, detail: str) -> None:
        _CRITERIA[k] = (None if passed is None else bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        passed, detail = _CRITERIA[k]
        status = "SKIP" if passed is None else ("PASS" if passed else "FAIL")
        terminalreporter.write_line(f"criterion {k}: {status}  {detail}")
