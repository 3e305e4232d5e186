import time

import pytest

RUNTIME_LIMIT = 60.0

_lines = {}
_start = {}


def pytest_sessionstart(session):
    _start["t"] = time.perf_counter()


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(number, title, passed, detail):
        _lines[number] = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    elapsed = time.perf_counter() - _start.get("t", time.perf_counter())
    if _lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_lines):
            terminalreporter.write_line(_lines[number])
    status = "PASS" if elapsed < RUNTIME_LIMIT else "FAIL"
    terminalreporter.write_line(f"total test runtime {elapsed:.1f} s [{status}] (limit {RUNTIME_LIMIT:g} s)")
