import time
from contextlib import contextmanager

import pytest

CRITERIA: dict[int, str] = {}


@contextmanager
def criterion(number: int, title: str, limit: float):
    """Time a block; record one pass/fail line for the closing summary."""
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        CRITERIA[number] = f"criterion {number:>2} FAIL  {title} ({time.perf_counter() - start:.1f}s)"
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < limit
    CRITERIA[number] = (f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title} "
                        f"({elapsed:.1f}s, limit {limit:g}s)")
    print(CRITERIA[number])
    assert ok, f"took {elapsed:.1f}s, limit {limit:g}s"


@pytest.fixture
def timed():
    return criterion


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[n])
