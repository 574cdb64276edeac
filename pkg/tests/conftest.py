import time
from contextlib import contextmanager

import pytest

ACCEPTANCE: dict[int, tuple[str, bool, float]] = {}


@contextmanager
def _criterion(n: int, title: str):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        ACCEPTANCE[n] = (title, ok, time.perf_counter() - start)


@pytest.fixture
def criterion():
    return _criterion


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, secs = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.1f}s)")
