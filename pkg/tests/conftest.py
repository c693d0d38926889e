from __future__ import annotations

import pytest

from normtrace.fields import build_tower

# lines collected by the acceptance suite, echoed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def f4_tower():
    return build_tower(2, 1, 2)


@pytest.fixture(scope="session")
def f9_tower():
    return build_tower(3, 1, 2)


@pytest.fixture(scope="session")
def f81_tower():
    return build_tower(3, 2, 2)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
