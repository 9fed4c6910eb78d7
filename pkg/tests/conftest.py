import pytest

from negolab.geometry import Domain

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def simplex():
    return Domain.budget_simplex(2, 1.0)


@pytest.fixture
def record_criterion():
    def record(number, text, passed, measured):
        ACCEPTANCE_LINES.append((number, text, passed, measured))
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, passed, measured in sorted(ACCEPTANCE_LINES, key=lambda t: t[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {text} ({measured})")
