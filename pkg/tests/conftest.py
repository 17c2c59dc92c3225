import pytest

from wpsphere.volumes import get_table

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def table():
    return get_table(64, 400, 60)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1][2:])):
            terminalreporter.write_line(line)
