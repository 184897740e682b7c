import pytest

from hwgap.model import make_params


@pytest.fixture
def p100():
    return make_params(100, 1.0)


@pytest.fixture
def p10():
    return make_params(10, 1.0)


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split()[0])):
            terminalreporter.write_line(line)
