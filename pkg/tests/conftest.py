import math

import pytest

from tswaves.langer import make_context
from tswaves.profiles import blasius_profile
from tswaves.acceptance import scaling_profile

_LINES = []


def record_line(line: str) -> None:
    _LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def blasius():
    return blasius_profile()


@pytest.fixture(scope="session")
def stretched():
    return scaling_profile()


@pytest.fixture(scope="session")
def blasius_ctx(blasius):
    """Blasius, nu = 1e-8, m = 0.3, alpha = 0.03, c just above the base speed."""
    alpha = 0.03
    base = alpha / (blasius.wall_slope * math.sqrt(1 - 0.09))
    return make_context(blasius, 1e-8, 0.3, alpha, complex(base, 0.005))
