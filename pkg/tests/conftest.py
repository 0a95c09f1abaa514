import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bandshare.model import SystemParams  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture
def default():
    return SystemParams()


@pytest.fixture
def wifi_only():
    return SystemParams(lambda_total=0.0)


@pytest.fixture
def cc_only():
    return SystemParams(lambda_total=150.0, rho=0.0, lambda_wifi=0.0)


@pytest.fixture
def silent():
    return SystemParams(lambda_total=0.0, lambda_wifi=0.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
