import numpy as np
import pytest

from fwkit import Box, KSparse, L1Ball, L2Ball, Simplex

ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ALL_REGIONS = [
    Simplex(5),
    Box(4, -1.0, 2.0),
    KSparse(6, 2, 1.5),
    L1Ball(5, 2.0),
    L2Ball(4, 3.0),
]


@pytest.fixture(params=ALL_REGIONS, ids=lambda r: r.kind)
def region(request):
    return request.param
