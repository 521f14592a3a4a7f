import pytest

import bsppcc
from bsppcc.cli import read_sample
from bsppcc.montecarlo import paper_table

REPAIR_TIMES = [
    0.2, 0.3, 0.5, 0.5, 0.5, 0.5, 0.6, 0.6, 0.7, 0.7, 0.7, 0.8, 0.8, 1, 1, 1, 1, 1.1,
    1.3, 1.5, 1.5, 1.5, 1.5, 2, 2, 2.2, 2.5, 2.7, 3, 3, 3.3, 3.3, 4, 4, 4.5, 4.7, 5,
    5.4, 5.4, 7, 7.5, 8.8, 9, 10.3, 22, 24.5,
]
GLASS_FIBER = [
    0.37, 0.4, 0.7, 0.75, 0.8, 0.81, 0.83, 0.86, 0.92, 0.92, 0.94, 0.95, 0.98, 1.03,
    1.06, 1.06, 1.08, 1.09, 1.1, 1.1, 1.13, 1.14, 1.15, 1.17, 1.2, 1.2, 1.21, 1.22,
    1.25, 1.28, 1.28, 1.29, 1.29, 1.3, 1.35, 1.35, 1.37, 1.37, 1.38, 1.4, 1.4, 1.42,
    1.43, 1.51, 1.53, 1.61,
]


@pytest.fixture(scope="session")
def repair_times():
    return read_sample(bsppcc.dataset_path("repair_times"))


@pytest.fixture(scope="session")
def glass_fiber():
    return read_sample(bsppcc.dataset_path("glass_fiber"))


@pytest.fixture(scope="session")
def table():
    return paper_table()


ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k[2:])):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
