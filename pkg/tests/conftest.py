import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vecmkit import Dataset, DgpSpec, generate  # noqa: E402

# alpha/beta of the five-series study fixture: y1..y3 cointegrated with rank 2,
# y4 and y5 independent random walks (weakly exogenous by construction)
STUDY_ALPHA = [[-0.6, 0.0], [0.2, -0.6], [0.1, 0.2], [0.0, 0.0], [0.0, 0.0]]
STUDY_BETA = [[1, 0], [0, 1], [-1, -0.5], [0, 0], [0, 0]]
STUDY_SEED = 4
STUDY_T = 100


def study_dataset() -> Dataset:
    d = generate(DgpSpec("vecm", {"alpha": STUDY_ALPHA, "beta": STUDY_BETA, "start": 1920},
                         T=STUDY_T, seed=STUDY_SEED))
    names = ["GDP", "FDI", "PRVT", "TRADE", "GOVCON"]
    return Dataset.from_matrix(names, d.time_index, d.matrix)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def study():
    return study_dataset()


@pytest.fixture(scope="session")
def bivariate_vecm():
    """y1 adjusts, y2 is weakly exogenous; beta = (1, -1)."""
    spec = DgpSpec("vecm", {"alpha": [[-0.5], [0.0]], "beta": [[1.0], [-1.0]],
                            "gamma": [[[0.2, 0.1], [0.0, 0.1]]]}, T=400, seed=11)
    return generate(spec)


@pytest.fixture(scope="session")
def trivariate():
    spec = DgpSpec("vecm", {"alpha": [[-0.4, 0.0], [0.1, -0.5], [0.0, 0.0]],
                            "beta": [[1, 0], [0, 1], [-1, -0.5]],
                            "gamma": [[[0.2, 0, 0], [0, 0.1, 0], [0, 0, 0.1]]]}, T=200, seed=7)
    return generate(spec)


def pytest_terminal_summary(terminalreporter):
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
