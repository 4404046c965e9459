import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ckrg.birkhoff import decompose  # noqa: E402
from ckrg.rg import beta_function, compute_M  # noqa: E402
from ckrg.toy import LADDER, MELLIN, build_character  # noqa: E402
from ckrg.trees import TreeAlgebra  # noqa: E402


class Decomposed:
    def __init__(self, rule, degree):
        self.algebra = TreeAlgebra(degree)
        self.phi = build_character(rule, self.algebra)
        self.pair = decompose(self.phi)
        self.beta = beta_function(self.pair)
        self.M = compute_M(self.pair, self.beta)


@pytest.fixture(scope="session")
def ladder():
    return Decomposed(LADDER, 5)


@pytest.fixture(scope="session")
def mellin():
    return Decomposed(MELLIN, 5)


@pytest.fixture(scope="session", params=["ladder", "mellin"])
def any_rule(request, ladder, mellin):
    return {"ladder": ladder, "mellin": mellin}[request.param]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
