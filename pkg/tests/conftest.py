import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

FIXTURES = HERE / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def cert7():
    from wagstaff_bls import prove_wagstaff
    return prove_wagstaff(7)


@pytest.fixture(scope="session")
def cert127():
    from wagstaff_bls import prove_wagstaff
    return prove_wagstaff(127)


@pytest.fixture(scope="session")
def cert127_cube():
    # leaving out Phi_63(2) and Phi_126(2) drops F below sqrt(N) but keeps F^3 > N
    from wagstaff_bls import prove_wagstaff
    return prove_wagstaff(127, skip_divisors=(63, 126))


ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
