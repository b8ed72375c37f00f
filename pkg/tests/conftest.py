import warnings
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

from ftgadgets.pauli import PauliString

FIXTURES = Path(__file__).parent / "fixtures"
ROOT = Path(__file__).resolve().parents[1]

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _quiet_distance_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="ancilla .* has distance")
        yield


@st.composite
def paulis(draw, n=None, min_n=1, max_n=4):
    if n is None:
        n = draw(st.integers(min_n, max_n))
    x = draw(st.integers(0, (1 << n) - 1))
    z = draw(st.integers(0, (1 << n) - 1))
    phase = draw(st.integers(0, 3))
    return PauliString(n, x, z, phase)


@st.composite
def pauli_pairs(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    return draw(paulis(n=n)), draw(paulis(n=n))


# acceptance summary -------------------------------------------------------

ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        ACCEPTANCE[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in sorted(ACCEPTANCE.items()):
        terminalreporter.write_line(f"{verdict}  {name}")
