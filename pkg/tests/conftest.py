import numpy as np
import pytest
from hypothesis import strategies as st

from fassoc import make_power, make_theta
from fassoc.table import ProbabilityTable

POWER_PARAMS = (0.0, 0.5, 1.0, 1.5)
THETA_PARAMS = (0.0, 0.3, 0.5, 0.9)
BUILTIN_SPECS = [make_power(lam) for lam in POWER_PARAMS] + [make_theta(t) for t in THETA_PARAMS]


@st.composite
def positive_tables(draw, min_dim=2, max_dim=6):
    """Strictly positive probability tables with dims in [min_dim, max_dim]."""
    r = draw(st.integers(min_dim, max_dim))
    c = draw(st.integers(min_dim, max_dim))
    cells = draw(st.lists(st.floats(0.01, 1.0), min_size=r * c, max_size=r * c))
    p = np.array(cells).reshape(r, c)
    return ProbabilityTable(p / p.sum())


@st.composite
def independent_tables(draw, min_dim=2, max_dim=6):
    r = draw(st.integers(min_dim, max_dim))
    c = draw(st.integers(min_dim, max_dim))
    a = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=r, max_size=r)))
    b = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=c, max_size=c)))
    p = np.outer(a / a.sum(), b / b.sum())
    return ProbabilityTable(p / p.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_positive(rng, r, c):
    p = rng.uniform(0.02, 1.0, size=(r, c))
    return ProbabilityTable(p / p.sum())


# one "[PASS]/[FAIL] criterion N" line per acceptance check, echoed in the summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
