import numpy as np
import pytest
from hypothesis import settings, strategies as st

from collmodel.linalg import random_density_matrix
from collmodel.model import StepConfig

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def report():
    """Record one pass/fail line for the acceptance summary."""
    def _report(name, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip()
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


unit = st.floats(0.0, 1.0, allow_nan=False)
angles = st.floats(-10.0, 10.0, allow_nan=False)


@st.composite
def step_configs(draw, lossy=False):
    eta = st.floats(0.3, 1.0) if lossy else st.just(1.0)
    return StepConfig(r=draw(unit), T=draw(unit), theta=draw(angles), eta_s=draw(eta), eta_e=draw(eta))


@st.composite
def density_matrices(draw, n=4):
    seed = draw(st.integers(0, 2**32 - 1))
    rank = draw(st.integers(1, n))
    return random_density_matrix(n, np.random.default_rng(seed), rank=rank)
