import numpy as np
import pytest

from qudit_teleport import PureState


def random_state(shape, register, rng):
    dim = shape.register_dim(register)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(shape, register, z / np.linalg.norm(z))


@pytest.fixture
def rng():
    return np.random.default_rng(20001)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
