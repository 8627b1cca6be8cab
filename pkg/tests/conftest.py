import numpy as np
import pytest

from qpwork.events import forward_events, random_density_matrix, random_hermitian
from qpwork.process import HamiltonianProcess, HamiltonianSchedule, propagator, pure_state

SX = np.array([[0, 1], [1, 0]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
H01 = np.diag([0.0, 1.0]).astype(complex)
KET0 = np.diag([1.0, 0.0]).astype(complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)
MINUS = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)


def hadamard_process(rho):
    return HamiltonianProcess(H01, H01, HADAMARD, rho)


def random_process(seed, dim, state="pure"):
    """Random ramp between two random Hermitians with a random pure or mixed state."""
    rng = np.random.default_rng(seed)
    h0 = random_hermitian(rng, dim)
    h1 = random_hermitian(rng, dim)
    u = propagator(HamiltonianSchedule.linear_ramp(h0, h1, rng.uniform(0.5, 2.0), 16))
    if state == "pure":
        rho = pure_state(rng.normal(size=dim) + 1j * rng.normal(size=dim))
    else:
        rho = random_density_matrix(rng, dim)
    return HamiltonianProcess(h0, h1, u, rho)


@pytest.fixture
def hadamard_plus():
    proc = hadamard_process(PLUS)
    return proc, forward_events(proc)


@pytest.fixture
def hadamard_ground():
    proc = hadamard_process(KET0)
    return proc, forward_events(proc)


ACCEPTANCE_LINES = []


def record_acceptance(number, name, passed, detail):
    line = f"[{number}] {'PASS' if passed else 'FAIL'}  {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
