import numpy as np
import pytest

from fermiproc.fock import FockBasis
from fermiproc.register import MixedRegister


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def kron_ladder(L: int, mode: int) -> np.ndarray:
    """Annihilator on mode ``mode`` built directly as a Kronecker product with a parity string.

    The integer state index has mode 0 as its lowest bit, so mode 0 is the
    rightmost factor.
    """
    a = np.array([[0, 1], [0, 0]], dtype=np.complex128)
    z = np.diag([1.0, -1.0]).astype(np.complex128)
    out = np.eye(1, dtype=np.complex128)
    for m in range(L - 1, -1, -1):
        factor = a if m == mode else (z if m < mode else np.eye(2))
        out = np.kron(out, factor)
    return out


def qubit_op(op: np.ndarray, q: int, nq: int) -> np.ndarray:
    return np.kron(np.kron(np.eye(1 << (nq - 1 - q)), op), np.eye(1 << q))


def register_states(kinds, basis: FockBasis, rng, count=3):
    nq = sum(k == "q" for k in kinds)
    out = []
    for _ in range(count):
        v = rng.normal(size=(basis.dim, 1 << nq)) + 1j * rng.normal(size=(basis.dim, 1 << nq))
        out.append(MixedRegister(kinds, basis, v / np.linalg.norm(v)))
    return out


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
