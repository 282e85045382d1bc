import numpy as np
import pytest

from sqdmnp import DriveSpec, SystemParams, gold_table
from sqdmnp.kernels import available_backends


@pytest.fixture(scope="session")
def gold():
    return gold_table()


@pytest.fixture
def reference_params():
    return SystemParams(drive=DriveSpec(E0=0.41e6))


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param


def random_density(rng, rank=4):
    a = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_pure(rng, dim=4):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def random_unitary(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_qubit_state(rng):
    """Random single-qubit density matrix, mixed or pure."""
    v = rng.normal(size=3)
    v *= rng.uniform(0, 1) ** (1 / 3) / np.linalg.norm(v)
    sx = np.array([[0, 1], [1, 0]])
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([1, -1])
    return 0.5 * (np.eye(2) + v[0] * sx + v[1] * sy + v[2] * sz)


# acceptance criteria outcomes, filled by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split("-")[1])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key:6s} {'PASS' if ok else 'FAIL'}  {detail}")
