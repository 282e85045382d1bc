import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density, random_pure, random_qubit_state, random_unitary
from sqdmnp.entanglement import binary_entropy, concurrence, eof, report, spin_flip
from sqdmnp.errors import DomainError, IntegrityError

EOF_HALF = 0.354578902665269884  # mpmath oracle for h((1 + sqrt(0.75)) / 2)

PHI_PLUS = np.zeros((4, 4), complex)
PHI_PLUS[np.ix_([0, 3], [0, 3])] = 0.5
GG = np.diag([1.0, 0, 0, 0]).astype(complex)
EE = np.diag([0, 0, 0, 1.0]).astype(complex)


def werner(p):
    return p * PHI_PLUS + (1 - p) * np.eye(4) / 4


def test_spin_flip_examples():
    np.testing.assert_allclose(spin_flip(np.eye(4) / 4), np.eye(4) / 4, atol=1e-16)
    np.testing.assert_allclose(spin_flip(GG), EE, atol=1e-16)
    np.testing.assert_allclose(spin_flip(PHI_PLUS), PHI_PLUS, atol=1e-16)


def test_concurrence_examples():
    assert concurrence(PHI_PLUS) == pytest.approx(1.0, abs=1e-12)
    assert concurrence(GG) == 0.0
    assert concurrence(werner(0.5)) == pytest.approx(0.25, abs=1e-12)
    assert concurrence(werner(0.2)) == 0.0


def test_eof_examples():
    assert eof(0.0) == 0.0
    assert eof(1.0) == 1.0
    assert eof(0.5) == pytest.approx(EOF_HALF, abs=1e-15)
    x = (1 + np.sqrt(0.75)) / 2
    assert eof(0.5) == pytest.approx(float(binary_entropy(x)), abs=1e-14)


def test_eof_domain():
    with pytest.raises(DomainError):
        eof(1.1)
    with pytest.raises(DomainError):
        eof(-0.01)
    assert eof(1 + 1e-13) == 1.0


def test_negative_state_rejected():
    with pytest.raises(IntegrityError):
        concurrence(np.diag([1.1, -0.1, 0, 0]).astype(complex))


def test_eof_strictly_increasing():
    c = np.arange(1, 1001) * 1e-3
    assert np.all(np.diff(eof(c)) > 0)
    assert eof(1e-3) > 0


def test_report_consistency():
    r = report(werner(0.8))
    assert r.concurrence == pytest.approx(0.7, abs=1e-12)
    assert list(r.sqrt_eigs) == sorted(r.sqrt_eigs, reverse=True)
    assert min(r.sqrt_eigs) >= 0
    assert r.eof == eof(r.concurrence)


def test_batched_matches_single():
    rng = np.random.default_rng(1)
    stack = np.array([random_density(rng) for _ in range(20)])
    batch = concurrence(stack)
    assert batch.shape == (20,)
    np.testing.assert_array_equal(batch, [concurrence(r) for r in stack])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, rank=int(rng.integers(1, 5)))
    U = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
    assert concurrence(U @ rho @ U.conj().T) == pytest.approx(concurrence(rho), abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pure_state_formula(seed):
    rng = np.random.default_rng(seed)
    psi = random_pure(rng)
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    expected = abs(psi.conj() @ yy @ psi.conj())
    assert concurrence(np.outer(psi, psi.conj())) == pytest.approx(expected, abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_product_states_unentangled(seed):
    rng = np.random.default_rng(seed)
    rho = np.kron(random_qubit_state(rng), random_qubit_state(rng))
    assert concurrence(rho) <= 1e-10
    assert eof(concurrence(rho)) <= 1e-10


@given(st.floats(0, 1))
def test_eof_zero_iff_concurrence_zero(c):
    e = eof(c)
    assert 0 <= e <= 1
    assert (e <= 1e-12) == (c <= 1e-12) or c < 1e-5
