import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from conftest import random_density
from sqdmnp.constants import HBAR
from sqdmnp.dynamics import (
    Trajectory,
    _sanitize,
    default_horizon,
    hamiltonian,
    integrate,
    relaxation,
    rhs,
    sample_times,
    tilde_polarizations,
)
from sqdmnp.errors import IntegrityError, StiffnessError
from sqdmnp.model import Couplings, DriveSpec, SystemParams, basis_density, couplings_for, derive_couplings


def ket_sum(a, b):
    psi = np.zeros(4, complex)
    psi[[a, b]] = 1 / np.sqrt(2)
    return np.outer(psi, psi.conj())


def bare_couplings(**kw):
    values = dict(G1=0j, G2=0j, F=0j, Omega1=0j, Omega2=0j, delta=0.0, eff1=8 / 3, eff2=8 / 3, gamma=0j)
    values.update(kw)
    return Couplings(**values)


QUIET = SystemParams(gamma=0.0, gamma_em=0.0)


def test_tilde_polarizations():
    assert tilde_polarizations(basis_density("gg")) == (0, 0)
    assert tilde_polarizations(ket_sum(0, 1)) == pytest.approx((0.5, 0))
    assert tilde_polarizations(ket_sum(0, 2)) == pytest.approx((0, 0.5))


def test_hamiltonian_diagonal_example():
    p = SystemParams(omega1=2.4, omega2=2.6, drive=DriveSpec(omega=2.5))
    H = hamiltonian(basis_density("gg"), 0.0, bare_couplings(), p)
    w, w1, w2 = 2.5 / HBAR, 2.4 / HBAR, 2.6 / HBAR
    np.testing.assert_allclose(H + w * np.eye(4), np.diag([w, w1, w2, w1 + w2 - w]), rtol=1e-14)
    p = SystemParams()
    np.testing.assert_array_equal(hamiltonian(basis_density("gg"), 0.0, bare_couplings(), p), 0)


def test_hamiltonian_feedback_example():
    rho = np.diag([0.7, 0.1, 0.1, 0.1]).astype(complex)
    rho[0, 1] = rho[1, 0] = 0.3
    rho[0, 2] = rho[2, 0] = 0.1
    c = bare_couplings(G1=1 + 0j, F=0.5 + 0j)
    H = hamiltonian(rho, 0.0, c, SystemParams())
    # H1 = G1 p1 + F p2 sits at (1,2) and (3,4) with the overall minus sign
    assert H[0, 1] == pytest.approx(-0.35)
    assert H[2, 3] == pytest.approx(-0.35)


def test_hamiltonian_symmetric_case(gold):
    p = SystemParams(gamma=0.8, drive=DriveSpec(E0=0.41e6))
    c = couplings_for(p, gold)
    rng = np.random.default_rng(3)
    rho = random_density(rng).real.astype(complex)
    rho[0, 1] = rho[1, 0] = rho[0, 2] = rho[2, 0]  # p1 = p2
    rho[2, 3] = rho[3, 2] = rho[1, 3] = rho[3, 1]
    H = hamiltonian(rho, 0.0, c, p)
    assert H[0, 1] == H[0, 2]
    assert np.all(H.imag == 0)
    np.testing.assert_array_equal(H, H.T)


def test_delta_placement():
    H = hamiltonian(basis_density("gg"), 0.0, bare_couplings(delta=-0.4), SystemParams())
    assert H[1, 2] == H[2, 1] == -0.4
    assert np.count_nonzero(H) == 2


def test_relaxation_examples():
    p = SystemParams()
    np.testing.assert_array_equal(relaxation(basis_density("gg"), p), 0)
    tau = 800.0
    d = -relaxation(basis_density("eg"), p)  # |3><3|
    assert d[0, 0] == pytest.approx(1 / tau)
    assert d[2, 2] == pytest.approx(-1 / tau)
    d = -relaxation(basis_density("ge"), p)  # |2><2|
    assert d[0, 0] == pytest.approx(1 / tau)
    assert d[1, 1] == pytest.approx(-1 / tau)
    p = SystemParams(tau1=0.4, tau2=0.8)
    assert -relaxation(basis_density("ge"), p)[1, 1] == pytest.approx(-1 / 400)
    assert -relaxation(basis_density("eg"), p)[2, 2] == pytest.approx(-1 / 800)


def test_pure_dephasing():
    rho = ket_sum(0, 1)
    p = QUIET.replace(T1=0.2, T2=0.5)
    d = rhs(rho, 0.0, derive_couplings(p, 0.0), p)
    assert d[0, 1] == pytest.approx(-rho[0, 1] / 200.0, rel=1e-14)
    rho = ket_sum(0, 2)
    d = rhs(rho, 0.0, derive_couplings(p, 0.0), p)
    assert d[0, 2] == pytest.approx(-rho[0, 2] / 500.0, rel=1e-14)


def test_stationary_rhs():
    c = derive_couplings(QUIET, 0.0)
    np.testing.assert_array_equal(rhs(basis_density("gg"), 0.0, c, QUIET), 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 100))
def test_rhs_traceless_and_hermitian(seed, t):
    rng = np.random.default_rng(seed)
    rho = random_density(rng)
    p = SystemParams(omega1=2.49, omega2=2.51, mu1=1.5, R2=12, gamma=0.5 + 1.2j,
                     drive=DriveSpec(E0=1e6, mode="sech"))
    c = derive_couplings(p, p.gamma)
    d = rhs(rho, t, c, p)
    G = relaxation(rho, p)
    scale = np.max(np.abs(d))
    assert abs(np.trace(d)) <= 1e-13 * scale
    assert np.max(np.abs(d - d.conj().T)) <= 1e-13 * scale
    assert abs(np.trace(G)) <= 1e-15
    assert np.max(np.abs(G - G.conj().T)) <= 1e-15


def rk4(params, c, t0, t1, dt):
    rho = np.array(params.rho0)
    n = int(round((t1 - t0) / dt))
    for k in range(n):
        t = t0 + k * dt
        k1 = rhs(rho, t, c, params)
        k2 = rhs(rho + 0.5 * dt * k1, t + 0.5 * dt, c, params)
        k3 = rhs(rho + 0.5 * dt * k2, t + 0.5 * dt, c, params)
        k4 = rhs(rho + dt * k3, t + dt, c, params)
        rho = rho + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


@pytest.fixture(scope="module")
def rk4_cases(gold):
    cw = SystemParams(drive=DriveSpec(E0=0.41e6))
    pulse = SystemParams(drive=DriveSpec(E0=0.41e6, mode="sech"), rho0=0.5 * (basis_density("gg") + basis_density("ee")))
    cases = []
    for p, span in ((cw, (0.0, 1.0)), (pulse, (22.0, 23.0))):
        c = couplings_for(p, gold)
        cases.append((p, c, span, rk4(p, c, *span, 1e-4)))
    return cases


def test_rk4_oracle(rk4_cases, backend):
    for p, c, span, expected in rk4_cases:
        traj = integrate(p, c, span, sample_dt=0.25, backend=backend)
        np.testing.assert_allclose(traj.times[-1], span[1])
        assert np.max(np.abs(traj.states[-1] - expected)) < 1e-7


def test_scipy_cross_check(gold, backend):
    p = SystemParams(drive=DriveSpec(E0=0.41e6))
    c = couplings_for(p, gold)
    times = np.arange(0.0, 20.0 + 1e-9, 0.5)

    def f(t, y):
        return rhs(y.reshape(4, 4), t, c, p).reshape(16)

    ref = solve_ivp(f, (0, 20), np.array(p.rho0).reshape(16), method="DOP853",
                    t_eval=times, rtol=1e-12, atol=1e-14)
    traj = integrate(p, c, (0.0, 20.0), sample_dt=0.5, backend=backend)
    np.testing.assert_allclose(traj.times, times)
    err = np.abs(traj.states.reshape(-1, 16) - ref.y.T).max()
    assert err < 1e-6


def test_stationary_trajectory(backend):
    p = QUIET
    traj = integrate(p, derive_couplings(p, 0.0), (0.0, 100.0), backend=backend)
    assert np.max(np.abs(traj.states - basis_density("gg"))) < 1e-9
    assert np.all(traj.eof == 0)


def test_decay_oracle(backend):
    p = QUIET.replace(rho0="eg")
    traj = integrate(p, derive_couplings(p, 0.0), (0.0, 2400.0), sample_dt=10.0, backend=backend)
    exact = np.exp(-traj.times / 800.0)
    assert np.max(np.abs(traj.populations[:, 2] - exact)) < 1e-6
    assert np.max(np.abs(traj.populations[:, 0] - (1 - exact))) < 1e-6


@pytest.mark.parametrize("mode", ["cw", "sech"])
def test_local_drive_cannot_entangle(mode, backend):
    p = SystemParams(gamma=0.0, gamma_em=0.0, drive=DriveSpec(E0=0.41e6, mode=mode))
    traj = integrate(p, derive_couplings(p, 0.0), backend=backend)
    assert traj.eof.max() < 1e-9
    assert traj.populations[:, 1:].max() > 1e-3  # the dots were actually driven


def test_sampling_grid():
    t = sample_times(0.0, 1.0, 0.3)
    np.testing.assert_allclose(t, [0, 0.3, 0.6, 0.9, 1.0])
    assert len(sample_times(0.0, 150.0, 0.05)) == 3001
    assert default_horizon(DriveSpec()) == 150.0
    assert default_horizon(DriveSpec(mode="sech")) == 60.0


def test_integrate_argument_errors(reference_params):
    c = derive_couplings(reference_params, 0.0)
    with pytest.raises(ValueError):
        integrate(reference_params, c, (1.0, 0.0))
    with pytest.raises(ValueError):
        integrate(reference_params, c, (0.0, 1.0), rel_tol=0)


def test_stiffness_error(reference_params, backend):
    c = derive_couplings(reference_params, 1.0)
    with pytest.raises(StiffnessError) as info:
        integrate(reference_params, c, (0.0, 50.0), backend=backend, max_steps=10)
    assert info.value.state.shape == (4, 4)
    assert 0 < info.value.t < 50


def test_sanitize_guards():
    times = np.array([0.0, 1.0])
    ok = np.array([basis_density("gg")] * 2)
    states, pops, err = _sanitize(ok, times)
    np.testing.assert_array_equal(err, 0)
    drift = ok.copy()
    drift[1, 0, 0] = 1 + 1e-7
    states, _, err = _sanitize(drift, times)
    assert err[1] == pytest.approx(1e-7)
    assert np.trace(states[1]).real == pytest.approx(1, abs=1e-15)
    bad = ok.copy()
    bad[1, 0, 0] = 1.01
    with pytest.raises(IntegrityError):
        _sanitize(bad, times)
    neg = ok.copy()
    neg[1] = np.diag([1.001, -0.001, 0, 0])
    with pytest.raises(IntegrityError):
        _sanitize(neg, times)


def test_trajectory_validation():
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 0.0]), np.zeros((2, 4, 4)), np.zeros(2), np.zeros(2), np.zeros((2, 4)))
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 1.0]), np.zeros((1, 4, 4)), np.zeros(2), np.zeros(2), np.zeros((2, 4)))
