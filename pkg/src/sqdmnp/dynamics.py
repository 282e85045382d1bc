"""Rotating-frame master equation of the two-dot density matrix.

Basis order: |1> = |g1 g2>, |2> = |g1 e2>, |3> = |e1 g2>, |4> = |e1 e2>.

The functions :func:`hamiltonian`, :func:`relaxation` and :func:`rhs` are the
readable reference forms. Time stepping runs in a backend kernel (compiled
or pure Python, see :mod:`sqdmnp.kernels`) that evaluates the same right-hand
side from a packed parameter vector built by :func:`pack_parameters`.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .constants import HBAR
from .entanglement import concurrence, eof
from .errors import IntegrityError, StiffnessError
from .model import envelope

__all__ = [
    "Trajectory",
    "tilde_polarizations",
    "hamiltonian",
    "relaxation",
    "rhs",
    "pack_parameters",
    "integrate",
    "default_horizon",
    "sample_times",
]

log = logging.getLogger(__name__)

_ONES = np.ones((2, 2))
_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_SZ = np.diag([1.0, -1.0])
# (ones (x) sigma_x) and (sigma_x (x) ones) used as element-wise masks
_MASK_1 = np.kron(_ONES, _SX)
_MASK_2 = np.kron(_SX, _ONES)

TRACE_RENORM_TOL = 1e-9
INTEGRITY_TOL = 1e-6
NEGATIVE_POPULATION_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    eof: np.ndarray
    concurrence: np.ndarray
    populations: np.ndarray
    trace_error: np.ndarray = None
    n_steps: int = 0
    n_rejected: int = 0
    backend: str = ""
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.times)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        for name in ("states", "eof", "concurrence", "populations"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"trajectory field {name!r} has wrong length")
        if self.trace_error is None:
            object.__setattr__(self, "trace_error", np.zeros(n))

    def __len__(self):
        return len(self.times)


def tilde_polarizations(rho):
    """Slowly varying dipole amplitudes ``(rho12 + rho34, rho13 + rho24)``."""
    return rho[0, 1] + rho[2, 3], rho[0, 2] + rho[1, 3]


def _diagonal(params):
    """Rotating-frame level energies in 1/ps, the common ``omega`` removed."""
    w = params.drive.omega
    return (
        0.0,
        (params.omega1 - w) / HBAR,
        (params.omega2 - w) / HBAR,
        (params.omega1 + params.omega2 - 2 * w) / HBAR,
    )


def hamiltonian(rho, t, c, params):
    """RWA Hamiltonian divided by hbar (1/ps), including the MNP feedback on ``rho``."""
    p1, p2 = tilde_polarizations(rho)
    f = envelope(t, params.drive)
    H1 = c.Omega1 * f + c.G1 * p1 + c.F * p2
    H2 = c.Omega2 * f + c.G2 * p2 + c.F * p1
    H1c, H2c = np.conj(H1), np.conj(H2)
    H = -np.array(
        [
            [0, H1, H2, 0],
            [H1c, 0, 0, H2],
            [H2c, 0, 0, H1],
            [0, H2c, H1c, 0],
        ],
        dtype=complex,
    )
    H[np.diag_indices(4)] = _diagonal(params)
    H[1, 2] += c.delta
    H[2, 1] += c.delta
    assert np.max(np.abs(H - H.conj().T)) <= 1e-14 * max(1.0, np.max(np.abs(H)))
    return H


def _block(rho, a, b):
    return np.array([[rho[a, a], rho[a, b]], [rho[b, a], rho[b, b]]])


def relaxation(rho, params):
    """Dephasing and exciton decay matrix in 1/ps (subtracted from d rho/dt)."""
    T1, T2 = params.T1 * 1e3, params.T2 * 1e3
    tau1, tau2 = params.tau1 * 1e3, params.tau2 * 1e3
    gamma = (
        _MASK_1 * rho / T1
        + _MASK_2 * rho / T2
        - np.kron(_SZ, _block(rho, 2, 3)) / tau2
        - np.kron(_block(rho, 1, 3), _SZ) / tau1
    )
    return gamma


def rhs(rho, t, c, params):
    """``d rho / dt = i [rho, H/hbar] - Gamma(rho)``."""
    H = hamiltonian(rho, t, c, params)
    return 1j * (rho @ H - H @ rho) - relaxation(rho, params)


def pack_parameters(c, params):
    """Flat float64 parameter vector consumed by the backend kernels."""
    d = params.drive
    d2, d3, d4 = _diagonal(params)[1:]
    sech = d.mode == "sech"
    return np.array(
        [
            d2, d3, d4,
            c.G1.real, c.G1.imag,
            c.G2.real, c.G2.imag,
            c.F.real, c.F.imag,
            c.Omega1.real, c.Omega1.imag,
            c.Omega2.real, c.Omega2.imag,
            c.delta,
            1e-3 / params.T1, 1e-3 / params.T2,
            1e-3 / params.tau1, 1e-3 / params.tau2,
            1.0 if sech else 0.0,
            d.t0 if sech else 0.0,
            d.tp if sech else 1.0,
            d.t_off if d.t_off is not None else math.inf,
        ],
        dtype=np.float64,
    )


def default_horizon(drive):
    """150 ps for cw drives, ``2 t0 + 5 tp`` for pulses."""
    if drive.mode == "sech":
        return 2 * drive.t0 + 5 * drive.tp
    return 150.0


def sample_times(t_start, t_end, sample_dt):
    n = int(math.floor((t_end - t_start) / sample_dt * (1 + 1e-12))) + 1
    times = t_start + sample_dt * np.arange(n)
    if t_end - times[-1] > 1e-9 * sample_dt:
        times = np.append(times, t_end)
    return times


def _sanitize(states, times):
    """Hermitize samples, renormalize drifting traces, and check integrity."""
    states = 0.5 * (states + np.conj(np.swapaxes(states, -1, -2)))
    tr = np.trace(states, axis1=-2, axis2=-1).real
    trace_err = np.abs(tr - 1.0)
    worst = float(trace_err.max())
    if worst > INTEGRITY_TOL:
        k = int(trace_err.argmax())
        raise IntegrityError(f"trace drifted by {worst:.3e} at t = {times[k]} ps")
    drift = trace_err > TRACE_RENORM_TOL
    if np.any(drift):
        log.info("renormalizing trace at %d samples (max error %.3e)", int(drift.sum()), worst)
        states[drift] /= tr[drift, None, None]
    pops = np.diagonal(states, axis1=-2, axis2=-1).real.copy()
    low = float(pops.min())
    if low < -INTEGRITY_TOL:
        raise IntegrityError(f"population {low:.3e} below zero")
    if low < -NEGATIVE_POPULATION_TOL:
        log.warning("negative population %.3e tolerated", low)
    return states, pops, trace_err


def integrate(params, c, t_span=None, sample_dt=0.05, rel_tol=1e-8, abs_tol=1e-10,
              backend=None, max_steps=10_000_000):
    """Integrate the master equation from ``params.rho0`` and sample it every ``sample_dt`` ps.

    Uses an adaptive Dormand-Prince 5(4) pair with dense output. Returns a
    :class:`Trajectory` with concurrence and entanglement of formation per
    sample.
    """
    if t_span is None:
        t_span = (0.0, default_horizon(params.drive))
    t_start, t_end = map(float, t_span)
    if not t_end > t_start:
        raise ValueError("t_span must be increasing")
    if not (rel_tol > 0 and abs_tol > 0 and sample_dt > 0):
        raise ValueError("tolerances and sample_dt must be > 0")

    kern = kernels.get_backend(backend)
    times = sample_times(t_start, t_end, sample_dt)
    pvec = pack_parameters(c, params)
    y0 = np.ascontiguousarray(params.rho0, dtype=complex).reshape(16)
    status, raw, n_steps, n_rejected, t_fail, y_fail = kern.integrate(
        y0, pvec, times, rel_tol, abs_tol, max_steps
    )
    if status != 0:
        reason = "step size underflow" if status == 1 else "maximum number of steps exceeded"
        raise StiffnessError(
            f"{reason} at t = {t_fail:.6g} ps", t=t_fail, state=np.asarray(y_fail).reshape(4, 4)
        )

    states, pops, trace_err = _sanitize(np.asarray(raw).reshape(-1, 4, 4), times)
    conc = concurrence(states)
    return Trajectory(
        times=times,
        states=states,
        eof=eof(conc),
        concurrence=conc,
        populations=pops,
        trace_error=trace_err,
        n_steps=int(n_steps),
        n_rejected=int(n_rejected),
        backend=kern.NAME,
    )
