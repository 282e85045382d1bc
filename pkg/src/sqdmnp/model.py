"""System parameters and the derived MNP-mediated coupling rates.

All rates produced here are angular frequencies in 1/ps. Relaxation times
are stored in ns (the natural unit for quantum-dot lifetimes) and converted
when the equations of motion are assembled.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import COULOMB_FACTOR, FIELD_DIPOLE_TO_EV, HBAR, HBAR_C
from .dielectric import gamma_factor, permittivity
from .errors import DegenerateGeometryError

__all__ = [
    "DriveSpec",
    "SystemParams",
    "Couplings",
    "screening",
    "derive_couplings",
    "couplings_for",
    "direct_coupling",
    "envelope",
    "with_detuning",
    "resonant_delta_energy",
    "basis_density",
]

BASIS_LABELS = ("gg", "ge", "eg", "ee")


def basis_density(label):
    """Projector onto a basis state given by its label ('gg', 'ge', 'eg', 'ee')."""
    try:
        k = BASIS_LABELS.index(label)
    except ValueError:
        raise ValueError(f"unknown basis label {label!r}; expected one of {BASIS_LABELS}") from None
    rho = np.zeros((4, 4), dtype=complex)
    rho[k, k] = 1.0
    return rho


@dataclass(frozen=True)
class DriveSpec:
    """Laser field ``E0 f(t) cos(omega t)``.

    ``omega`` is the photon energy in eV. ``t_off`` (ps), when given, switches
    the field off for ``t >= t_off``.
    """

    E0: float = 0.0
    omega: float = 2.5
    mode: str = "cw"
    t0: float | None = None
    tp: float | None = None
    t_off: float | None = None

    def __post_init__(self):
        if self.mode not in ("cw", "sech"):
            raise ValueError(f"drive mode must be 'cw' or 'sech', got {self.mode!r}")
        if not (np.isfinite(self.E0) and self.E0 >= 0):
            raise ValueError("E0 must be finite and >= 0")
        if not self.omega > 0:
            raise ValueError("laser photon energy omega must be > 0")
        if self.mode == "cw":
            if self.t0 is not None or self.tp is not None:
                raise ValueError("t0/tp only apply to a sech pulse, not a cw drive")
        else:
            if self.t0 is None:
                object.__setattr__(self, "t0", 22.5)
            if self.tp is None:
                object.__setattr__(self, "tp", 3.0)
            if not self.tp > 0:
                raise ValueError("pulse width tp must be > 0")


@dataclass(frozen=True, eq=False)
class SystemParams:
    """Physical and geometric inputs of the SQD-MNP-SQD system.

    Units: energies eV, dipoles e*nm, lengths nm, times ns.

    ``gamma_em`` (1/ns) overrides the direct-coupling decay rate; ``None``
    takes the geometric mean ``sqrt(1/(T1*T2))`` and ``0`` switches the
    direct coupling off. ``gamma`` fixes the MNP response instead of looking
    it up in a dielectric table.

    ``conjugate_gamma`` selects how the (Im >= 0) tabulated response enters
    the rotating-frame couplings. The couplings multiply the exciton lowering
    operator, i.e. the ``exp(+i omega t)`` component of the dipole, whose
    response is ``conj(gamma)``. ``False`` uses ``gamma`` unchanged.
    """

    omega1: float = 2.5
    omega2: float = 2.5
    mu1: float = 2.2
    mu2: float = 2.2
    R1: float = 9.0
    R2: float = 9.0
    alpha: float = 2.0
    eps_b: complex = 1.0
    eps1: complex = 6.0
    eps2: complex = 6.0
    s_alpha: float = 2.0
    T1: float = 0.3
    T2: float = 0.3
    tau1: float = 0.8
    tau2: float = 0.8
    drive: DriveSpec = field(default_factory=DriveSpec)
    rho0: object = "gg"
    gamma_em: float | None = None
    gamma: complex | None = None
    conjugate_gamma: bool = True

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("MNP radius alpha must be > 0")
        if not (self.R1 > self.alpha and self.R2 > self.alpha):
            raise ValueError("SQD distances R1, R2 must exceed the MNP radius")
        for name in ("T1", "T2", "tau1", "tau2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("eps_b", "eps1", "eps2"):
            if not complex(getattr(self, name)).real > 0:
                raise ValueError(f"Re({name}) must be > 0")
        if self.s_alpha not in (2, -1):
            raise ValueError("s_alpha must be 2 (parallel) or -1 (perpendicular)")
        if self.gamma_em is not None and not self.gamma_em >= 0:
            raise ValueError("gamma_em must be >= 0")
        if not (self.omega1 > 0 and self.omega2 > 0):
            raise ValueError("exciton energies must be > 0")

        rho = basis_density(self.rho0) if isinstance(self.rho0, str) else np.array(self.rho0, dtype=complex)
        if rho.shape != (4, 4):
            raise ValueError("rho0 must be a 4x4 matrix or a basis label")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10 or abs(np.trace(rho) - 1) > 1e-8:
            raise ValueError("rho0 must be Hermitian with unit trace")
        rho.setflags(write=False)
        object.__setattr__(self, "rho0", rho)

    @property
    def decay_rate_em(self):
        """Direct-coupling decay rate in 1/ns."""
        if self.gamma_em is not None:
            return self.gamma_em
        return math.sqrt(1.0 / (self.T1 * self.T2))

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class Couplings:
    """Derived rates in 1/ps; ``gamma`` is the tabulated (physical) MNP response."""

    G1: complex
    G2: complex
    F: complex
    Omega1: complex
    Omega2: complex
    delta: float
    eff1: complex
    eff2: complex
    gamma: complex


def screening(eps_i, eps_b=1.0):
    """Field screening factor ``(2 eps_b + eps_i) / (3 eps_b)`` of a dielectric dot."""
    return (2 * eps_b + eps_i) / (3 * eps_b)


def direct_coupling(omega, R1, R2, gamma_em):
    """Retarded dipole-dipole coupling rate between the dots.

    ``omega`` in eV, distances in nm, ``gamma_em`` in 1/ns. Returns 1/ps.
    """
    if not omega > 0 or not gamma_em > 0 or not R1 + R2 > 0:
        raise ValueError("omega, R1 + R2 and gamma_em must all be > 0")
    zeta = omega * (R1 + R2) / HBAR_C
    if zeta < 1e-12:
        raise DegenerateGeometryError(f"retardation phase zeta = {zeta} too small")
    rate = gamma_em * 1e-3  # 1/ns -> 1/ps
    return -rate * 1.5 * (math.cos(zeta) / zeta**3 + math.sin(zeta) / zeta**2)


def derive_couplings(params, gamma, delta=None):
    """Self-feedback ``G_i``, cross-feedback ``F`` and Rabi rates ``Omega_i``.

    ``gamma`` is the MNP response at the laser energy. ``delta`` (1/ps) is
    computed from the geometry when omitted.
    """
    g = complex(gamma)
    g_rot = g.conjugate() if params.conjugate_gamma else g
    eps_b = params.eps_b
    eff1 = screening(params.eps1, eps_b)
    eff2 = screening(params.eps2, eps_b)
    a3 = params.alpha**3
    s = params.s_alpha

    # mu^2 / (4 pi eps0) in eV nm^3 is COULOMB_FACTOR * mu[e nm]^2
    G1 = g_rot * a3 * s**2 * COULOMB_FACTOR * params.mu1**2 / (eps_b * eff1**2 * params.R1**6 * HBAR)
    G2 = g_rot * a3 * s**2 * COULOMB_FACTOR * params.mu2**2 / (eps_b * eff2**2 * params.R2**6 * HBAR)
    F = (
        g_rot * a3 * s**2 * COULOMB_FACTOR * params.mu1 * params.mu2
        / (eps_b * eff1 * eff2 * params.R1**3 * params.R2**3 * HBAR)
    )

    E0 = params.drive.E0
    Omega1 = E0 * params.mu1 * FIELD_DIPOLE_TO_EV / (2 * HBAR * eff1) * (1 + g_rot * a3 * s / params.R1**3)
    Omega2 = E0 * params.mu2 * FIELD_DIPOLE_TO_EV / (2 * HBAR * eff2) * (1 + g_rot * a3 * s / params.R2**3)

    if delta is None:
        rate = params.decay_rate_em
        delta = direct_coupling(params.drive.omega, params.R1, params.R2, rate) if rate > 0 else 0.0

    return Couplings(
        G1=complex(G1),
        G2=complex(G2),
        F=complex(F),
        Omega1=complex(Omega1),
        Omega2=complex(Omega2),
        delta=float(delta),
        eff1=complex(eff1),
        eff2=complex(eff2),
        gamma=g,
    )


def couplings_for(params, table):
    """Couplings with ``gamma`` looked up at the laser energy (unless fixed in ``params``)."""
    if params.gamma is not None:
        gamma = complex(params.gamma)
    else:
        gamma = gamma_factor(permittivity(table, params.drive.omega), params.eps_b)
    return derive_couplings(params, gamma)


def envelope(t, drive):
    """Dimensionless field envelope ``f(t)``; works on scalars and arrays."""
    t = np.asarray(t, dtype=float)
    if drive.mode == "cw":
        f = np.ones_like(t)
    else:
        x = np.abs((t - drive.t0) / drive.tp)
        e = np.exp(-x)
        f = 2 * e / (1 + e * e)
    if drive.t_off is not None:
        f = np.where(t < drive.t_off, f, 0.0)
    return float(f) if f.ndim == 0 else f


def resonant_delta_energy(params):
    """``|delta|`` in eV evaluated at the exciton energy ``omega1``.

    Used as the unit for detunings quoted as multiples of the direct coupling.
    """
    rate = params.decay_rate_em
    if rate == 0:
        return 0.0
    return abs(direct_coupling(params.omega1, params.R1, params.R2, rate)) * HBAR


def with_detuning(params, detuning):
    """Copy of ``params`` with the laser at ``omega1 + detuning`` (eV)."""
    return replace(params, drive=replace(params.drive, omega=params.omega1 + detuning))
