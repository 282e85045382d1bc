"""Physical constants in the package unit system.

Energies are in eV, times in ps, lengths in nm and dipole moments in e*nm.
Electric fields are given in V/m and converted once, at coupling derivation.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Constants",
    "CONSTANTS",
    "HBAR",
    "HBAR_C",
    "COULOMB_FACTOR",
    "FIELD_DIPOLE_TO_EV",
    "energy_to_angular_frequency",
]


@dataclass(frozen=True)
class Constants:
    hbar: float = 6.582119569e-4  # eV ps (CODATA 2018, exact-by-definition SI)
    hbar_c: float = 197.3269804  # eV nm
    coulomb_factor: float = 1.439964548  # e^2 / (4 pi eps0) in eV nm
    vacuum_permittivity_relative: float = 1.0


CONSTANTS = Constants()

HBAR = CONSTANTS.hbar
HBAR_C = CONSTANTS.hbar_c
COULOMB_FACTOR = CONSTANTS.coulomb_factor
# (1 e*nm) * (1 V/m) expressed in eV
FIELD_DIPOLE_TO_EV = 1e-9


def energy_to_angular_frequency(energy):
    """Convert an energy in eV (scalar or array) to angular frequency in 1/ps."""
    return np.divide(energy, HBAR)
