"""Entanglement of two quantum dots coupled through a spherical metal nanoparticle."""

from .constants import CONSTANTS, energy_to_angular_frequency
from .dielectric import DielectricTable, gamma_factor, gold_table, load_table, permittivity
from .dynamics import Trajectory, hamiltonian, integrate, relaxation, rhs, tilde_polarizations
from .entanglement import concurrence, eof, spin_flip
from .kernels import available_backends, get_backend
from .model import (
    Couplings,
    DriveSpec,
    SystemParams,
    couplings_for,
    derive_couplings,
    direct_coupling,
    envelope,
    screening,
)

__version__ = "0.1.0"
