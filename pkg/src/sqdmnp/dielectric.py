"""Tabulated metal permittivity and the small-sphere response factor."""

import csv
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateAbscissaError,
    OutOfRangeError,
    PlasmonPoleError,
    TableFormatError,
)

__all__ = [
    "DielectricTable",
    "load_table",
    "gold_table",
    "permittivity",
    "gamma_factor",
    "peak_response",
]

GOLD_TABLE_FILE = "johnson_christy_au.csv"


@dataclass(frozen=True, eq=False)
class DielectricTable:
    """Complex permittivity of the metal sampled on an increasing photon-energy grid."""

    energy_ev: np.ndarray
    eps_re: np.ndarray
    eps_im: np.ndarray
    source_label: str = ""
    _eps: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        energy = np.array(self.energy_ev, dtype=float)
        re = np.array(self.eps_re, dtype=float)
        im = np.array(self.eps_im, dtype=float)
        if energy.ndim != 1 or not (energy.shape == re.shape == im.shape):
            raise TableFormatError("energy, eps_re and eps_im must be 1-D arrays of equal length")
        if energy.size < 2:
            raise TableFormatError("a dielectric table needs at least two rows")
        if np.any(np.diff(energy) <= 0):
            raise TableFormatError("photon energies must be strictly increasing")
        if np.any(im < 0):
            raise TableFormatError("negative Im(eps): the table describes an active medium")
        for arr in (energy, re, im):
            arr.setflags(write=False)
        object.__setattr__(self, "energy_ev", energy)
        object.__setattr__(self, "eps_re", re)
        object.__setattr__(self, "eps_im", im)
        object.__setattr__(self, "_eps", re + 1j * im)

    @property
    def rows(self):
        return list(zip(self.energy_ev.tolist(), self.eps_re.tolist(), self.eps_im.tolist()))

    @property
    def energy_range(self):
        return float(self.energy_ev[0]), float(self.energy_ev[-1])

    def __len__(self):
        return self.energy_ev.size


def _read_rows(lines):
    data = (line for line in lines if line.strip() and not line.lstrip().startswith("#"))
    reader = csv.reader(data)
    try:
        header = [h.strip().lower() for h in next(reader)]
    except StopIteration:
        raise TableFormatError("empty dielectric table") from None
    return header, [row for row in reader if row]


def load_table(path, source_label=None):
    """Read a permittivity CSV with columns ``energy_ev,eps_re,eps_im`` or ``energy_ev,n,k``.

    Lines starting with ``#`` are ignored. Rows are sorted by energy; a
    repeated energy raises :class:`DuplicateAbscissaError`.
    """
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        header, rows = _read_rows(fh)

    cols = {name: i for i, name in enumerate(header)}
    if "energy_ev" not in cols:
        raise TableFormatError(f"{path}: missing 'energy_ev' column (got {header})")
    if {"eps_re", "eps_im"} <= cols.keys():
        kind, a, b = "eps", cols["eps_re"], cols["eps_im"]
    elif {"n", "k"} <= cols.keys():
        kind, a, b = "nk", cols["n"], cols["k"]
    else:
        raise TableFormatError(f"{path}: expected eps_re,eps_im or n,k columns (got {header})")

    try:
        values = np.array(
            [[float(r[cols["energy_ev"]]), float(r[a]), float(r[b])] for r in rows],
            dtype=float,
        )
    except (ValueError, IndexError) as exc:
        raise TableFormatError(f"{path}: malformed row ({exc})") from None
    if values.shape[0] < 2:
        raise TableFormatError(f"{path}: need at least two data rows")

    values = values[np.argsort(values[:, 0], kind="stable")]
    if np.any(np.diff(values[:, 0]) == 0):
        raise DuplicateAbscissaError(f"{path}: repeated photon energy in table")

    if kind == "nk":
        eps = (values[:, 1] + 1j * values[:, 2]) ** 2
        re, im = eps.real, eps.imag
    else:
        re, im = values[:, 1], values[:, 2]
    return DielectricTable(values[:, 0], re, im, source_label or path.name)


def gold_table():
    """The bundled Johnson & Christy gold table."""
    ref = resources.files("sqdmnp") / "data" / GOLD_TABLE_FILE
    with resources.as_file(ref) as path:
        return load_table(path, source_label="Au, Johnson & Christy (1972)")


def permittivity(table, omega):
    """Linearly interpolated permittivity at photon energy ``omega`` (eV).

    Real and imaginary parts are interpolated independently. No extrapolation.
    """
    w = np.asarray(omega, dtype=float)
    lo, hi = table.energy_range
    if np.any(~np.isfinite(w)) or np.any(w < lo) or np.any(w > hi):
        raise OutOfRangeError(f"photon energy {omega} eV outside table range [{lo}, {hi}] eV")
    re = np.interp(w, table.energy_ev, table.eps_re)
    im = np.interp(w, table.energy_ev, table.eps_im)
    out = re + 1j * im
    return complex(out) if out.ndim == 0 else out


def gamma_factor(eps_m, eps_b=1.0):
    """Dipolar response of a small sphere, ``(eps_m - eps_b) / (2 eps_b + eps_m)``.

    Accepts scalars or arrays of ``eps_m``.
    """
    denom = 2 * eps_b + np.asarray(eps_m)
    if np.any(np.abs(denom) <= 1e-12 * abs(eps_b)):
        raise PlasmonPoleError(f"eps_m sits on the Froehlich pole for eps_b = {eps_b}")
    out = (eps_m - eps_b) / denom
    return complex(out) if np.ndim(out) == 0 else out


def peak_response(table, eps_b=1.0, step=1e-3):
    """Photon energy (eV) and value of the largest ``|gamma|`` over the table range."""
    lo, hi = table.energy_range
    n = max(int(round((hi - lo) / step)) + 1, 2)
    grid = np.unique(np.concatenate([np.linspace(lo, hi, n), table.energy_ev]))
    eps = permittivity(table, grid)
    gamma = (eps - eps_b) / (2 * eps_b + eps)
    i = int(np.argmax(np.abs(gamma)))
    return float(grid[i]), complex(gamma[i])
