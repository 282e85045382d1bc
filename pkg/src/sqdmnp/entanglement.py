"""Wootters concurrence and entanglement of formation of two-qubit states.

All functions accept a single 4x4 density matrix or a stack of shape (n, 4, 4).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IntegrityError

__all__ = ["EntanglementReport", "spin_flip", "concurrence", "eof", "binary_entropy", "report"]

_SY = np.array([[0.0, -1j], [1j, 0.0]])
_SYSY = np.kron(_SY, _SY)

NEGATIVE_EIG_TOL = 1e-10
# eigenvalues of rho this close to zero are rounding noise; their square
# roots would otherwise leak ~1e-8 into the concurrence
_EIG_FLOOR = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class EntanglementReport:
    concurrence: float
    eof: float
    sqrt_eigs: tuple


def spin_flip(rho):
    """``(sigma_y x sigma_y) rho* (sigma_y x sigma_y)``."""
    return _SYSY @ np.conj(rho) @ _SYSY


def _psd_sqrt(rho):
    w, v = np.linalg.eigh(rho)
    lowest = float(np.min(w))
    if lowest < -NEGATIVE_EIG_TOL:
        raise IntegrityError(f"density matrix eigenvalue {lowest:.3e} is too negative")
    scale = np.max(np.abs(w), axis=-1, keepdims=True)
    w = np.where(w > _EIG_FLOOR * scale, w, 0.0)
    return (v * np.sqrt(w)[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def _sqrt_eigs(rho):
    """Square roots of the eigenvalues of ``rho @ spin_flip(rho)``, descending.

    They are the singular values of ``sqrt(rho) sqrt(rho~)``, which avoids
    taking square roots of tiny eigenvalues of the product.
    """
    rho = np.asarray(rho, dtype=complex)
    rho = 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))
    s = _psd_sqrt(rho)
    s_flip = spin_flip(s)
    return np.linalg.svd(s @ s_flip, compute_uv=False)


def concurrence(rho):
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``."""
    sv = _sqrt_eigs(rho)
    c = sv[..., 0] - sv[..., 1] - sv[..., 2] - sv[..., 3]
    c = np.clip(c, 0.0, 1.0)
    return float(c) if c.ndim == 0 else c


def binary_entropy(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -x * np.log2(x) - (1 - x) * np.log2(1 - x)
    return np.where((x <= 0) | (x >= 1), 0.0, h)


def eof(c):
    """Entanglement of formation for concurrence ``c`` in [0, 1]."""
    c = np.asarray(c, dtype=float)
    if np.any(c < -1e-12) or np.any(c > 1 + 1e-12) or np.any(np.isnan(c)):
        raise DomainError("concurrence must lie in [0, 1]")
    c = np.clip(c, 0.0, 1.0)
    root = np.sqrt(1 - c * c)
    # small root x0 = (1 - root)/2 written without cancellation
    small = c * c / (2 * (1 + root))
    large = 1 - small
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -small * np.log2(small) - large * np.log2(large)
    h = np.where(small > 0, h, 0.0)
    h = np.clip(h, 0.0, 1.0)
    return float(h) if h.ndim == 0 else h


def report(rho):
    sv = _sqrt_eigs(rho)
    c = float(np.clip(sv[0] - sv[1] - sv[2] - sv[3], 0.0, 1.0))
    return EntanglementReport(concurrence=c, eof=eof(c), sqrt_eigs=tuple(float(x) for x in sv))
