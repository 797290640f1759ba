"""Truncated Fock space of a single oscillator.

States are plain complex ``numpy`` vectors of length ``space.dim`` and
operators are dense ``(dim, dim)`` complex arrays; :class:`FockSpace` only
carries the truncation and validates shapes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .exceptions import DimensionMismatch, TruncationError

__all__ = [
    "FockSpace",
    "annihilation",
    "creation",
    "number",
    "basis",
    "coherent_amplitudes",
    "coherent_state",
    "coherent_tail",
    "displacement",
    "hermitian_exp",
    "overlap",
    "interior",
]

# Largest Poisson tail mass tolerated beyond the last retained level.
TAIL_TOL = 1e-14


@dataclass(frozen=True)
class FockSpace:
    """Oscillator levels ``0 .. dim-1``."""

    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"FockSpace needs an integer dim >= 2, got {self.dim!r}")

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.dim)

    def check_state(self, psi) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex)
        if psi.shape[-1] != self.dim:
            raise DimensionMismatch(f"state of length {psi.shape[-1]} in space of dim {self.dim}")
        return psi


def annihilation(space: FockSpace) -> np.ndarray:
    """Lowering operator with ``<n-1|a|n> = sqrt(n)``."""
    return np.diag(np.sqrt(np.arange(1, space.dim, dtype=float)), 1).astype(complex)


def creation(space: FockSpace) -> np.ndarray:
    return annihilation(space).conj().T


def number(space: FockSpace) -> np.ndarray:
    return np.diag(space.levels.astype(complex))


def basis(n: int, space: FockSpace) -> np.ndarray:
    """Number state ``|n>``."""
    if not 0 <= n < space.dim:
        raise TruncationError(f"level {n} outside space of dim {space.dim}")
    psi = np.zeros(space.dim, dtype=complex)
    psi[n] = 1.0
    return psi


def coherent_tail(xi: complex, dim: int) -> float:
    """Probability mass of ``|xi>`` on levels ``n >= dim``."""
    return float(poisson.sf(dim - 1, abs(xi) ** 2))


def coherent_amplitudes(xi: complex, dim: int) -> np.ndarray:
    """Analytic Fock amplitudes ``exp(-|xi|^2/2) xi^n / sqrt(n!)`` for ``n < dim``.

    No truncation check and no renormalisation.
    """
    n = np.arange(dim)
    r = abs(xi)
    if r == 0.0:
        out = np.zeros(dim, dtype=complex)
        out[0] = 1.0
        return out
    # log-magnitudes keep large n finite
    mag = np.exp(-0.5 * r**2 + n * np.log(r) - 0.5 * gammaln(n + 1))
    return mag * np.exp(1j * n * np.angle(xi))


def coherent_state(xi: complex, space: FockSpace) -> np.ndarray:
    """Coherent state ``|xi>`` built from its Fock expansion.

    Raises
    ------
    TruncationError
        If more than ``1e-14`` of the Poisson mass lies beyond ``space.dim``.
    """
    tail = coherent_tail(xi, space.dim)
    if tail >= TAIL_TOL:
        raise TruncationError(
            f"|xi|={abs(xi):.4g} leaves tail mass {tail:.3e} beyond dim={space.dim}"
        )
    return coherent_amplitudes(xi, space.dim)


def hermitian_exp(h: np.ndarray, scale: complex = -1j) -> np.ndarray:
    """``exp(scale * h)`` for Hermitian ``h`` via its eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(scale * w)) @ v.conj().T


def _check_headroom(xi: complex, space: FockSpace) -> None:
    if 4.0 * abs(xi) ** 2 >= space.dim:
        raise TruncationError(
            f"displacement |xi|={abs(xi):.4g} needs dim > 4|xi|^2 = {4 * abs(xi) ** 2:.4g}, "
            f"got {space.dim}"
        )


def displacement(xi: complex, space: FockSpace) -> np.ndarray:
    """Displacement operator ``D(xi) = exp(xi a^dag - xi^* a)`` on the truncated space.

    The anti-Hermitian generator ``G`` is exponentiated through the Hermitian
    matrix ``iG``, so the result is exactly unitary on the truncated space.
    Only the low-lying block reproduces the untruncated matrix elements.
    """
    _check_headroom(xi, space)
    a = annihilation(space)
    gen = xi * a.conj().T - np.conj(xi) * a
    return hermitian_exp(1j * gen)


def overlap(a, b) -> complex:
    """Inner product ``<a|b>`` (conjugate-linear in ``a``)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"overlap of shapes {a.shape} and {b.shape}")
    return complex(np.vdot(a, b))


def interior(m: np.ndarray) -> np.ndarray:
    """Upper-left ``dim//2`` block, where ladder truncation has no effect."""
    h = m.shape[0] // 2
    return m[:h, :h]
