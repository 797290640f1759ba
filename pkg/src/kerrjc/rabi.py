"""Closed-form single-excitation dynamics of the nonlinear Jaynes-Cummings model.

The initial state is ``(alpha |0>_q + beta |1>_q) (x) |0>_N``.  Only
``|00>``, ``|01>`` and ``|10>`` (qubit, phonon) are ever populated.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateInput, UnnormalizedInput
from .model import CompositeSpace, SystemParams

__all__ = [
    "DressedSystem",
    "AmplitudeTriple",
    "dressed_eigensystem",
    "evolve_amplitudes",
    "transfer_probability",
    "max_transfer_probability",
    "revival_times",
    "qubit_reduced_state",
    "qubit_purity",
    "check_qubit_amplitudes",
]

NORM_TOL = 1e-12


def check_qubit_amplitudes(alpha: complex, beta: complex, tol: float = NORM_TOL) -> None:
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > tol:
        raise UnnormalizedInput(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")


@dataclass(frozen=True)
class DressedSystem:
    """Eigensystem of the ``{|01>, |10>}`` block.

    ``plus_state`` and ``minus_state`` hold the amplitudes on ``(|01>, |10>)``.
    """

    e_plus: float
    e_minus: float
    g_chi: float
    theta: float
    plus_state: np.ndarray
    minus_state: np.ndarray


@dataclass(frozen=True)
class AmplitudeTriple:
    """Amplitudes on ``|00>, |01>, |10>`` at time ``t`` (arrays if ``t`` is an array)."""

    c00: complex
    c01: complex
    c10: complex
    alpha: complex
    beta: complex

    @property
    def norm(self):
        return np.abs(self.c00) ** 2 + np.abs(self.c01) ** 2 + np.abs(self.c10) ** 2

    def to_state(self, cs: CompositeSpace) -> np.ndarray:
        """Embed into the composite space (scalar ``t`` only)."""
        psi = np.zeros(cs.dim, dtype=complex)
        psi[cs.index(0, 0)] = self.c00
        psi[cs.index(0, 1)] = self.c01
        psi[cs.index(1, 0)] = self.c10
        return psi


def _g_chi(params: SystemParams) -> float:
    g_chi = float(np.hypot(params.g, params.chi))
    if g_chi == 0.0:
        raise DegenerateInput("g = chi = 0: mixing angle undefined")
    return g_chi


def dressed_eigensystem(params: SystemParams) -> DressedSystem:
    g_chi = _g_chi(params)
    theta = float(np.arcsin(params.g / g_chi))
    centre = 0.5 * params.omega + params.chi
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return DressedSystem(
        e_plus=centre + g_chi,
        e_minus=centre - g_chi,
        g_chi=g_chi,
        theta=theta,
        plus_state=np.array([c, s], dtype=complex),
        minus_state=np.array([-s, c], dtype=complex),
    )


def evolve_amplitudes(alpha: complex, beta: complex, t, params: SystemParams) -> AmplitudeTriple:
    """Amplitudes of ``exp(-i H_rwa t)`` acting on the product initial state.

    Phases follow the RWA Hamiltonian exactly: ``|00>`` has energy
    ``-omega/2`` and the single-excitation block is centred at
    ``omega/2 + chi``.
    """
    check_qubit_amplitudes(alpha, beta)
    ds = dressed_eigensystem(params)
    t = np.asarray(t, dtype=float)
    centre = 0.5 * params.omega + params.chi
    carrier = np.exp(-1j * centre * t)
    s, c = np.sin(ds.g_chi * t), np.cos(ds.g_chi * t)
    return AmplitudeTriple(
        c00=alpha * np.exp(0.5j * params.omega * t),
        c01=-1j * beta * np.sin(ds.theta) * carrier * s,
        c10=beta * carrier * (c + 1j * np.cos(ds.theta) * s),
        alpha=alpha,
        beta=beta,
    )


def transfer_probability(alpha: complex, beta: complex, t, params: SystemParams):
    """``|alpha|^2 + |beta|^2 sin^2(theta) sin^2(g_chi t)``."""
    check_qubit_amplitudes(alpha, beta)
    ds = dressed_eigensystem(params)
    t = np.asarray(t, dtype=float)
    return abs(alpha) ** 2 + abs(beta) ** 2 * (np.sin(ds.theta) * np.sin(ds.g_chi * t)) ** 2


def max_transfer_probability(alpha: complex, beta: complex, params: SystemParams) -> float:
    """Supremum over ``t`` of :func:`transfer_probability`: ``|alpha|^2 + |beta|^2 g^2/g_chi^2``."""
    check_qubit_amplitudes(alpha, beta)
    g_chi = _g_chi(params)
    return abs(alpha) ** 2 + abs(beta) ** 2 * (params.g / g_chi) ** 2


def revival_times(params: SystemParams, k_max: int) -> np.ndarray:
    """Times ``k pi / g_chi`` for ``k = 1 .. k_max`` at which ``|01>`` empties."""
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    g_chi = _g_chi(params)
    return np.arange(1, k_max + 1) * np.pi / g_chi


def qubit_reduced_state(state) -> np.ndarray:
    """Qubit density matrix after tracing out the resonator.

    ``state`` is an :class:`AmplitudeTriple` (scalar ``t``) or a composite
    vector in qubit-major order.
    """
    if isinstance(state, AmplitudeTriple):
        c00, c01, c10 = (complex(x) for x in (state.c00, state.c01, state.c10))
        return np.array(
            [[abs(c00) ** 2 + abs(c01) ** 2, c00 * np.conj(c10)],
             [c10 * np.conj(c00), abs(c10) ** 2]]
        )
    psi = np.asarray(state, dtype=complex)
    if psi.ndim != 1 or psi.size % 2:
        raise ValueError("composite state must be a flat vector of even length")
    m = psi.reshape(2, -1)
    return m @ m.conj().T


def qubit_purity(state) -> float:
    """``Tr(rho_q^2)``; 1 for product states, 1/2 for maximal qubit-resonator entanglement."""
    rho = qubit_reduced_state(state)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > 1e-10:
        raise UnnormalizedInput(f"state has norm^2 {tr!r}")
    return float(np.sum(np.abs(rho) ** 2))
