"""Hamiltonians for a charge qubit coupled to a Kerr-nonlinear resonator.

Units are hbar = 1; every frequency is an angular frequency.  The qubit
basis is ``{|0>_q, |1>_q}`` with ``sigma_+ |0> = |1>`` and
``sigma_z = diag(-1, +1)``, so ``|1>_q`` is the excited charge state.
Composite vectors use qubit-major ordering: index ``q * dim + n``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidBranch
from .fock import FockSpace, annihilation

__all__ = [
    "SystemParams",
    "PhysicalParams",
    "CompositeSpace",
    "derive_chi",
    "derive_g",
    "position_power",
    "resonator_hamiltonian",
    "total_hamiltonian",
    "rwa_hamiltonian",
    "excitation_number",
    "driven_kerr_hamiltonian",
    "effective_kerr_hamiltonian",
    "SIGMA_X",
    "SIGMA_Z",
    "SIGMA_PLUS",
    "SIGMA_MINUS",
]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|
SIGMA_MINUS = SIGMA_PLUS.T.copy()

# Ratio below which "much smaller than" is considered satisfied.
_REGIME_RATIO = 0.1


@dataclass(frozen=True)
class SystemParams:
    """Model frequencies: resonator ``omega``, qubit ``omega_q``, coupling ``g``, Kerr ``chi``."""

    omega: float = 1.0
    omega_q: float = 1.0
    g: float = 0.1
    chi: float = 0.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        for name in ("omega_q", "g", "chi"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")

    @property
    def rwa_valid(self) -> bool:
        return self.g < _REGIME_RATIO * self.omega

    @property
    def weak_kerr(self) -> bool:
        return self.chi < _REGIME_RATIO * self.g


@dataclass(frozen=True)
class PhysicalParams:
    """Circuit-level parameters of the resonator and the capacitive coupling."""

    m: float
    omega: float
    alpha: float
    E_C: float
    n_N: float
    x_zp: float
    d: float

    def __post_init__(self):
        for name in ("m", "omega", "E_C", "x_zp", "d"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("alpha", "n_N"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")


@dataclass(frozen=True)
class CompositeSpace:
    """Qubit (2 levels) tensor a truncated resonator."""

    resonator: FockSpace
    qubit_dim: int = 2

    def __post_init__(self):
        if self.qubit_dim != 2:
            raise ValueError("only a two-level qubit is supported")

    @classmethod
    def of(cls, dim: int) -> "CompositeSpace":
        return cls(FockSpace(dim))

    @property
    def dim(self) -> int:
        return 2 * self.resonator.dim

    def index(self, q: int, n: int) -> int:
        return q * self.resonator.dim + n

    def ket(self, q: int, n: int) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.index(q, n)] = 1.0
        return psi

    def product(self, qubit, resonator) -> np.ndarray:
        """``qubit (x) resonator`` as a composite vector."""
        return np.kron(np.asarray(qubit, dtype=complex), np.asarray(resonator, dtype=complex))

    def lift_qubit(self, op: np.ndarray) -> np.ndarray:
        return np.kron(op, np.eye(self.resonator.dim))

    def lift_resonator(self, op: np.ndarray) -> np.ndarray:
        return np.kron(np.eye(2), op)


def derive_chi(p: PhysicalParams) -> float:
    """Kerr strength ``alpha / (8 m omega)`` from the quartic stiffness.

    Notes
    -----
    This is the conversion in its quoted form.  Substituting
    ``x = (a + a^dag) / sqrt(2 m omega)`` into ``alpha x^4 / 4`` gives a
    coefficient ``3 alpha / (8 m^2 omega^2)`` in front of ``(a + a^dag)^4 / 6``
    instead, so treat the result as indicative.  The rest of the library
    takes ``chi`` as its primitive input.
    """
    return p.alpha / (8.0 * p.m * p.omega)


def derive_g(p: PhysicalParams) -> float:
    """Coupling ``4 E_C n_N x_zp / d``."""
    return 4.0 * p.E_C * p.n_N * p.x_zp / p.d


def position_power(space: FockSpace, power: int) -> np.ndarray:
    """``(a + a^dag)^power`` with exact matrix elements inside the truncated space.

    The product is formed on a space padded by ``power`` levels and cropped,
    so only couplings to levels beyond the cutoff are lost.
    """
    big = FockSpace(space.dim + power)
    a = annihilation(big)
    x = a + a.conj().T
    out = np.linalg.matrix_power(x, power)[: space.dim, : space.dim]
    return 0.5 * (out + out.conj().T)


def resonator_hamiltonian(params: SystemParams, space: FockSpace) -> np.ndarray:
    """``omega a^dag a + (chi/6)(a^dag + a)^4``."""
    n = np.diag(space.levels.astype(complex))
    return params.omega * n + (params.chi / 6.0) * position_power(space, 4)


def total_hamiltonian(params: SystemParams, cs: CompositeSpace) -> np.ndarray:
    """Full model ``(omega_q/2) sigma_z + g (a + a^dag) sigma_x + H_N`` without RWA."""
    x = position_power(cs.resonator, 1)
    h = (
        0.5 * params.omega_q * cs.lift_qubit(SIGMA_Z)
        + params.g * np.kron(SIGMA_X, x)
        + cs.lift_resonator(resonator_hamiltonian(params, cs.resonator))
    )
    return 0.5 * (h + h.conj().T)


def rwa_hamiltonian(params: SystemParams, cs: CompositeSpace) -> np.ndarray:
    """Nonlinear Jaynes-Cummings Hamiltonian at resonance.

    ``(omega/2) sigma_z + g (a^dag sigma_- + a sigma_+) + (omega + chi) a^dag a + chi (a^dag a)^2``.
    The qubit splitting is set to ``params.omega``; ``params.omega_q`` is ignored.
    The constant ``chi/2`` from normal ordering is dropped.
    """
    a = annihilation(cs.resonator)
    n = np.diag(cs.resonator.levels.astype(complex))
    w, chi = params.omega, params.chi
    h = (
        0.5 * w * cs.lift_qubit(SIGMA_Z)
        + params.g * (np.kron(SIGMA_MINUS, a.conj().T) + np.kron(SIGMA_PLUS, a))
        + cs.lift_resonator((w + chi) * n + chi * n @ n)
    )
    return 0.5 * (h + h.conj().T)


def excitation_number(cs: CompositeSpace) -> np.ndarray:
    """``sigma_+ sigma_- + a^dag a``, conserved by :func:`rwa_hamiltonian`."""
    n = np.diag(cs.resonator.levels.astype(complex))
    return cs.lift_qubit(SIGMA_PLUS @ SIGMA_MINUS) + cs.lift_resonator(n)


def driven_kerr_hamiltonian(k: int, params: SystemParams, space: FockSpace) -> np.ndarray:
    """Branch Hamiltonian ``(-1)^k g (a^dag + a) + H_N`` for qubit ``sigma_x`` branch ``k``."""
    if k not in (0, 1):
        raise InvalidBranch(f"branch index must be 0 or 1, got {k!r}")
    sign = 1.0 if k == 0 else -1.0
    return sign * params.g * position_power(space, 1) + resonator_hamiltonian(params, space)


def effective_kerr_hamiltonian(params: SystemParams, space: FockSpace):
    """Displaced-frame Kerr Hamiltonian ``Omega a^dag a + chi (a^dag a)^2``.

    Returns
    -------
    h : ndarray
        Diagonal matrix with entries ``Omega n + chi n^2``.
    dp : DecoherenceParams
        Carries ``lam = g / (omega + chi)`` and ``Omega = omega + chi + 8 lam^2 chi``.
    """
    from .decoherence import DecoherenceParams

    dp = DecoherenceParams.from_system(params)
    n = space.levels.astype(float)
    return np.diag((dp.Omega * n + dp.chi * n**2).astype(complex)), dp
