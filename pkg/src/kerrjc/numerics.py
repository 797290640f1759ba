"""Exact propagation on truncated spaces and the checks built on it."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .decoherence import DecoherenceParams, _evolve_displaced
from .exceptions import DimensionMismatch, TruncationError
from .fock import FockSpace, annihilation, basis, interior
from .model import (
    CompositeSpace,
    SystemParams,
    driven_kerr_hamiltonian,
    rwa_hamiltonian,
    total_hamiltonian,
)

__all__ = [
    "Propagator",
    "propagate",
    "kerr_identity_check",
    "trace_distance",
    "rwa_deviation_curve",
    "rwa_deviation",
    "displaced_frame_deviation",
    "ConvergenceReport",
    "truncation_scan",
]

# Population allowed in the top quarter of the Fock ladder before a
# propagated state is considered truncation-limited.
EDGE_TOL = 1e-10


@dataclass(frozen=True)
class Propagator:
    """Spectral form ``H = V diag(E) V^dag`` of a Hermitian matrix."""

    hamiltonian: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def from_hamiltonian(cls, h) -> "Propagator":
        h = np.asarray(h, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise DimensionMismatch(f"hamiltonian must be square, got shape {h.shape}")
        scale = max(np.abs(h).max(), 1.0)
        if np.abs(h - h.conj().T).max() > 1e-12 * scale:
            raise ValueError("hamiltonian is not Hermitian")
        w, v = np.linalg.eigh(h)
        err = np.abs((v * w) @ v.conj().T - h).max()
        if err > 1e-11 * scale:
            raise ArithmeticError(f"eigendecomposition reconstruction error {err:.3e}")
        return cls(hamiltonian=h, eigenvalues=w, eigenvectors=v)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def unitary(self, t: float) -> np.ndarray:
        """``exp(-i H t)``."""
        v = self.eigenvectors
        return (v * np.exp(-1j * self.eigenvalues * t)) @ v.conj().T

    def evolve(self, t, psi) -> np.ndarray:
        """``exp(-i H t) psi``; for an array of times the result is stacked on axis 0."""
        psi = np.asarray(psi, dtype=complex)
        if psi.shape != (self.dim,):
            raise DimensionMismatch(f"state of shape {psi.shape} for propagator of dim {self.dim}")
        v = self.eigenvectors
        coeffs = v.conj().T @ psi
        t = np.asarray(t, dtype=float)
        phases = np.exp(-1j * np.multiply.outer(t, self.eigenvalues))
        return (phases * coeffs) @ v.T


def propagate(p: Propagator, t, psi) -> np.ndarray:
    return p.evolve(t, psi)


def kerr_identity_check(chi: float, t: float, space: FockSpace, form: str = "printed") -> float:
    """Max interior deviation between ``U^dag a U`` and a closed form, ``U = exp(-i chi n^2 t)``.

    ``form="printed"`` compares against ``exp(i chi t n) a`` (the literal form);
    ``form="exact"`` against ``exp(-i chi t (2 n + 1)) a``, which is what the
    commutation ``a f(n) = f(n + 1) a`` actually gives.
    """
    a = annihilation(space)
    n = space.levels.astype(float)
    u = Propagator.from_hamiltonian(chi * np.diag((n**2).astype(complex))).unitary(t)
    lhs = u.conj().T @ a @ u
    if form == "printed":
        rhs = np.exp(1j * chi * t * n)[:, None] * a
    elif form == "exact":
        rhs = np.exp(-1j * chi * t * (2 * n + 1))[:, None] * a
    else:
        raise ValueError(f"unknown form {form!r}")
    return float(np.abs(interior(lhs - rhs)).max())


def trace_distance(rho, sigma) -> float:
    """``(1/2) ||rho - sigma||_1`` for Hermitian matrices."""
    return float(0.5 * np.abs(np.linalg.eigvalsh(np.asarray(rho) - np.asarray(sigma))).sum())


def _edge_population(states: np.ndarray, dim: int) -> float:
    """Largest population on the top quarter of the resonator ladder."""
    cut = dim - max(dim // 4, 1)
    s = states.reshape(states.shape[:-1] + (-1, dim))
    return float((np.abs(s[..., cut:]) ** 2).sum(axis=(-2, -1)).max())


def _check_edge(states: np.ndarray, dim: int) -> None:
    pop = _edge_population(states, dim)
    if pop > EDGE_TOL:
        raise TruncationError(f"population {pop:.3e} reaches the top of a dim={dim} space")


def _qubit_states(states: np.ndarray) -> np.ndarray:
    m = states.reshape(states.shape[0], 2, -1)
    return np.einsum("tqn,tpn->tqp", m, m.conj())


def rwa_deviation_curve(params: SystemParams, t_grid, cs: CompositeSpace) -> np.ndarray:
    """Trace distance between qubit states under the full and RWA Hamiltonians.

    Both start from ``(|0>_q + |1>_q)/sqrt(2) (x) |0>_N`` at resonance.
    """
    if params.omega_q != params.omega:
        raise ValueError("rwa comparison requires omega_q == omega")
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    psi0 = cs.product(np.array([1.0, 1.0]) / np.sqrt(2), basis(0, cs.resonator))
    full = Propagator.from_hamiltonian(total_hamiltonian(params, cs)).evolve(t, psi0)
    rwa = Propagator.from_hamiltonian(rwa_hamiltonian(params, cs)).evolve(t, psi0)
    _check_edge(full, cs.resonator.dim)
    _check_edge(rwa, cs.resonator.dim)
    rf, rr = _qubit_states(full), _qubit_states(rwa)
    return np.array([trace_distance(a, b) for a, b in zip(rf, rr)])


def rwa_deviation(params: SystemParams, t_grid, cs: CompositeSpace) -> float:
    """Largest :func:`rwa_deviation_curve` value over ``t_grid``."""
    return float(rwa_deviation_curve(params, t_grid, cs).max())


def displaced_frame_deviation(params: SystemParams, t_grid, space: FockSpace,
                              printed_sign: bool = False) -> float:
    """``max_{t,k} 1 - |<mu_k^exact(t)|mu_k^frame(t)>|``.

    ``mu_k^exact`` is the vacuum propagated under the full branch Hamiltonian;
    ``mu_k^frame`` is built in the displaced Kerr frame.  The frame
    displacement that cancels the drive ``(-1)^k g (a + a^dag)`` is
    ``-(-1)^k lam``; ``printed_sign=True`` uses ``+(-1)^k lam`` (the literal form)
    instead, which is off by a parity flip and only agrees for ``g = 0``.
    The decoherence factor itself is insensitive to this sign.
    """
    dp = DecoherenceParams.from_system(params)
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    vac = basis(0, space)
    worst = 0.0
    for k in (0, 1):
        exact = Propagator.from_hamiltonian(driven_kerr_hamiltonian(k, params, space)).evolve(t, vac)
        _check_edge(exact, space.dim)
        shift = (1.0 if k == 0 else -1.0) * dp.lam
        if not printed_sign:
            shift = -shift
        frame = _evolve_displaced(shift, t, dp, space)
        fid = np.abs(np.sum(exact.conj() * frame, axis=-1))
        worst = max(worst, float((1.0 - fid).max()))
    return worst


@dataclass
class ConvergenceReport:
    """Observable values per truncation ``dims``; ``values`` maps observable name to one value per dim."""

    dims: list
    values: dict
    tolerance: float
    deltas: list = field(default_factory=list)
    converged: bool = False
    final_delta: float = float("nan")

    @property
    def converged_at(self):
        """First dim whose value is within tolerance of its predecessor, else ``None``."""
        for d, delta in zip(self.dims[1:], self.deltas):
            if delta < self.tolerance:
                return d
        return None


def truncation_scan(evaluator: Callable[[int], float | Mapping[str, float]],
                    dims: Sequence[int], tolerance: float = 1e-8) -> ConvergenceReport:
    """Evaluate ``evaluator(dim)`` for increasing ``dims`` and compare consecutive values.

    The evaluator returns a float or a mapping of named floats; with several
    observables the largest change counts.
    """
    dims = [int(d) for d in dims]
    if len(dims) < 2 or any(b <= a for a, b in zip(dims, dims[1:])):
        raise ValueError(f"dims must be strictly increasing with at least two entries, got {dims}")
    values: dict[str, list[float]] = {}
    for d in dims:
        out = evaluator(d)
        if not isinstance(out, Mapping):
            out = {"value": out}
        for name, v in out.items():
            values.setdefault(name, []).append(float(v))
    deltas = [
        max(abs(vals[i] - vals[i - 1]) for vals in values.values()) for i in range(1, len(dims))
    ]
    final = deltas[-1]
    return ConvergenceReport(dims=dims, values=values, tolerance=tolerance, deltas=deltas,
                             converged=final < tolerance, final_delta=final)

