"""Engineered decoherence of the qubit by a driven Kerr resonator.

With the Josephson energy switched off, each ``sigma_x`` eigenstate ``|k>``
of the qubit drives the resonator with force ``(-1)^k g``.  The resonator
branch states ``|mu_k(t)>`` are evaluated in the displaced frame where the
branch Hamiltonian reduces to ``Omega n + chi n^2``, and the decoherence
factor is ``D(t) = |<mu_1(t)|mu_0(t)>|``.

Four evaluations of ``D(t)`` are provided:

* :func:`decoherence_factor_numeric` -- branch states in a truncated Fock space
  (reference).
* :func:`decoherence_factor_printed_series` -- the literal double series,
  reproduced term for term.  It evaluates to ``exp(-lam^2)`` at ``t = 0``.
* :func:`decoherence_factor_rederived` -- a double series re-derived from the
  same branch states; agrees with the reference to roundoff.
* :func:`decoherence_factor_chi0` / :func:`decoherence_factor_shorttime` --
  closed forms for ``chi = 0`` and ``chi t << 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import factorial

import numpy as np

from .exceptions import InvalidBranch
from .fock import FockSpace, coherent_state, displacement
from .model import SystemParams
from .rabi import check_qubit_amplitudes

__all__ = [
    "DecoherenceParams",
    "BranchState",
    "ReducedDensityMatrix",
    "series_order",
    "branch_displacement",
    "branch_state",
    "branch_states",
    "decoherence_factor_numeric",
    "decoherence_factor_printed_series",
    "decoherence_factor_rederived",
    "decoherence_factor_chi0",
    "decoherence_factor_shorttime",
    "shorttime_frequency",
    "reduced_density_matrix",
]

SERIES_TOL = 1e-16


def series_order(lam: float, tol: float = SERIES_TOL) -> int:
    """Smallest ``k >= 1`` with ``(2 lam^2)^k / k! < tol``."""
    x = 2.0 * lam * lam
    k, term = 1, x
    while term >= tol:
        k += 1
        term *= x / k
    return k


@dataclass(frozen=True)
class DecoherenceParams:
    """Displaced-frame quantities: ``lam``, ``Omega``, ``chi`` and the series cutoff."""

    lam: float
    Omega: float
    chi: float
    series_kmax: int = field(default=0)

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")
        if not self.Omega > 0:
            raise ValueError(f"Omega must be positive, got {self.Omega}")
        if self.series_kmax <= 0:
            object.__setattr__(self, "series_kmax", series_order(self.lam))

    @classmethod
    def from_system(cls, params: SystemParams, series_kmax: int = 0) -> "DecoherenceParams":
        wc = params.omega + params.chi
        if not wc > 0:
            raise ValueError("omega + chi must be positive")
        lam = params.g / wc
        return cls(lam=lam, Omega=wc + 8.0 * lam**2 * params.chi, chi=params.chi,
                   series_kmax=series_kmax)

    def with_kmax(self, series_kmax: int) -> "DecoherenceParams":
        return replace(self, series_kmax=series_kmax)


@dataclass(frozen=True)
class BranchState:
    k: int
    t: float
    state: np.ndarray


@dataclass(frozen=True)
class ReducedDensityMatrix:
    """Qubit density matrix in the ``sigma_x`` eigenbasis ``{|k=0>, |k=1>}``."""

    rho00: complex
    rho01: complex
    rho10: complex
    rho11: complex

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.rho00, self.rho01], [self.rho10, self.rho11]], dtype=complex)


def branch_displacement(k: int, lam: float) -> float:
    """Frame displacement ``alpha_k = (-1)^k lam`` used for branch ``k``."""
    if k not in (0, 1):
        raise InvalidBranch(f"branch index must be 0 or 1, got {k!r}")
    return lam if k == 0 else -lam


def _kerr_energies(dp: DecoherenceParams, space: FockSpace) -> np.ndarray:
    n = space.levels.astype(float)
    return dp.Omega * n + dp.chi * n**2


def _evolve_displaced(shift: float, t, dp: DecoherenceParams, space: FockSpace) -> np.ndarray:
    """``D(shift) exp(-i H_eff t) |-shift>`` for each time; shape ``t.shape + (dim,)``."""
    t = np.asarray(t, dtype=float)
    start = coherent_state(-shift, space)
    disp = displacement(shift, space)
    phases = np.exp(-1j * np.multiply.outer(t, _kerr_energies(dp, space)))
    return (phases * start) @ disp.T


def branch_states(k: int, t, params: SystemParams, space: FockSpace) -> np.ndarray:
    """``|mu_k(t)>`` for an array of times, stacked along the first axis."""
    dp = DecoherenceParams.from_system(params)
    return _evolve_displaced(branch_displacement(k, dp.lam), t, dp, space)


def branch_state(k: int, t: float, params: SystemParams, space: FockSpace) -> BranchState:
    """``|mu_k(t)> = D(alpha_k) exp(-i H_eff t) D^dag(alpha_k) |0>``."""
    psi = branch_states(k, float(t), params, space)
    return BranchState(k=k, t=float(t), state=psi)


def _branch_overlap(t, params: SystemParams, space: FockSpace):
    mu0 = branch_states(0, t, params, space)
    mu1 = branch_states(1, t, params, space)
    return np.sum(mu1.conj() * mu0, axis=-1)


def decoherence_factor_numeric(t, params: SystemParams, space: FockSpace):
    """``|<mu_1(t)|mu_0(t)>|`` from branch states in the truncated space."""
    d = np.abs(_branch_overlap(t, params, space))
    return float(d) if np.ndim(d) == 0 else d


def _series_grid(dp: DecoherenceParams):
    k = np.arange(dp.series_kmax + 1)
    weight = (2.0 * dp.lam**2) ** k / np.array([float(factorial(int(i))) for i in k])
    return k.astype(float), weight


def _finish(total):
    d = np.abs(total)
    return float(d) if np.ndim(d) == 0 else d


def decoherence_factor_printed_series(t, dp: DecoherenceParams):
    """The literal double series for ``D(t)``, without corrections.

    ``|e^{-3 lam^2} sum_{k,m} (2 lam^2)^{k+m}/(k! m!) e^{i Omega t (k - m)}
    e^{-i chi t k(k-1)/2} e^{i chi t m(m-1)/2} exp(-lam^2 - lam^2 e^{i (m - k) chi t})|``

    At ``t = 0`` this gives ``exp(-lam^2)`` rather than 1.
    """
    t = np.asarray(t, dtype=float)[..., None, None]
    k, w = _series_grid(dp)
    kk, mm = k[:, None], k[None, :]
    lam2, om, chi = dp.lam**2, dp.Omega, dp.chi
    phase = (om * (kk - mm) - chi * kk * (kk - 1) / 2 + chi * mm * (mm - 1) / 2) * t
    tail = np.exp(-lam2 - lam2 * np.exp(1j * (mm - kk) * chi * t))
    terms = (w[:, None] * w[None, :]) * np.exp(1j * phase) * tail
    return _finish(np.exp(-3.0 * lam2) * terms.sum(axis=(-2, -1)))


def decoherence_factor_rederived(t, dp: DecoherenceParams):
    """Double series for ``D(t)`` obtained by normal-ordering ``D(2 lam)``.

    ``<mu_1|mu_0> = <lam| U^dag D(2 lam) U |-lam>`` with
    ``U = exp(-i (Omega n + chi n^2) t)``.  Using
    ``a^m U |xi> = xi^m e^{-i(Omega m + chi m^2) t} U |xi e^{-2 i chi m t}>``::

        D(t) = |e^{-2 lam^2} sum_{k,m} (2 lam^2)^{k+m}/(k! m!)
                e^{i(Omega k + chi k^2) t} e^{-i(Omega m + chi m^2) t}
                exp(-lam^2 - lam^2 e^{2 i chi (k - m) t})|
    """
    t = np.asarray(t, dtype=float)[..., None, None]
    k, w = _series_grid(dp)
    kk, mm = k[:, None], k[None, :]
    lam2, om, chi = dp.lam**2, dp.Omega, dp.chi
    phase = (om * (kk - mm) + chi * (kk**2 - mm**2)) * t
    tail = np.exp(-lam2 - lam2 * np.exp(2j * chi * (kk - mm) * t))
    terms = (w[:, None] * w[None, :]) * np.exp(1j * phase) * tail
    return _finish(np.exp(-2.0 * lam2) * terms.sum(axis=(-2, -1)))


def decoherence_factor_chi0(t, g: float, omega: float):
    """Linear-resonator result ``exp(-8 (g/omega)^2 sin^2(omega t / 2))``."""
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    t = np.asarray(t, dtype=float)
    d = np.exp(-8.0 * (g / omega) ** 2 * np.sin(0.5 * omega * t) ** 2)
    return float(d) if np.ndim(d) == 0 else d


def shorttime_frequency(dp: DecoherenceParams) -> float:
    """Oscillation frequency ``Omega + lam^2 chi + chi/2`` of the short-time form."""
    return dp.Omega + dp.lam**2 * dp.chi + 0.5 * dp.chi


def decoherence_factor_shorttime(t, dp: DecoherenceParams):
    """``exp(-8 lam^2 sin^2(nu t / 2))`` with ``nu = Omega + lam^2 chi + chi/2``; valid for ``chi t << 1``."""
    t = np.asarray(t, dtype=float)
    d = np.exp(-8.0 * dp.lam**2 * np.sin(0.5 * shorttime_frequency(dp) * t) ** 2)
    return float(d) if np.ndim(d) == 0 else d


def reduced_density_matrix(alpha: complex, beta: complex, t: float, params: SystemParams,
                           space: FockSpace) -> ReducedDensityMatrix:
    """Qubit state for ``alpha |0> |mu_0(t)> + beta |1> |mu_1(t)>`` in the ``sigma_x`` basis."""
    check_qubit_amplitudes(alpha, beta)
    ov = complex(_branch_overlap(float(t), params, space))  # <mu_1|mu_0>
    rho01 = ov * alpha * np.conj(beta)
    return ReducedDensityMatrix(
        rho00=complex(abs(alpha) ** 2),
        rho01=rho01,
        rho10=np.conj(rho01),
        rho11=complex(abs(beta) ** 2),
    )
