"""Charge qubit coupled to a Kerr-nonlinear nanomechanical resonator.

Closed-form Rabi and decoherence results together with truncated Fock-space
numerics that check them.
"""
from .exceptions import (
    DegenerateInput,
    DimensionMismatch,
    InvalidBranch,
    KerrJCError,
    TruncationError,
    UnnormalizedInput,
)
from .fock import FockSpace, annihilation, coherent_state, creation, displacement, overlap
from .model import (
    CompositeSpace,
    PhysicalParams,
    SystemParams,
    derive_chi,
    derive_g,
    driven_kerr_hamiltonian,
    effective_kerr_hamiltonian,
    resonator_hamiltonian,
    rwa_hamiltonian,
    total_hamiltonian,
)
from .rabi import (
    AmplitudeTriple,
    DressedSystem,
    dressed_eigensystem,
    evolve_amplitudes,
    qubit_purity,
    revival_times,
    transfer_probability,
)
from .decoherence import (
    BranchState,
    DecoherenceParams,
    ReducedDensityMatrix,
    branch_state,
    decoherence_factor_chi0,
    decoherence_factor_numeric,
    decoherence_factor_printed_series,
    decoherence_factor_rederived,
    decoherence_factor_shorttime,
    reduced_density_matrix,
)
from .numerics import (
    ConvergenceReport,
    Propagator,
    displaced_frame_deviation,
    kerr_identity_check,
    propagate,
    rwa_deviation,
    truncation_scan,
)

__version__ = "0.1.0"
