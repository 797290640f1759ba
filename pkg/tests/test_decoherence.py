import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from kerrjc.decoherence import (
    DecoherenceParams,
    branch_state,
    decoherence_factor_chi0,
    decoherence_factor_numeric,
    decoherence_factor_printed_series,
    decoherence_factor_rederived,
    decoherence_factor_shorttime,
    reduced_density_matrix,
    series_order,
    shorttime_frequency,
)
from kerrjc.exceptions import InvalidBranch, TruncationError, UnnormalizedInput
from kerrjc.fock import FockSpace, basis, coherent_state
from kerrjc.model import CompositeSpace, SystemParams, driven_kerr_hamiltonian, total_hamiltonian

from .conftest import brute_coherent


def lam_params(lam, chi, omega=1.0):
    """SystemParams whose displaced-frame lambda equals ``lam``."""
    return SystemParams(omega=omega, omega_q=0.0, g=lam * (omega + chi), chi=chi)


def test_series_order_tail():
    for lam in (0.0, 0.05, 0.3, 0.5, 1.0):
        k = series_order(lam)
        term = (2 * lam**2) ** k / np.prod(np.arange(1, k + 1, dtype=float))
        assert term < 1e-16
    dp = DecoherenceParams.from_system(lam_params(0.3, 0.01))
    assert dp.series_kmax == series_order(dp.lam)


def test_branch_state_zero_time(space64):
    p = lam_params(0.3, 0.05)
    for k in (0, 1):
        bs = branch_state(k, 0.0, p, space64)
        assert np.linalg.norm(bs.state - basis(0, space64)) < 1e-12
    with pytest.raises(InvalidBranch):
        branch_state(2, 0.0, p, space64)


@pytest.mark.parametrize("t", [0.3, 1.0, np.pi, 5.5, 17.0])
def test_branch_state_harmonic_limit(space64, t):
    lam = 0.2
    p = lam_params(lam, 0.0)
    for k, sign in ((0, 1), (1, -1)):
        centre = sign * lam * (1 - np.exp(-1j * t))
        ref = brute_coherent(centre, 64)
        assert abs(abs(np.vdot(ref, branch_state(k, t, p, space64).state)) - 1) < 1e-10


def test_branch_state_norm(space64):
    p = lam_params(0.3, 0.05)
    for t in np.linspace(0, 20, 41):
        for k in (0, 1):
            assert abs(np.linalg.norm(branch_state(k, t, p, space64).state) - 1) < 1e-12


def test_branch_state_truncation():
    with pytest.raises(TruncationError):
        branch_state(0, 1.0, lam_params(2.5, 0.0), FockSpace(16))


def test_numeric_factor_values(space64):
    assert decoherence_factor_numeric(0.0, lam_params(0.3, 0.05), space64) == pytest.approx(1, abs=1e-12)
    d = decoherence_factor_numeric(np.pi, SystemParams(omega=1, omega_q=0, g=0.1, chi=0), space64)
    assert d == pytest.approx(0.9231163463866358, abs=1e-10)  # exp(-0.08)
    t = np.linspace(0, 50, 301)
    vals = decoherence_factor_numeric(t, lam_params(0.3, 0.05), space64)
    assert np.all(vals <= 1 + 1e-12) and np.all(vals >= 0)


def test_chi0_closed_form():
    assert decoherence_factor_chi0(0.0, 0.1, 1.0) == 1.0
    assert decoherence_factor_chi0(np.pi, 0.1, 1.0) == pytest.approx(np.exp(-0.08), abs=1e-15)
    t = np.linspace(0, 10, 50)
    assert np.allclose(decoherence_factor_chi0(t + 2 * np.pi / 1.3, 0.2, 1.3),
                       decoherence_factor_chi0(t, 0.2, 1.3), atol=1e-14)


@pytest.mark.parametrize("lam", [0.05, 0.1, 0.3])
def test_numeric_equals_chi0_form(space64, lam):
    t = np.linspace(0, 8 * np.pi, 400)
    p = lam_params(lam, 0.0)
    assert np.abs(decoherence_factor_numeric(t, p, space64)
                  - decoherence_factor_chi0(t, p.g, p.omega)).max() < 1e-10


def test_printed_series_reproduces_defect():
    dp = DecoherenceParams.from_system(lam_params(0.1, 0.0))
    assert decoherence_factor_printed_series(0.0, dp) == pytest.approx(0.9900498337491681, abs=1e-12)
    # geometric resummation at chi = 0: exp(-lam^2) exp(-8 lam^2 sin^2(Omega t / 2))
    t = np.linspace(0, 20, 200)
    resummed = np.exp(-dp.lam**2) * np.exp(-8 * dp.lam**2 * np.sin(dp.Omega * t / 2) ** 2)
    assert np.abs(decoherence_factor_printed_series(t, dp) - resummed).max() < 1e-13


@pytest.mark.parametrize("lam", [0.1, 0.3, 0.5])
def test_printed_series_kmax_converged(lam):
    dp = DecoherenceParams.from_system(lam_params(lam, 0.02))
    t = np.linspace(0, 30, 97)
    a = decoherence_factor_printed_series(t, dp.with_kmax(20))
    b = decoherence_factor_printed_series(t, dp.with_kmax(40))
    assert np.abs(a - b).max() < 1e-15


def test_rederived_series(space64):
    dp = DecoherenceParams.from_system(lam_params(0.2, 0.01))
    assert decoherence_factor_rederived(0.0, dp) == pytest.approx(1.0, abs=1e-14)
    t = np.linspace(0, 30, 300)
    p0 = lam_params(0.25, 0.0)
    dp0 = DecoherenceParams.from_system(p0)
    assert np.abs(decoherence_factor_rederived(t, dp0)
                  - decoherence_factor_chi0(t, p0.g, p0.omega)).max() < 1e-12
    p = lam_params(0.2, 0.02)
    t = np.linspace(0, 8 * np.pi, 500)
    assert np.abs(decoherence_factor_rederived(t, DecoherenceParams.from_system(p))
                  - decoherence_factor_numeric(t, p, space64)).max() < 1e-8


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 0.4), st.floats(0.0, 0.1), st.floats(0.0, 60.0))
def test_rederived_matches_numeric_property(lam, chi, t):
    p = lam_params(lam, chi)
    num = decoherence_factor_numeric(t, p, FockSpace(48))
    assert decoherence_factor_rederived(t, DecoherenceParams.from_system(p)) == pytest.approx(num, abs=1e-8)


def test_shorttime_form(space64):
    lam = 0.0990099
    dp = DecoherenceParams(lam=lam, Omega=1.01, chi=0.01)
    assert decoherence_factor_shorttime(0.0, dp) == 1.0
    t_min = np.pi / shorttime_frequency(dp)
    assert decoherence_factor_shorttime(t_min, dp) == pytest.approx(np.exp(-8 * lam**2), abs=1e-15)
    assert np.exp(-8 * lam**2) == pytest.approx(0.9245726184, abs=1e-10)

    p = lam_params(0.1, 0.01)
    t = np.linspace(0, 0.1 / p.chi, 400)
    num = decoherence_factor_numeric(t, p, space64)
    rel = np.abs(decoherence_factor_shorttime(t, DecoherenceParams.from_system(p)) - num) / num
    assert rel.max() < 0.02


@pytest.mark.parametrize("g", [0.01, 0.1, 0.3])
@pytest.mark.parametrize("chi", [1e-4, 0.01, 0.05, 0.5])
def test_frequency_and_amplitude_ordering(g, chi):
    p = SystemParams(omega=1.0, g=g, chi=chi)
    dp = DecoherenceParams.from_system(p)
    assert shorttime_frequency(dp) > p.omega
    assert dp.lam**2 < (g / p.omega) ** 2


def test_reduced_density_matrix(space64):
    p = lam_params(0.2, 0.02)
    a, b = 0.6, 0.8j
    rho = reduced_density_matrix(a, b, 0.0, p, space64)
    psi = np.array([a, b])
    assert np.allclose(rho.matrix, np.outer(psi, psi.conj()), atol=1e-12)

    for t in np.linspace(0, 25, 11):
        rho = reduced_density_matrix(a, b, t, p, space64)
        d = decoherence_factor_numeric(t, p, space64)
        assert abs(rho.rho01) == pytest.approx(d * abs(a) * abs(b), abs=1e-14)
        assert rho.rho01 == np.conj(rho.rho10)
        assert (rho.rho00 * rho.rho11).real - abs(rho.rho01) ** 2 >= -1e-12
        # partial trace of the full composite vector alpha|0>|mu_0> + beta|1>|mu_1>
        cs = CompositeSpace(space64)
        full = a * cs.product([1, 0], branch_state(0, t, p, space64).state) \
            + b * cs.product([0, 1], branch_state(1, t, p, space64).state)
        m = full.reshape(2, -1)
        assert np.allclose(m @ m.conj().T, rho.matrix, atol=1e-13)

        rho_c = reduced_density_matrix(1.0, 0.0, t, p, space64)
        assert np.allclose(rho_c.matrix, [[1, 0], [0, 0]])
    with pytest.raises(UnnormalizedInput):
        reduced_density_matrix(1, 1, 0.0, p, space64)


def test_composite_model_splits_into_branches():
    """Full H with omega_q = 0 in the sigma_x basis is block diagonal in the branch Hamiltonians."""
    dim = 24
    cs = CompositeSpace.of(dim)
    p = SystemParams(omega=1.0, omega_q=0.0, g=0.1, chi=0.02)
    h = total_hamiltonian(p, cs)
    hadamard = np.array([[1, 1], [1, -1]]) / np.sqrt(2)  # columns: sigma_x = +1, -1
    rot = np.kron(hadamard, np.eye(dim))
    hx = rot.conj().T @ h @ rot
    sp = cs.resonator
    assert np.allclose(hx[:dim, :dim], driven_kerr_hamiltonian(0, p, sp), atol=1e-14)
    assert np.allclose(hx[dim:, dim:], driven_kerr_hamiltonian(1, p, sp), atol=1e-14)
    assert np.abs(hx[:dim, dim:]).max() < 1e-14

    t = 7.0
    a, b = 0.6, 0.8
    psi0 = rot @ cs.product([a, b], basis(0, sp))
    m = (rot.conj().T @ expm(-1j * h * t) @ psi0).reshape(2, -1)
    mu0 = expm(-1j * driven_kerr_hamiltonian(0, p, sp) * t) @ basis(0, sp)
    mu1 = expm(-1j * driven_kerr_hamiltonian(1, p, sp) * t) @ basis(0, sp)
    assert (m @ m.conj().T)[0, 1] == pytest.approx(a * b * np.vdot(mu1, mu0), abs=1e-12)
    # exact branches are coherent-like, so the displaced-frame factor is close
    assert abs(np.vdot(mu1, mu0)) == pytest.approx(
        decoherence_factor_numeric(t, p, FockSpace(dim)), abs=2e-3)


def test_coherent_start_uses_analytic_amplitudes(space64):
    # D^dag(alpha_k)|0> is |-alpha_k>, taken from the Fock series
    assert np.allclose(coherent_state(-0.3, space64), brute_coherent(-0.3, 64), atol=1e-15)
