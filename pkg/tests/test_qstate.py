import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eachannels import qstate
from eachannels.errors import DomainError
from eachannels.qstate import PSI_PLUS, PureStateParams

import oracles

angles = st.floats(0.0, math.pi)
azimuths = st.floats(0.0, 2 * math.pi, exclude_max=True)
params_st = st.builds(PureStateParams, st.floats(0.0, 1.0), angles, azimuths, angles, azimuths, azimuths)


def _random_density(rng, rank=4):
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def test_bell_state_pt_spectrum():
    bell = np.outer(PSI_PLUS, PSI_PLUS.conj())
    assert np.allclose(qstate.spectrum(qstate.partial_transpose(bell)), [-0.5, 0.5, 0.5, 0.5])
    assert not qstate.is_ppt(bell)
    assert not qstate.reduction_check(bell)


def test_product_state_is_ppt():
    rho = np.kron(np.diag([1.0, 0.0]), np.diag([0.3, 0.7])).astype(complex)
    assert qstate.is_ppt(rho)
    assert qstate.reduction_check(rho)


def test_partial_transpose_matches_index_oracle(rng):
    for _ in range(20):
        rho = _random_density(rng)
        assert np.allclose(qstate.partial_transpose(rho), oracles.partial_transpose_loop(rho))


def test_partial_transpose_subsystems_are_related(rng):
    rho = _random_density(rng)
    full_t = rho.T
    assert np.allclose(qstate.partial_transpose(qstate.partial_transpose(rho, 1), 2), full_t)


def test_partial_trace_of_product(rng):
    a, b = _random_density(rng)[:2, :2], np.diag([0.25, 0.75])
    a = a / np.trace(a)
    rho = np.kron(a, b)
    assert np.allclose(qstate.partial_trace(rho, 2), a)
    assert np.allclose(qstate.partial_trace(rho, 1), b)
    with pytest.raises(DomainError):
        qstate.partial_trace(rho, 3)


def test_ppt_agrees_with_reduction_criterion(rng):
    # both are exact separability tests for two qubits
    for _ in range(200):
        rho = _random_density(rng, rank=int(rng.integers(1, 5)))
        margin = qstate.min_pt_eig(rho)
        if abs(margin) < 1e-6:
            continue
        assert qstate.is_ppt(rho) == qstate.reduction_check(rho)


@given(params_st)
def test_schmidt_state_is_normalized_with_schmidt_weights(params):
    psi = qstate.schmidt_vector(params)
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    sv = np.linalg.svd(psi.reshape(2, 2), compute_uv=False)
    assert np.allclose(sorted(sv ** 2), sorted([params.p, 1 - params.p]), atol=1e-12)


@given(params_st)
def test_params_from_vector_round_trip(params):
    psi = qstate.schmidt_vector(params)
    back = qstate.schmidt_vector(qstate.params_from_vector(psi))
    assert abs(abs(np.vdot(psi, back)) - 1) < 1e-9


@given(params_st)
def test_swapped_params_swap_the_qubits(params):
    rho = qstate.schmidt_pure_state(params)
    swapped = qstate.schmidt_pure_state(params.swapped())
    perm = [0, 2, 1, 3]
    assert np.allclose(rho[np.ix_(perm, perm)], swapped, atol=1e-12)


def test_pure_state_params_rejects_out_of_range():
    with pytest.raises(DomainError):
        PureStateParams(1.5, 0, 0, 0, 0)
    with pytest.raises(DomainError):
        PureStateParams(0.5, 4.0, 0, 0, 0)


def test_validate_density_matrix():
    with pytest.raises(DomainError):
        qstate.validate_density_matrix(np.eye(4))
    with pytest.raises(DomainError):
        qstate.validate_density_matrix(np.diag([1.5, -0.5, 0, 0]))
    with pytest.raises(DomainError):
        qstate.validate_density_matrix(np.eye(2))
    assert qstate.validate_density_matrix(np.eye(4) / 4).shape == (4, 4)


def test_pauli_coefficients_round_trip(rng):
    rho = _random_density(rng)
    c = qstate.pauli_coefficients(rho)
    assert abs(c[0] - 1) < 1e-12
    assert np.allclose(qstate.from_pauli_coefficients(c), rho)


def test_jacobi_against_charpoly_oracle(rng):
    for _ in range(30):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = (g + g.conj().T) / 2
        assert np.abs(qstate.spectrum(h) - oracles.charpoly_eigvals(h)).max() < 1e-10


def test_jacobi_eigenvectors_diagonalize(rng):
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = g + g.conj().T
    w, v = qstate.jacobi_eigh(h)
    assert np.allclose(v.conj().T @ v, np.eye(4), atol=1e-12)
    assert np.allclose(v.conj().T @ h @ v, np.diag(w), atol=1e-10)


def test_jacobi_handles_degenerate_and_diagonal():
    assert np.allclose(qstate.spectrum(np.eye(4)), np.ones(4))
    h = np.diag([3.0, -1.0, 2.0, -1.0]).astype(complex)
    assert np.allclose(qstate.spectrum(h), [-1, -1, 2, 3])
    assert qstate.min_eig_hermitian(h) == pytest.approx(-1.0)
