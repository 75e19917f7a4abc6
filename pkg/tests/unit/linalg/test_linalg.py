import numpy as np
import pytest
from hypothesis import given

from incoherent import linalg
from incoherent.exceptions import DimensionError
from incoherent.exceptions import NonFiniteError
from incoherent.exceptions import NotHermitianError
from incoherent.exceptions import NotPositiveError
from incoherent.exceptions import NotUnitaryError
from tests.fixtures.linalg import seeds


def test_as_matrix_rejects_non_finite_entries():
    """
    Test NaN and Inf are rejected
    """
    with pytest.raises(NonFiniteError):
        linalg.as_matrix([[1, np.nan], [0, 1]])
    with pytest.raises(NonFiniteError):
        linalg.as_matrix([[np.inf]])


def test_as_matrix_rejects_bad_shapes():
    """
    Test vectors, empty arrays and oversized matrices are rejected
    """
    with pytest.raises(DimensionError):
        linalg.as_matrix([1, 2, 3])
    with pytest.raises(DimensionError):
        linalg.as_matrix(np.zeros((0, 0)))
    with pytest.raises(DimensionError):
        linalg.as_matrix(np.eye(128))


def test_multiply_checks_inner_dimensions():
    """
    Test mismatching products are rejected
    """
    with pytest.raises(DimensionError):
        linalg.multiply(np.eye(2), np.eye(3))
    assert np.allclose(linalg.multiply(linalg.X, linalg.X), np.eye(2))


def test_pauli_strings():
    """
    Test qubit 0 is the leftmost letter
    """
    assert np.allclose(linalg.pauli_string("XZ"), np.kron(linalg.X, linalg.Z))
    assert np.allclose(linalg.pauli_string("i"), np.eye(2))
    with pytest.raises(DimensionError):
        linalg.pauli_string("XQ")


def test_z_rotation_is_diagonal():
    """
    Test exp(i theta Z) = diag(e^{i theta}, e^{-i theta})
    """
    u = linalg.z_rotation(0.3)
    assert np.allclose(u, np.diag([np.exp(0.3j), np.exp(-0.3j)]))
    assert linalg.is_unitary(u)


def test_operator_norm_matches_numpy(rng):
    """
    Test the largest singular value against numpy's spectral norm
    """
    for _ in range(10):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert linalg.operator_norm(a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-12)


def test_operator_norm_dominates_random_vectors(rng):
    """
    Test no unit vector is stretched beyond the operator norm
    """
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    vectors = rng.normal(size=(4, 10_000)) + 1j * rng.normal(size=(4, 10_000))
    vectors /= np.linalg.norm(vectors, axis=0)
    stretched = np.linalg.norm(a @ vectors, axis=0)
    assert stretched.max() <= linalg.operator_norm(a) + 1e-12


def test_operator_norm_is_stable_under_identity_tensor(rng):
    """
    Test ||A (x) I|| = ||A||
    """
    for _ in range(10):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert linalg.operator_norm(np.kron(a, np.eye(3))) == pytest.approx(
            linalg.operator_norm(a), abs=1e-12
        )


def test_trace_norm_of_hermitian_is_sum_of_absolute_eigenvalues(rng):
    """
    Test the trace norm of a Hermitian matrix
    """
    h = linalg.random_hermitian(4, rng)
    expected = np.sum(np.abs(np.linalg.eigvalsh(h)))
    assert linalg.trace_norm(h) == pytest.approx(expected, rel=1e-12)
    assert linalg.hermitian_trace_norms(h[None])[0] == pytest.approx(expected)


def test_trace_norm_requires_a_square_matrix():
    """
    Test rectangular input is rejected
    """
    with pytest.raises(DimensionError):
        linalg.trace_norm(np.ones((2, 3)))


@given(seeds)
def test_trace_distance_is_a_bounded_metric(seed):
    """
    Test symmetry, zero self-distance and the bound 2 (un-halved)
    """
    rng = np.random.default_rng(seed)
    rho = linalg.random_density(3, rng)
    sigma = linalg.random_density(3, rng, rank=1)
    d = linalg.trace_distance(rho, sigma)
    assert d == pytest.approx(linalg.trace_distance(sigma, rho), abs=1e-12)
    assert linalg.trace_distance(rho, rho) == pytest.approx(0, abs=1e-12)
    assert 0 <= d <= 2 + 1e-12


def test_orthogonal_pure_states_are_at_distance_two():
    """
    Test the un-halved trace distance of |0> and |1>
    """
    assert linalg.trace_distance(
        linalg.pure_state([1, 0]), linalg.pure_state([0, 1])
    ) == pytest.approx(2.0)


def test_hermitian_eig_reconstructs(rng):
    """
    Test V diag(lambda) V^+ = A with orthonormal V and ascending eigenvalues
    """
    a = linalg.random_hermitian(4, rng)
    eigenvalues, vectors = linalg.hermitian_eig(a)
    assert np.all(np.diff(eigenvalues) >= 0)
    assert np.allclose(vectors.conj().T @ vectors, np.eye(4), atol=1e-10)
    assert np.allclose((vectors * eigenvalues) @ vectors.conj().T, a, atol=1e-10)


def test_hermitian_eig_rejects_non_hermitian():
    """
    Test a non-Hermitian matrix is rejected
    """
    with pytest.raises(NotHermitianError):
        linalg.hermitian_eig([[0, 1], [0, 0]])


def test_psd_sqrt(rng):
    """
    Test B B = A for a random density matrix
    """
    a = linalg.random_density(4, rng)
    b = linalg.psd_sqrt(a)
    assert np.allclose(b @ b, a, atol=1e-9)
    assert np.allclose(b, b.conj().T)


def test_psd_sqrt_clamps_rounding_noise():
    """
    Test eigenvalues slightly below zero are clamped
    """
    b = linalg.psd_sqrt(np.diag([1.0, -1e-12]))
    assert np.allclose(b, np.diag([1.0, 0.0]))


def test_psd_sqrt_rejects_negative_matrices():
    """
    Test eigenvalues below -1e-8 are rejected
    """
    with pytest.raises(NotPositiveError):
        linalg.psd_sqrt(np.diag([1.0, -1e-6]))


def test_check_unitary():
    """
    Test unitaries pass and other matrices don't
    """
    linalg.check_unitary(linalg.X)
    with pytest.raises(NotUnitaryError):
        linalg.check_unitary(np.diag([1.0, 0.5]))


def test_num_qubits():
    """
    Test dimensions must be powers of two
    """
    assert linalg.num_qubits(8) == 3
    assert linalg.num_qubits(1) == 0
    with pytest.raises(DimensionError):
        linalg.num_qubits(6)


def test_partial_trace_of_a_product(rng):
    """
    Test tr_1(a (x) b) = a tr(b) and tr_0(a (x) b) = tr(a) b
    """
    a = linalg.random_density(2, rng)
    b = linalg.random_density(3, rng)
    joint = np.kron(a, b)
    assert np.allclose(linalg.partial_trace(joint, (2, 3), keep=0), a)
    assert np.allclose(linalg.partial_trace(joint, (2, 3), keep=1), b)
    with pytest.raises(DimensionError):
        linalg.partial_trace(joint, (3, 3), keep=0)
    with pytest.raises(DimensionError):
        linalg.partial_trace(joint, (2, 3), keep=2)


def test_random_instances_are_valid(rng):
    """
    Test random unitaries are unitary and random states are densities
    """
    assert linalg.is_unitary(linalg.random_unitary(4, rng))
    rho = linalg.random_density(4, rng, rank=2)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.linalg.eigvalsh(rho)[0] >= -1e-12
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 2


def test_unitary_from_hermitian(rng):
    """
    Test exp(i t h) is unitary and equals exp(i t Z) for h = Z
    """
    u = linalg.unitary_from_hermitian(linalg.Z, 0.4)
    assert np.allclose(u, linalg.z_rotation(0.4))
    h = linalg.random_hermitian(3, rng)
    assert linalg.is_unitary(linalg.unitary_from_hermitian(h))


def test_adjoint_is_the_conjugate_transpose():
    """
    Test (AB)^+ = B^+ A^+ and the adjoint of a unitary is its inverse
    """
    a = np.array([[1, 2j], [0, 3]])
    b = np.array([[0, 1], [1j, 1]])
    assert np.allclose(linalg.adjoint(a), [[1, 0], [-2j, 3]])
    assert np.allclose(
        linalg.adjoint(linalg.multiply(a, b)),
        linalg.multiply(linalg.adjoint(b), linalg.adjoint(a)),
    )
    u = linalg.z_rotation(0.7)
    assert np.allclose(linalg.multiply(linalg.adjoint(u), u), np.eye(2))
