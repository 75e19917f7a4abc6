"""
Dense complex linear algebra for the small dimensions used here (d <= 64).

Norms always come from full decompositions (``scipy.linalg``), never from
iterative estimates. Kronecker products follow numpy's convention: the
first factor is the slow index, so qubit 0 is the most significant bit.
"""
import typing as t

import numpy as np
import numpy.typing as npt
from scipy import linalg as sla

from incoherent.exceptions import DimensionError
from incoherent.exceptions import NonFiniteError
from incoherent.exceptions import NotHermitianError
from incoherent.exceptions import NotPositiveError
from incoherent.exceptions import NotUnitaryError

Matrix = npt.NDArray[np.complex128]

MAX_DIM = 64
HERMITIAN_TOL = 1e-10
PSD_REJECT_TOL = 1e-8
UNITARY_TOL = 1e-9

I2: Matrix = np.eye(2, dtype=complex)
X: Matrix = np.array([[0, 1], [1, 0]], dtype=complex)
Y: Matrix = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z: Matrix = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS: dict[str, Matrix] = {"I": I2, "X": X, "Y": Y, "Z": Z}

for _m in (I2, X, Y, Z):
    _m.flags.writeable = False


def as_matrix(a: t.Any, max_dim: int = MAX_DIM) -> Matrix:
    """
    Coerces ``a`` into a 2-D complex array and checks it is finite.
    Register-sized states pass a larger ``max_dim``.

    :raises DimensionError: if it isn't 2-D or exceeds the dimension cap
    :raises NonFiniteError: on NaN/Inf entries
    """
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or 0 in m.shape:
        raise DimensionError(f"Expected a non-empty 2-D matrix, got shape {m.shape}")
    if max(m.shape) > max_dim:
        raise DimensionError(f"Matrix dimension {m.shape} exceeds the cap {max_dim}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError("Matrix has non-finite entries")
    return m


def freeze(a: Matrix) -> Matrix:
    """
    Returns a read-only copy
    """
    m = np.array(a, dtype=complex)
    m.flags.writeable = False
    return m


def _check_square(a: Matrix) -> None:
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"Expected a square matrix, got shape {a.shape}")


# Algebra


def multiply(a: t.Any, b: t.Any) -> Matrix:
    """
    Matrix product ``a @ b``

    :raises DimensionError: if the inner dimensions don't match
    """
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"Cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a: t.Any) -> Matrix:
    return as_matrix(a).conj().T


def kron(a: t.Any, b: t.Any) -> Matrix:
    """
    Kronecker product, ``a`` being the slow index
    """
    return as_matrix(np.kron(as_matrix(a), as_matrix(b)))


def kron_all(factors: t.Iterable[t.Any]) -> Matrix:
    out = np.ones((1, 1), dtype=complex)
    for factor in factors:
        out = np.kron(out, as_matrix(factor))
    return as_matrix(out)


def pauli_string(label: str) -> Matrix:
    """
    ``"XZ"`` -> X (x) Z. Qubit 0 is the leftmost letter.
    """
    try:
        return kron_all(PAULIS[letter] for letter in label.upper())
    except KeyError:
        raise DimensionError(f"Not a Pauli string: '{label}'")


def z_rotation(theta: float) -> Matrix:
    """
    ``exp(i theta Z) = diag(e^{i theta}, e^{-i theta})``
    """
    return np.diag([np.exp(1j * theta), np.exp(-1j * theta)])


# Norms


def singular_values(a: t.Any) -> npt.NDArray[np.float64]:
    return sla.svdvals(as_matrix(a))


def operator_norm(a: t.Any) -> float:
    """
    Largest singular value
    """
    return float(singular_values(a)[0])


def trace_norm(a: t.Any) -> float:
    """
    Sum of the singular values

    :raises DimensionError: for non-square input
    """
    a = as_matrix(a)
    _check_square(a)
    return float(np.sum(singular_values(a)))


def hermitian_trace_norms(stack: npt.NDArray[np.complex128]) -> npt.NDArray[np.float64]:
    """
    Trace norms of a stack of Hermitian matrices, shape ``(..., d, d)``.

    No validation: this is the inner loop of the norm searches.
    """
    return np.sum(np.abs(np.linalg.eigvalsh(stack)), axis=-1)


def trace_distance(rho: t.Any, sigma: t.Any) -> float:
    """
    ``tr|rho - sigma|``, not halved
    """
    rho, sigma = as_matrix(rho), as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DimensionError(f"Shapes differ: {rho.shape} and {sigma.shape}")
    return trace_norm(rho - sigma)


# Decompositions


def hermiticity_deviation(a: Matrix) -> float:
    return float(np.max(np.abs(a - a.conj().T)))


def check_hermitian(a: t.Any, tol: float = HERMITIAN_TOL) -> Matrix:
    """
    :raises NotHermitianError:
    """
    a = as_matrix(a)
    _check_square(a)
    deviation = hermiticity_deviation(a)
    if deviation > tol:
        raise NotHermitianError(f"Matrix is not Hermitian: deviation {deviation:.3e}")
    return a


def hermitian_eig(
    a: t.Any, tol: float = HERMITIAN_TOL
) -> tuple[npt.NDArray[np.float64], Matrix]:
    """
    Eigenvalues in ascending order and orthonormal eigenvectors (columns)

    :raises NotHermitianError:
    """
    a = check_hermitian(a, tol)
    a = (a + a.conj().T) / 2
    eigenvalues, eigenvectors = sla.eigh(a)
    return eigenvalues, eigenvectors


def psd_sqrt(
    a: t.Any,
    reject_tol: float = PSD_REJECT_TOL,
) -> Matrix:
    """
    Hermitian PSD square root. Negative eigenvalues above ``-reject_tol``
    are rounding noise and get clamped to zero.

    :raises NotPositiveError: if an eigenvalue is below ``-reject_tol``
    """
    eigenvalues, vectors = hermitian_eig(a)
    if eigenvalues[0] < -reject_tol:
        raise NotPositiveError(
            f"Matrix is not positive semidefinite: eigenvalue {eigenvalues[0]:.3e}"
        )
    roots = np.sqrt(np.clip(eigenvalues, 0.0, None))
    return (vectors * roots) @ vectors.conj().T


def is_unitary(a: Matrix, tol: float = UNITARY_TOL) -> bool:
    if a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))) <= tol)


def check_unitary(a: t.Any, tol: float = UNITARY_TOL) -> Matrix:
    """
    :raises NotUnitaryError:
    """
    a = as_matrix(a)
    if not is_unitary(a, tol):
        raise NotUnitaryError(f"Matrix of shape {a.shape} is not unitary")
    return a


def num_qubits(dim: int) -> int:
    """
    :raises DimensionError: if ``dim`` isn't a power of two
    """
    n = int(dim).bit_length() - 1
    if dim < 1 or 2**n != dim:
        raise DimensionError(f"Dimension {dim} is not a power of two")
    return n


# Random instances. All take an explicit numpy Generator.


def random_unitary(dim: int, rng: np.random.Generator) -> Matrix:
    """
    Haar-random unitary (QR of a Ginibre matrix with phase fix)
    """
    ginibre = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(ginibre)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def random_hermitian(dim: int, rng: np.random.Generator) -> Matrix:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


def unitary_from_hermitian(h: t.Any, time: float = 1.0) -> Matrix:
    """
    ``exp(i time h)`` through the eigendecomposition of ``h``
    """
    eigenvalues, vectors = hermitian_eig(h)
    return (vectors * np.exp(1j * time * eigenvalues)) @ vectors.conj().T


def random_density(
    dim: int, rng: np.random.Generator, rank: int | None = None
) -> Matrix:
    """
    Random density matrix ``G G^+ / tr`` with ``G`` Ginibre of the given rank
    """
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def pure_state(vector: t.Any) -> Matrix:
    psi = np.asarray(vector, dtype=complex).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def partial_trace(a: t.Any, dims: tuple[int, int], keep: int) -> Matrix:
    """
    Partial trace of a bipartite operator on ``dims[0] x dims[1]``, keeping
    factor ``keep`` (0 or 1)

    :raises DimensionError:
    """
    a = as_matrix(a)
    d0, d1 = dims
    if a.shape != (d0 * d1, d0 * d1):
        raise DimensionError(f"Shape {a.shape} doesn't match dims {dims}")
    tensor = a.reshape(d0, d1, d0, d1)
    if keep == 0:
        return np.einsum("ajbj->ab", tensor)
    if keep == 1:
        return np.einsum("iaib->ab", tensor)
    raise DimensionError(f"Cannot keep factor {keep} of a bipartite system")
