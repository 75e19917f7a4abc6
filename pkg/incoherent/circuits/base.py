"""
Circuits as ordered gate slots on a qubit register.

Slot 1 acts first, so the ideal circuit is ``U = U_N ... U_1``. Qubit 0 is
the most significant tensor factor, matching ``numpy.kron``.
"""
import string
import typing as t
from dataclasses import dataclass

import numpy as np

from incoherent import linalg
from incoherent.ensembles import MixedUnitaryEnsemble
from incoherent.exceptions import DimensionError
from incoherent.exceptions import InvalidObservableError
from incoherent.exceptions import InvalidStateError
from incoherent.exceptions import PlacementError
from incoherent.exceptions import WidthCapError
from incoherent.linalg import Matrix

AVERAGED_WIDTH_CAP = 5
SAMPLED_WIDTH_CAP = 10
STATE_TOL = 1e-10

# T = exp(i pi/8 Z) and S = T^2, both up to a global phase
T_GATE: Matrix = linalg.z_rotation(np.pi / 8)
S_GATE: Matrix = linalg.z_rotation(np.pi / 4)
H_GATE: Matrix = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT_GATE: Matrix = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CZ_GATE: Matrix = np.diag([1, 1, 1, -1]).astype(complex)

GATES: dict[str, Matrix] = {
    "h": H_GATE,
    "x": linalg.X,
    "y": linalg.Y,
    "z": linalg.Z,
    "s": S_GATE,
    "t": T_GATE,
    "cnot": CNOT_GATE,
    "cz": CZ_GATE,
}


# Slot contents


@dataclass(frozen=True, eq=False)
class ExactUnitary:
    matrix: Matrix

    def __post_init__(self):
        matrix = linalg.check_unitary(self.matrix)
        object.__setattr__(self, "matrix", linalg.freeze(matrix))


@dataclass(frozen=True, eq=False)
class EnsembleGate:
    ensemble: MixedUnitaryEnsemble


@dataclass(frozen=True)
class InjectedT:
    """
    A T gate to be realized by state injection. Ideally ``T_GATE``.
    """


GateContent = t.Union[ExactUnitary, EnsembleGate, InjectedT]


@dataclass(frozen=True, eq=False)
class GateSlot:
    """
    :raises PlacementError: on repeated qubits or a matrix of the wrong size
    """

    placement: tuple[int, ...]
    content: GateContent

    def __post_init__(self):
        placement = tuple(int(q) for q in self.placement)
        if not placement or len(set(placement)) != len(placement):
            raise PlacementError(f"Invalid qubit placement: {placement}")
        if min(placement) < 0:
            raise PlacementError(f"Negative qubit index in {placement}")
        dim = self.ideal.shape[0]
        if dim != 2 ** len(placement):
            raise PlacementError(
                f"A {dim}x{dim} gate cannot act on {len(placement)} qubits"
            )
        object.__setattr__(self, "placement", placement)

    @property
    def ideal(self) -> Matrix:
        if isinstance(self.content, ExactUnitary):
            return self.content.matrix
        if isinstance(self.content, EnsembleGate):
            return self.content.ensemble.target
        return T_GATE

    @property
    def ensemble(self) -> MixedUnitaryEnsemble | None:
        if isinstance(self.content, EnsembleGate):
            return self.content.ensemble
        return None

    @property
    def is_injected_t(self) -> bool:
        return isinstance(self.content, InjectedT)

    def averaged_kraus(self) -> list[Matrix]:
        """
        Kraus operators of the averaged slot channel
        """
        if self.ensemble is None:
            return [self.ideal]
        return [
            np.sqrt(q) * w
            for q, w in zip(self.ensemble.probs, self.ensemble.options)
            if q > 0
        ]


def exact_slot(matrix: t.Any, *placement: int) -> GateSlot:
    return GateSlot(placement, ExactUnitary(linalg.as_matrix(matrix)))


def ensemble_slot(ensemble: MixedUnitaryEnsemble, *placement: int) -> GateSlot:
    return GateSlot(placement, EnsembleGate(ensemble))


def injected_t_slot(qubit: int) -> GateSlot:
    return GateSlot((qubit,), InjectedT())


@dataclass(frozen=True, eq=False)
class Circuit:
    """
    :raises WidthCapError: if the width exceeds the sampled-mode cap
    :raises PlacementError: if a slot reaches outside the register
    """

    width: int
    slots: tuple[GateSlot, ...] = ()

    def __post_init__(self):
        if not 1 <= self.width <= SAMPLED_WIDTH_CAP:
            raise WidthCapError(
                f"Registers of 1 to {SAMPLED_WIDTH_CAP} qubits are supported, "
                f"got {self.width}"
            )
        object.__setattr__(self, "slots", tuple(self.slots))
        for slot in self.slots:
            if max(slot.placement) >= self.width:
                raise PlacementError(
                    f"Slot on qubits {slot.placement} outside a {self.width}-qubit "
                    "register"
                )

    @property
    def dim(self) -> int:
        return 2**self.width

    def __len__(self) -> int:
        return len(self.slots)

    @property
    def ensembles(self) -> list[MixedUnitaryEnsemble]:
        return [slot.ensemble for slot in self.slots if slot.ensemble is not None]

    @property
    def t_count(self) -> int:
        return sum(slot.is_injected_t for slot in self.slots)

    def with_slots(self, slots: t.Iterable[GateSlot]) -> "Circuit":
        return Circuit(self.width, tuple(slots))

    def ideal_unitary(self) -> Matrix:
        """
        ``U_N ... U_1`` on the full register (up to 6 qubits)
        """
        if self.dim > linalg.MAX_DIM:
            raise WidthCapError("Full unitaries are built for up to 6 qubits")
        u = np.eye(self.dim, dtype=complex).reshape([2] * self.width + [self.dim])
        for slot in self.slots:
            u = apply_local(u, slot.ideal, slot.placement)
        return u.reshape(self.dim, self.dim)


# Local application


def apply_local(
    tensor: np.ndarray,
    op: np.ndarray,
    axes: t.Sequence[int],
    batched: bool = False,
) -> np.ndarray:
    """
    Left-multiplies the qubit axes ``axes`` of ``tensor`` by ``op``
    (``2^k x 2^k``). With ``batched`` the first axis of both ``tensor`` and
    ``op`` is a batch axis. Axes of ``tensor`` not listed are spectators.
    """
    letters = string.ascii_letters
    k = len(axes)
    n = tensor.ndim - int(batched)
    batch = letters[-1] if batched else ""
    old = [letters[i] for i in range(n)]
    new = [letters[n + j] for j in range(k)]
    out = list(old)
    for j, axis in enumerate(axes):
        out[axis] = new[j]
    op_shape = ([op.shape[0]] if batched else []) + [2] * (2 * k)
    expr = (
        f"{batch}{''.join(new)}{''.join(old[a] for a in axes)},"
        f"{batch}{''.join(old)}->{batch}{''.join(out)}"
    )
    return np.einsum(expr, op.reshape(op_shape), tensor)


def conjugate_local(
    rho: np.ndarray,
    op: np.ndarray,
    placement: t.Sequence[int],
    width: int,
    batched: bool = False,
) -> np.ndarray:
    """
    ``op rho op^+`` on a density tensor with ``2 * width`` qubit axes (rows
    first, then columns)
    """
    rho = apply_local(rho, op, placement, batched)
    return apply_local(rho, op.conj(), [width + q for q in placement], batched)


def to_tensor(rho: Matrix, width: int) -> np.ndarray:
    return np.asarray(rho).reshape([2] * (2 * width))


def to_matrix(tensor: np.ndarray, width: int) -> Matrix:
    return tensor.reshape(2**width, 2**width)


# Validation


def check_density(rho: t.Any, width: int, tol: float = STATE_TOL) -> Matrix:
    """
    :raises InvalidStateError: unless ``rho`` is a Hermitian PSD matrix of
        unit trace on ``width`` qubits
    """
    dim = 2**width
    try:
        rho = linalg.as_matrix(rho, max_dim=2**SAMPLED_WIDTH_CAP)
    except DimensionError as error:
        raise InvalidStateError(str(error))
    if rho.shape != (dim, dim):
        raise InvalidStateError(
            f"Expected a {dim}x{dim} density matrix, got {rho.shape}"
        )
    if linalg.hermiticity_deviation(rho) > tol:
        raise InvalidStateError("Density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise InvalidStateError(f"Density matrix has trace {np.trace(rho).real:.12g}")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0] < -tol:
        raise InvalidStateError("Density matrix is not positive semidefinite")
    return rho


def check_observable(m: t.Any, width: int, tol: float = STATE_TOL) -> Matrix:
    """
    :raises InvalidObservableError: unless ``m`` is Hermitian on ``width`` qubits
    """
    dim = 2**width
    try:
        m = linalg.as_matrix(m, max_dim=2**SAMPLED_WIDTH_CAP)
    except DimensionError as error:
        raise InvalidObservableError(str(error))
    if m.shape != (dim, dim):
        raise InvalidObservableError(
            f"Expected a {dim}x{dim} observable, got {m.shape}"
        )
    if linalg.hermiticity_deviation(m) > tol:
        raise InvalidObservableError("Observable is not Hermitian")
    return m


def observable_norm(m: Matrix) -> float:
    """
    ``||M||`` of a Hermitian observable: largest absolute eigenvalue
    """
    return float(np.max(np.abs(np.linalg.eigvalsh((m + m.conj().T) / 2))))


def expectation(rho: Matrix, m: Matrix) -> float:
    return float(np.real(np.einsum("ij,ji->", m, rho)))
