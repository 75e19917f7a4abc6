"""
Density-matrix evolution of circuits: ideal, averaged over the ensembles, and
for sampled realizations.

States are kept as tensors with one axis per qubit (rows, then columns), so a
gate only touches the axes of its qubits. Batched functions carry a leading
realization axis.
"""
import logging
import typing as t
from dataclasses import dataclass

import numpy as np

from incoherent import linalg
from incoherent.circuits.base import AVERAGED_WIDTH_CAP
from incoherent.circuits.base import Circuit
from incoherent.circuits.base import GateSlot
from incoherent.circuits.base import check_density
from incoherent.circuits.base import check_observable
from incoherent.circuits.base import conjugate_local
from incoherent.circuits.base import exact_slot
from incoherent.circuits.base import expectation
from incoherent.circuits.base import to_matrix
from incoherent.circuits.base import to_tensor
from incoherent.ensembles import sample
from incoherent.exceptions import ProgrammingError
from incoherent.exceptions import WidthCapError
from incoherent.linalg import Matrix

logger = logging.getLogger(__name__)

# Complex entries held at once by batched evolution
BATCH_ELEMENTS = 2**22


# Ideal and averaged evolution


def ideal_state(c: Circuit, rho: t.Any) -> Matrix:
    """
    ``U rho U^+`` with ``U = U_N ... U_1``

    :raises InvalidStateError:
    """
    rho = check_density(rho, c.width)
    tensor = to_tensor(rho, c.width)
    for slot in c.slots:
        tensor = conjugate_local(tensor, slot.ideal, slot.placement, c.width)
    return to_matrix(tensor, c.width)


def ideal_expectation(c: Circuit, rho: t.Any, m: t.Any) -> float:
    """
    ``tr(U rho U^+ M)``

    :raises InvalidStateError:
    :raises InvalidObservableError:
    """
    m = check_observable(m, c.width)
    return expectation(ideal_state(c, rho), m)


def _check_averaged_width(c: Circuit) -> None:
    if c.width > AVERAGED_WIDTH_CAP:
        raise WidthCapError(
            f"Averaged evolution supports up to {AVERAGED_WIDTH_CAP} qubits, "
            f"got {c.width}: use the sampled protocols (Resampled) instead"
        )


def apply_averaged_slot(tensor: np.ndarray, slot: GateSlot, width: int) -> np.ndarray:
    kraus = slot.averaged_kraus()
    if len(kraus) == 1:
        return conjugate_local(tensor, kraus[0], slot.placement, width)
    return sum(conjugate_local(tensor, k, slot.placement, width) for k in kraus)


def averaged_state(c: Circuit, rho: t.Any) -> Matrix:
    """
    ``G_N o ... o G_1 (rho)``, each ensemble slot replaced by its averaged
    channel

    :raises WidthCapError: above the averaged-mode width cap
    :raises InvalidStateError:
    """
    _check_averaged_width(c)
    rho = check_density(rho, c.width)
    tensor = to_tensor(rho, c.width)
    for slot in c.slots:
        tensor = apply_averaged_slot(tensor, slot, c.width)
    return to_matrix(tensor, c.width)


def averaged_expectation(c: Circuit, rho: t.Any, m: t.Any) -> float:
    """
    ``tr(M G_N o ... o G_1 (rho))``

    :raises WidthCapError: above the averaged-mode width cap
    """
    _check_averaged_width(c)
    m = check_observable(m, c.width)
    return expectation(averaged_state(c, rho), m)


# Sampled realizations


@dataclass(frozen=True, eq=False)
class Realization:
    """
    A circuit whose ensemble slots were each replaced by one sampled option.
    ``indices`` holds the chosen option of every ensemble slot, numbered
    from 1, in slot order.
    """

    circuit: Circuit
    indices: tuple[int, ...]

    @property
    def unitaries(self) -> list[Matrix]:
        return [slot.ideal for slot in self.circuit.slots]


def sample_realization(c: Circuit, rng: np.random.Generator) -> Realization:
    """
    Draws one option for every ensemble slot, independently
    """
    slots: list[GateSlot] = []
    indices: list[int] = []
    for slot in c.slots:
        if slot.ensemble is None:
            slots.append(slot)
            continue
        index, option = sample(slot.ensemble, rng)
        indices.append(index)
        slots.append(exact_slot(option, *slot.placement))
    return Realization(c.with_slots(slots), tuple(indices))


def sample_indices(c: Circuit, rng: np.random.Generator, count: int) -> np.ndarray:
    """
    ``count`` realizations at once: a ``(count, ensemble slots)`` array of
    option indices numbered from 0
    """
    columns = []
    for e in c.ensembles:
        if e.size == 1:
            columns.append(np.zeros(count, dtype=int))
        else:
            columns.append(rng.choice(e.size, size=count, p=e.probs))
    if not columns:
        return np.zeros((count, 0), dtype=int)
    return np.stack(columns, axis=1)


def batch_size(c: Circuit) -> int:
    return max(1, BATCH_ELEMENTS // c.dim**2)


def realized_states(c: Circuit, rho: Matrix, indices: np.ndarray) -> np.ndarray:
    """
    Output states of the realizations in ``indices`` (see ``sample_indices``),
    shape ``(count, dim, dim)``. ``rho`` must already be validated.
    """
    count = len(indices)
    logger.debug(f"Evolving {count} realizations of a {len(c)}-slot circuit")
    tensor = np.broadcast_to(
        to_tensor(rho, c.width), (count,) + (2,) * (2 * c.width)
    ).copy()
    column = 0
    for slot in c.slots:
        if slot.ensemble is None:
            op = np.broadcast_to(slot.ideal, (count,) + slot.ideal.shape)
        else:
            options = np.stack(slot.ensemble.options)
            op = options[indices[:, column]]
            column += 1
        tensor = conjugate_local(tensor, op, slot.placement, c.width, batched=True)
    return tensor.reshape(count, c.dim, c.dim)


def batched_expectations(states: np.ndarray, m: Matrix) -> np.ndarray:
    return np.real(np.einsum("ij,nji->n", m, states))


# Terminal measurement


def measurement_basis(m: Matrix) -> tuple[np.ndarray, Matrix]:
    """
    Eigen-outcomes of the observable ``m`` and the projecting eigenvectors
    """
    return np.linalg.eigh((m + m.conj().T) / 2)


def sample_outcomes(
    states: np.ndarray, m: Matrix, rng: np.random.Generator
) -> np.ndarray:
    """
    One Born-rule measurement of ``m`` on each state of the stack: the
    measured eigenvalues, shape ``(count,)``
    """
    eigenvalues, vectors = measurement_basis(m)
    probs = np.real(np.einsum("ik,nij,jk->nk", vectors.conj(), states, vectors))
    probs = np.clip(probs, 0.0, None)
    cumulative = np.cumsum(probs, axis=1)
    cumulative /= cumulative[:, -1:]
    draws = rng.random(len(states))[:, None]
    outcomes = np.minimum(np.sum(cumulative < draws, axis=1), len(eigenvalues) - 1)
    return eigenvalues[outcomes]


def measure(rho: Matrix, m: Matrix, rng: np.random.Generator, shots: int) -> np.ndarray:
    """
    ``shots`` independent measurements of ``m`` on the same state
    """
    states = np.broadcast_to(rho, (shots,) + rho.shape)
    return sample_outcomes(states, m, rng)


def check_trace(state: Matrix, tol: float = 1e-9) -> None:
    """
    :raises ProgrammingError: if evolution lost trace
    """
    trace = np.trace(state).real
    if abs(trace - 1) > tol:
        raise ProgrammingError(f"Evolved state has trace {trace:.15g}")


def trace_distance_to(state: Matrix, reference: Matrix) -> float:
    """
    ``tr|state - reference|`` for register-sized states
    """
    diff = state - reference
    return float(linalg.hermitian_trace_norms((diff + diff.conj().T) / 2))
