import numpy as np
import pytest
from hypothesis import given

from incoherent import linalg
from incoherent.circuits.base import CNOT_GATE
from incoherent.circuits.base import H_GATE
from incoherent.circuits.base import S_GATE
from incoherent.circuits.base import T_GATE
from incoherent.circuits.base import Circuit
from incoherent.circuits.base import ExactUnitary
from incoherent.circuits.base import GateSlot
from incoherent.circuits.base import apply_local
from incoherent.circuits.base import check_density
from incoherent.circuits.base import check_observable
from incoherent.circuits.base import ensemble_slot
from incoherent.circuits.base import exact_slot
from incoherent.circuits.base import injected_t_slot
from incoherent.circuits.base import observable_norm
from incoherent.circuits.protocols import toy_circuit
from incoherent.circuits.simulate import averaged_expectation
from incoherent.circuits.simulate import averaged_state
from incoherent.circuits.simulate import ideal_expectation
from incoherent.circuits.simulate import ideal_state
from incoherent.circuits.simulate import measure
from incoherent.circuits.simulate import realized_states
from incoherent.circuits.simulate import sample_indices
from incoherent.circuits.simulate import sample_realization
from incoherent.ensembles import lemma2_bound
from incoherent.exceptions import InvalidObservableError
from incoherent.exceptions import InvalidStateError
from incoherent.exceptions import PlacementError
from incoherent.exceptions import WidthCapError
from tests.fixtures.linalg import random_ensemble
from tests.fixtures.linalg import seeds

PLUS = linalg.pure_state([1, 1])


def random_circuit(rng: np.random.Generator, width: int = 2, depth: int = 6) -> Circuit:
    """
    Alternating single-qubit ensembles and CNOTs
    """
    slots = []
    for layer in range(depth):
        qubit = layer % width
        slots.append(ensemble_slot(random_ensemble(rng, spread=0.1), qubit))
        slots.append(exact_slot(CNOT_GATE, qubit, (qubit + 1) % width))
    slots.append(ensemble_slot(random_ensemble(rng, dim=4, spread=0.05), 0, 1))
    return Circuit(width, tuple(slots))


def test_t_and_s_gates():
    """
    Test T = exp(i pi/8 Z) and S = T^2
    """
    phase = np.exp(1j * np.pi / 8)
    assert np.allclose(T_GATE, np.diag([phase, phase.conj()]))
    assert np.allclose(T_GATE @ T_GATE, S_GATE)


def test_slot_placement_is_checked():
    """
    Test repeated or negative qubits and mis-sized gates are rejected
    """
    with pytest.raises(PlacementError):
        exact_slot(CNOT_GATE, 0, 0)
    with pytest.raises(PlacementError):
        exact_slot(H_GATE, -1)
    with pytest.raises(PlacementError):
        exact_slot(CNOT_GATE, 0)
    with pytest.raises(PlacementError):
        GateSlot((), ExactUnitary(H_GATE))


def test_circuit_width_is_checked():
    """
    Test widths beyond the sampled cap and slots outside the register
    """
    with pytest.raises(WidthCapError):
        Circuit(11)
    with pytest.raises(WidthCapError):
        Circuit(0)
    with pytest.raises(PlacementError):
        Circuit(2, (exact_slot(H_GATE, 2),))


def test_qubit_zero_is_the_leading_factor():
    """
    Test an X on qubit 0 of two is X (x) I
    """
    c = Circuit(2, (exact_slot(linalg.X, 0),))
    assert np.allclose(c.ideal_unitary(), np.kron(linalg.X, np.eye(2)))


def test_bell_circuit():
    """
    Test H then CNOT maps |00> to the Bell state
    """
    c = Circuit(2, (exact_slot(H_GATE, 0), exact_slot(CNOT_GATE, 0, 1)))
    u = c.ideal_unitary()
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-8)
    rho = ideal_state(c, linalg.pure_state([1, 0, 0, 0]))
    assert np.allclose(rho, linalg.pure_state([1, 0, 0, 1]))
    zz = np.kron(linalg.Z, linalg.Z)
    zero = linalg.pure_state([1, 0, 0, 0])
    assert ideal_expectation(c, zero, zz) == pytest.approx(1.0)


def test_reversed_cnot():
    """
    Test a CNOT controlled by qubit 1
    """
    c = Circuit(2, (exact_slot(CNOT_GATE, 1, 0),))
    rho = ideal_state(c, linalg.pure_state([0, 1, 0, 0]))
    assert np.allclose(rho, linalg.pure_state([0, 0, 0, 1]))


def test_toy_ideal_expectation():
    """
    Test N slots of exp(i theta Z) on |+> against the matrix chain
    """
    theta, n = 0.013, 40
    u = np.linalg.matrix_power(linalg.z_rotation(theta), n)
    expected = np.real(np.trace(linalg.Y @ u @ PLUS @ u.conj().T))
    value = ideal_expectation(toy_circuit(theta, 0.01, n), PLUS, linalg.Y)
    assert value == pytest.approx(expected, abs=1e-12)
    assert abs(value) == pytest.approx(abs(np.sin(2 * n * theta)), abs=1e-12)


def test_averaged_state_of_an_exact_circuit_is_ideal():
    """
    Test circuits without ensembles aren't averaged into anything else
    """
    c = Circuit(2, (exact_slot(H_GATE, 0), exact_slot(CNOT_GATE, 0, 1)))
    rho = linalg.pure_state([1, 0, 0, 0])
    assert np.allclose(averaged_state(c, rho), ideal_state(c, rho))


@given(seeds)
def test_circuit_bound_dominates_the_averaged_error(seed):
    """
    Test tr|G(rho) - U rho U^+| <= sum of gate bounds on random circuits
    """
    rng = np.random.default_rng(seed)
    c = random_circuit(rng)
    rho = linalg.random_density(4, rng)
    bound = lemma2_bound(c.ensembles)
    distance = linalg.trace_distance(averaged_state(c, rho), ideal_state(c, rho))
    assert distance <= bound + 1e-9
    for label in ("XI", "YI", "ZZ"):
        m = linalg.pauli_string(label)
        error = averaged_expectation(c, rho, m) - ideal_expectation(c, rho, m)
        assert abs(error) <= bound * observable_norm(m) + 1e-9


def test_averaged_evolution_keeps_the_trace(rng):
    """
    Test the trace stays 1 through a composed evolution
    """
    c = random_circuit(rng, width=3, depth=9)
    rho = averaged_state(c, linalg.random_density(8, rng))
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-9)


def test_averaged_expectation_matches_the_state(rng):
    """
    Test tr(M G(rho)) for a Pauli observable
    """
    c = random_circuit(rng)
    rho = linalg.random_density(4, rng)
    m = linalg.pauli_string("XY")
    expected = np.real(np.trace(m @ averaged_state(c, rho)))
    assert averaged_expectation(c, rho, m) == pytest.approx(expected, abs=1e-12)


def test_averaged_width_cap():
    """
    Test averaged evolution stops at 5 qubits and names the sampled mode
    """
    c = Circuit(6, (exact_slot(H_GATE, 5),))
    rho = linalg.kron_all([linalg.pure_state([1, 0])] * 6)
    with pytest.raises(WidthCapError, match="Resampled"):
        averaged_state(c, rho)


def test_invalid_states_are_rejected():
    """
    Test non-unit trace, non-Hermitian, non-positive and mis-sized states
    """
    with pytest.raises(InvalidStateError):
        check_density(np.eye(2), 1)
    with pytest.raises(InvalidStateError):
        check_density([[1, 1], [0, 0]], 1)
    with pytest.raises(InvalidStateError):
        check_density(np.diag([1.5, -0.5]), 1)
    with pytest.raises(InvalidStateError):
        check_density(np.eye(4) / 4, 1)


def test_invalid_observables_are_rejected():
    """
    Test non-Hermitian and mis-sized observables
    """
    with pytest.raises(InvalidObservableError):
        check_observable([[0, 1], [0, 0]], 1)
    with pytest.raises(InvalidObservableError):
        check_observable(np.eye(4), 1)
    assert observable_norm(np.diag([0.5, -2.0])) == pytest.approx(2.0)


def test_injected_t_slots_are_counted():
    """
    Test T slots stand for the ideal T gate
    """
    c = Circuit(2, (injected_t_slot(0), exact_slot(H_GATE, 1), injected_t_slot(1)))
    assert c.t_count == 2
    assert np.allclose(c.slots[0].ideal, T_GATE)
    assert c.ensembles == []


def test_sample_realization(rng):
    """
    Test every ensemble slot becomes one of its options, numbered from 1
    """
    c = random_circuit(rng)
    realization = sample_realization(c, rng)
    assert len(realization.indices) == len(c.ensembles)
    assert all(1 <= i <= 3 for i in realization.indices)
    assert realization.circuit.ensembles == []
    ensembles = iter(c.ensembles)
    indices = iter(realization.indices)
    for slot, realized in zip(c.slots, realization.circuit.slots):
        if slot.ensemble is not None:
            option = next(ensembles).options[next(indices) - 1]
            assert np.allclose(realized.ideal, option)


def test_batched_realizations_match_single_runs(rng):
    """
    Test the batched evolution against one realization at a time
    """
    c = random_circuit(rng)
    rho = linalg.random_density(4, rng)
    indices = sample_indices(c, rng, 7)
    states = realized_states(c, rho, indices)
    for row, state in zip(indices, states):
        options = iter(e.options[i] for e, i in zip(c.ensembles, row))
        slots = [
            slot
            if slot.ensemble is None
            else exact_slot(next(options), *slot.placement)
            for slot in c.slots
        ]
        assert np.allclose(state, ideal_state(c.with_slots(slots), rho), atol=1e-12)


def test_apply_local_batched(rng):
    """
    Test a batch axis gives the same result as separate calls
    """
    tensor = rng.normal(size=(3, 2, 2, 2)) + 0j
    ops = np.stack([linalg.random_unitary(2, rng) for _ in range(3)])
    batched = apply_local(tensor, ops, [1], batched=True)
    for k in range(3):
        assert np.allclose(batched[k], apply_local(tensor[k], ops[k], [1]))


def test_measure_eigenstates():
    """
    Test measuring Z on |0> always gives +1
    """
    rng = np.random.default_rng(0)
    outcomes = measure(linalg.pure_state([1, 0]), linalg.Z, rng, 50)
    assert np.allclose(outcomes, 1.0)
    outcomes = measure(PLUS, linalg.Z, rng, 20_000)
    assert set(np.round(outcomes).astype(int)) == {-1, 1}
    assert np.mean(outcomes) == pytest.approx(0.0, abs=0.05)
