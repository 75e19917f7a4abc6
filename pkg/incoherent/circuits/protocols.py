"""
Error protocols for ensemble circuits and the toy scaling experiment.

Every ensemble slot stands for a synthesized gate. A protocol decides what
runs in its place:

- ``Systematic``: the target shifted by a fixed Z offset, the same every run
- ``FixedRealization``: one sampled option per slot, reused on every shot
- ``Resampled``: a fresh sample on every shot
- ``ExactAveraged``: the infinite-shot limit of ``Resampled``
"""
import enum
import logging
import typing as t
from dataclasses import dataclass

import numpy as np

from incoherent import linalg
from incoherent.circuits.base import Circuit
from incoherent.circuits.base import GateSlot
from incoherent.circuits.base import check_density
from incoherent.circuits.base import check_observable
from incoherent.circuits.base import ensemble_slot
from incoherent.circuits.base import exact_slot
from incoherent.circuits.base import expectation
from incoherent.circuits.base import observable_norm
from incoherent.circuits.simulate import averaged_state
from incoherent.circuits.simulate import batch_size
from incoherent.circuits.simulate import batched_expectations
from incoherent.circuits.simulate import check_trace
from incoherent.circuits.simulate import ideal_state
from incoherent.circuits.simulate import measure
from incoherent.circuits.simulate import realized_states
from incoherent.circuits.simulate import sample_indices
from incoherent.circuits.simulate import sample_outcomes
from incoherent.circuits.simulate import sample_realization
from incoherent.circuits.simulate import trace_distance_to
from incoherent.ensembles import ZRotationSpec
from incoherent.ensembles import lemma2_bound
from incoherent.ensembles import naive_coherent_bound
from incoherent.ensembles import z_rotation_ensemble
from incoherent.exceptions import ProgrammingError
from incoherent.exceptions import ProtocolError
from incoherent.fitting import SlopeFit
from incoherent.fitting import fit_loglog_slope
from incoherent.linalg import Matrix

logger = logging.getLogger(__name__)

DEFAULT_SEED = 0
TOY_SEEDS = 200

PLUS_STATE: Matrix = linalg.pure_state([1, 1])
TOY_OBSERVABLE: Matrix = linalg.Y


class ProtocolKind(enum.Enum):
    SYSTEMATIC = "systematic"
    FIXED_REALIZATION = "fixed-realization"
    RESAMPLED = "resampled"
    EXACT_AVERAGED = "exact-averaged"


@dataclass(frozen=True)
class Systematic:
    """
    Every ensemble slot runs ``target * exp(i offset Z)``. ``offsets`` is one
    angle for all slots or one per ensemble slot, in slot order.
    """

    offsets: float | tuple[float, ...] = 0.0
    kind: t.ClassVar[ProtocolKind] = ProtocolKind.SYSTEMATIC


@dataclass(frozen=True)
class FixedRealization:
    kind: t.ClassVar[ProtocolKind] = ProtocolKind.FIXED_REALIZATION


@dataclass(frozen=True)
class Resampled:
    kind: t.ClassVar[ProtocolKind] = ProtocolKind.RESAMPLED


@dataclass(frozen=True)
class ExactAveraged:
    kind: t.ClassVar[ProtocolKind] = ProtocolKind.EXACT_AVERAGED


Protocol = t.Union[Systematic, FixedRealization, Resampled, ExactAveraged]


@dataclass(frozen=True)
class ExperimentResult:
    """
    ``value`` estimates ``tr(M sigma)`` for the protocol's output ``sigma``;
    ``ideal`` is ``tr(M U rho U^+)``. ``bound`` caps ``trace_distance``: the
    triangle-inequality bound for one fixed circuit (Systematic,
    FixedRealization) or the ensemble circuit bound otherwise.
    """

    protocol: ProtocolKind
    value: float
    ideal: float
    trace_distance: float
    bound: float
    observable_norm: float
    shots: int
    seed: int
    standard_error: float = 0.0

    def __post_init__(self):
        for name in ("value", "ideal", "trace_distance", "bound", "standard_error"):
            if not np.isfinite(getattr(self, name)):
                raise ProgrammingError(f"Non-finite {name} in {self.protocol.value}")

    @property
    def error(self) -> float:
        return self.value - self.ideal

    @property
    def observable_bound(self) -> float:
        """
        ``bound * ||M||``, the cap on ``|error|`` without shot noise
        """
        return self.bound * self.observable_norm


# Systematic offsets


def _slot_offsets(c: Circuit, offsets: float | t.Sequence[float]) -> list[float]:
    count = len(c.ensembles)
    if isinstance(offsets, (int, float)):
        values = [float(offsets)] * count
    else:
        values = [float(x) for x in offsets]
        if len(values) != count:
            raise ProtocolError(
                f"{len(values)} offsets given for {count} ensemble slots"
            )
    if not all(np.isfinite(values)):
        raise ProtocolError(f"Offsets must be finite: {values}")
    return values


def systematic_circuit(c: Circuit, offsets: float | t.Sequence[float]) -> Circuit:
    """
    Replaces every ensemble slot by its target rotated by a fixed Z offset

    :raises ProtocolError: on a multi-qubit ensemble slot or a wrong offset count
    """
    values = iter(_slot_offsets(c, offsets))
    slots: list[GateSlot] = []
    for slot in c.slots:
        if slot.ensemble is None:
            slots.append(slot)
            continue
        if len(slot.placement) != 1:
            raise ProtocolError(
                f"Systematic offsets apply to single-qubit slots, got qubits "
                f"{slot.placement}"
            )
        shifted = slot.ensemble.target @ linalg.z_rotation(next(values))
        slots.append(exact_slot(shifted, *slot.placement))
    return c.with_slots(slots)


# Running a protocol


def _finish(
    state: Matrix,
    m: Matrix,
    shots: int,
    shot_noise: bool,
    rng: np.random.Generator,
) -> tuple[float, float]:
    if not shot_noise:
        return expectation(state, m), 0.0
    outcomes = measure(state, m, rng, shots)
    error = float(np.std(outcomes, ddof=1) / np.sqrt(shots)) if shots > 1 else 0.0
    return float(np.mean(outcomes)), error


def _resample(
    c: Circuit,
    rho: Matrix,
    m: Matrix,
    shots: int,
    shot_noise: bool,
    rng: np.random.Generator,
) -> tuple[Matrix, np.ndarray]:
    """
    Mean output state and per-shot values over ``shots`` fresh realizations
    """
    values = []
    total = np.zeros((c.dim, c.dim), dtype=complex)
    chunk = batch_size(c)
    done = 0
    while done < shots:
        count = min(chunk, shots - done)
        states = realized_states(c, rho, sample_indices(c, rng, count))
        if shot_noise:
            values.append(sample_outcomes(states, m, rng))
        else:
            values.append(batched_expectations(states, m))
        total += states.sum(axis=0)
        done += count
    return total / shots, np.concatenate(values)


def run_protocol(
    c: Circuit,
    rho: t.Any,
    m: t.Any,
    protocol: Protocol,
    shots: int = 1,
    seed: int = DEFAULT_SEED,
    shot_noise: bool = False,
) -> ExperimentResult:
    """
    Runs ``c`` on ``rho`` under ``protocol`` and estimates ``tr(M sigma)``.

    Without ``shot_noise`` the expectation of each executed circuit is exact,
    so Systematic, FixedRealization and ExactAveraged ignore ``shots``.
    Resampled always averages ``shots`` fresh realizations.

    :raises ProtocolError: on ``shots < 1`` or invalid protocol parameters
    :raises InvalidStateError:
    :raises InvalidObservableError:
    :raises WidthCapError: for ExactAveraged above the averaged-mode cap
    """
    if shots < 1:
        raise ProtocolError(f"At least one shot is required, got {shots}")
    rho = check_density(rho, c.width)
    m = check_observable(m, c.width)
    rng = np.random.default_rng(seed)
    ideal = ideal_state(c, rho)
    targets = [slot.ideal for slot in c.slots]
    standard_error = 0.0

    if isinstance(protocol, Systematic):
        realized = systematic_circuit(c, protocol.offsets)
        state = ideal_state(realized, rho)
        value, standard_error = _finish(state, m, shots, shot_noise, rng)
        bound = naive_coherent_bound([s.ideal for s in realized.slots], targets)
    elif isinstance(protocol, FixedRealization):
        realization = sample_realization(c, rng)
        state = ideal_state(realization.circuit, rho)
        value, standard_error = _finish(state, m, shots, shot_noise, rng)
        bound = naive_coherent_bound(realization.unitaries, targets)
    elif isinstance(protocol, ExactAveraged):
        state = averaged_state(c, rho)
        value, standard_error = _finish(state, m, shots, shot_noise, rng)
        bound = lemma2_bound(c.ensembles)
    elif isinstance(protocol, Resampled):
        state, values = _resample(c, rho, m, shots, shot_noise, rng)
        value = float(np.mean(values))
        if shots > 1:
            standard_error = float(np.std(values, ddof=1) / np.sqrt(shots))
        bound = lemma2_bound(c.ensembles)
    else:
        raise ProtocolError(f"Unknown protocol: {protocol!r}")

    check_trace(state)
    result = ExperimentResult(
        protocol=protocol.kind,
        value=float(value),
        ideal=expectation(ideal, m),
        trace_distance=trace_distance_to(state, ideal),
        bound=float(bound),
        observable_norm=observable_norm(m),
        shots=shots,
        seed=seed,
        standard_error=standard_error,
    )
    logger.debug(
        f"{result.protocol.value}: value={result.value:.12g} ideal={result.ideal:.12g} "
        f"distance={result.trace_distance:.3e} bound={result.bound:.3e}"
    )
    return result


# Toy example


def toy_circuit(theta: float, epsilon: float, n: int) -> Circuit:
    """
    One qubit, ``n`` slots of the target ``exp(i theta Z)`` synthesized as
    ``exp(i (theta +- epsilon) Z)`` with probability 1/2 each
    """
    if n < 0:
        raise ProtocolError(f"Negative slot count: {n}")
    spec = ZRotationSpec(theta, (theta + epsilon, theta - epsilon))
    ensemble = z_rotation_ensemble(spec, (0.5, 0.5))
    return Circuit(1, tuple(ensemble_slot(ensemble, 0) for _ in range(n)))


@dataclass(frozen=True)
class SweepPoint:
    """
    ``distance`` is ``tr|sigma - U rho U^+|`` (RMS over seeds for
    FixedRealization), ``observable_error`` the matching ``|<Y>`` error.
    """

    protocol: ProtocolKind
    n: int
    epsilon: float
    distance: float
    observable_error: float
    samples: int


@dataclass(frozen=True)
class Sweep:
    protocol: ProtocolKind
    epsilon: float
    points: tuple[SweepPoint, ...]
    fit: SlopeFit | None


def _fixed_realization_stats(
    c: Circuit, ideal: Matrix, seeds: int, seed: int
) -> tuple[float, float]:
    # One stream per seed: results don't depend on the batching
    indices = np.concatenate(
        [
            sample_indices(c, np.random.default_rng([seed, s]), 1)
            for s in range(seeds)
        ]
    )
    ideal_value = expectation(ideal, TOY_OBSERVABLE)
    distances, errors = [], []
    chunk = batch_size(c)
    for start in range(0, seeds, chunk):
        states = realized_states(c, PLUS_STATE, indices[start : start + chunk])
        diff = states - ideal
        distances.append(linalg.hermitian_trace_norms(diff))
        errors.append(batched_expectations(states, TOY_OBSERVABLE) - ideal_value)
    rms_distance = float(np.sqrt(np.mean(np.concatenate(distances) ** 2)))
    rms_error = float(np.sqrt(np.mean(np.concatenate(errors) ** 2)))
    return rms_distance, rms_error


def scaling_sweep(
    theta: float,
    epsilon: float,
    ns: t.Sequence[int],
    protocol: ProtocolKind,
    seeds: int = TOY_SEEDS,
    seed: int = DEFAULT_SEED,
) -> Sweep:
    """
    The toy experiment on ``|+>`` for each ``N`` in ``ns``, with the log-log
    slope of the trace distance against ``N``. Resampled uses its exact
    infinite-shot limit.

    :raises ProtocolError: unless ``ns`` is a strictly ascending list of
        positive counts
    """
    ns = [int(n) for n in ns]
    if not ns or ns[0] < 1 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ProtocolError(f"Slot counts must be positive and ascending: {ns}")
    if seeds < 1:
        raise ProtocolError(f"At least one seed is required, got {seeds}")

    points = []
    for n in ns:
        c = toy_circuit(theta, epsilon, n)
        ideal = ideal_state(c, PLUS_STATE)
        samples = 1
        if protocol is ProtocolKind.FIXED_REALIZATION:
            distance, error = _fixed_realization_stats(c, ideal, seeds, seed)
            samples = seeds
        else:
            if protocol is ProtocolKind.SYSTEMATIC:
                state = ideal_state(systematic_circuit(c, epsilon), PLUS_STATE)
            else:
                state = averaged_state(c, PLUS_STATE)
            distance = trace_distance_to(state, ideal)
            error = abs(
                expectation(state, TOY_OBSERVABLE) - expectation(ideal, TOY_OBSERVABLE)
            )
        logger.debug(f"{protocol.value} N={n} eps={epsilon:g}: {distance:.6e}")
        points.append(SweepPoint(protocol, n, epsilon, distance, error, samples))

    fit = fit_loglog_slope([p.n for p in points], [p.distance for p in points])
    return Sweep(protocol, epsilon, tuple(points), fit)
