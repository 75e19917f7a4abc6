"""
The four experiments, how they are built from a config file, and their runners.

Runners compute, then report through ``recorder.emit``: a ``TableComputed``
for every table and a ``BoundChecked`` for every measured quantity that a
bound must cap. They never touch files.
"""
import logging
import typing as t
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from incoherent import linalg
from incoherent.channels.norms import MAX_NORM_DIM
from incoherent.channels.norms import diamond_norm_diff
from incoherent.circuits.base import AVERAGED_WIDTH_CAP
from incoherent.circuits.base import observable_norm
from incoherent.circuits.protocols import PLUS_STATE
from incoherent.circuits.protocols import TOY_OBSERVABLE
from incoherent.circuits.protocols import TOY_SEEDS
from incoherent.circuits.protocols import ExactAveraged
from incoherent.circuits.protocols import ProtocolKind
from incoherent.circuits.protocols import Resampled
from incoherent.circuits.protocols import Sweep
from incoherent.circuits.protocols import run_protocol
from incoherent.circuits.protocols import scaling_sweep
from incoherent.circuits.protocols import toy_circuit
from incoherent.circuits.simulate import averaged_expectation
from incoherent.circuits.simulate import ideal_expectation
from incoherent.ensembles import MixedUnitaryEnsemble
from incoherent.ensembles import delta
from incoherent.ensembles import exact_ensemble
from incoherent.ensembles import lemma1_bound
from incoherent.ensembles import lemma2_bound
from incoherent.ensembles import mean_deviation
from incoherent.exceptions import IncoherentError
from incoherent.exceptions import UnknownExperimentError
from incoherent.harness.bus import ExperimentBus
from incoherent.harness.findings import BoundChecked
from incoherent.harness.findings import TableComputed
from incoherent.harness.messages import Experiment
from incoherent.harness.messages import ExperimentMeta
from incoherent.harness.recorder import RunRecorder
from incoherent.harness.specfile import CircuitSpec
from incoherent.harness.specfile import ExperimentConfig
from incoherent.harness.specfile import config_error
from incoherent.harness.specfile import load_ancillas
from incoherent.harness.specfile import load_circuit
from incoherent.linalg import Matrix
from incoherent.state_injection import AncillaEnsemble
from incoherent.state_injection import AncillaState
from incoherent.state_injection import InjectionMode
from incoherent.state_injection import Sampled
from incoherent.state_injection import injection_bound
from incoherent.state_injection import injection_channel
from incoherent.state_injection import plus_register
from incoherent.state_injection import second_order_sweep
from incoherent.state_injection import simulate_injected_circuit
from incoherent.state_injection import t_channel

logger = logging.getLogger(__name__)

DEFAULT_SEED = 0
DEFAULT_INJECTION_SHOTS = 1000
SLOPE_TARGET = 2.0
SLOPE_TOLERANCE = 0.05
TOY_PROTOCOLS = (
    ProtocolKind.SYSTEMATIC,
    ProtocolKind.FIXED_REALIZATION,
    ProtocolKind.RESAMPLED,
)
COMMON_KEYS = ("kind", "seed", "shots")


@dataclass(frozen=True)
class Overrides:
    """
    Command-line values that take precedence over the config file
    """

    seed: int | None = None
    shots: int | None = None
    measure_diamond: bool = False
    sweep: tuple[float, float, int] | None = None
    jobs: int = 1


def _seed(config: ExperimentConfig, overrides: Overrides) -> int:
    if overrides.seed is not None:
        return overrides.seed
    return config.section.integer("seed", DEFAULT_SEED)


def _shots(config: ExperimentConfig, overrides: Overrides, default: int) -> int:
    shots = overrides.shots
    if shots is None:
        shots = config.section.integer("shots", default)
    if shots < 0:
        raise config_error(config, f"shots must not be negative, got {shots}")
    return shots


# Experiments


@dataclass(frozen=True, eq=False)
class BoundsExperiment(Experiment):
    """
    Per-gate error bounds of a circuit file, optionally checked against the
    measured diamond distance of each gate
    """

    NAME = "bounds"

    spec: CircuitSpec
    measure_diamond: bool = False
    seed: int = DEFAULT_SEED

    @classmethod
    def from_config(cls, config: ExperimentConfig, overrides: Overrides):
        config.section.check_keys(COMMON_KEYS + ("circuit", "measure_diamond"))
        return cls(
            spec=load_circuit(config.resolve("circuit")),
            measure_diamond=overrides.measure_diamond
            or config.section.boolean("measure_diamond", False),
            seed=_seed(config, overrides),
        )


@dataclass(frozen=True, eq=False)
class ToyExperiment(Experiment):
    """
    ``N`` slots of ``exp(i (theta +- epsilon) Z)`` under each protocol
    """

    NAME = "toy"

    theta: float
    epsilons: tuple[float, ...]
    ns: tuple[int, ...]
    seeds: int = TOY_SEEDS
    shots: int = 0
    seed: int = DEFAULT_SEED
    jobs: int = 1

    @classmethod
    def from_config(cls, config: ExperimentConfig, overrides: Overrides):
        section = config.section
        section.check_keys(COMMON_KEYS + ("theta", "epsilons", "ns", "seeds"))
        ns = section.integers("ns")
        if not ns or ns[0] < 1 or any(b <= a for a, b in zip(ns, ns[1:])):
            raise section.error(f"ns must be positive and ascending: {ns}", "ns")
        seeds = section.integer("seeds", TOY_SEEDS)
        if seeds < 1:
            raise section.error(f"seeds must be at least 1, got {seeds}", "seeds")
        return cls(
            theta=section.number("theta", 0.0),
            epsilons=tuple(section.numbers("epsilons")),
            ns=tuple(ns),
            seeds=seeds,
            shots=_shots(config, overrides, 0),
            seed=_seed(config, overrides),
            jobs=overrides.jobs,
        )


@dataclass(frozen=True, eq=False)
class InjectionExperiment(Experiment):
    """
    A circuit whose ``t`` gates are injected with ancillas from a list
    """

    NAME = "injection"

    spec: CircuitSpec
    ancillas: AncillaEnsemble
    mode: InjectionMode
    correlated: bool = False
    sweep: tuple[float, float, int] | None = None
    measure_diamond: bool = False
    seed: int = DEFAULT_SEED

    @classmethod
    def from_config(cls, config: ExperimentConfig, overrides: Overrides):
        section = config.section
        section.check_keys(
            COMMON_KEYS
            + ("ancillas", "circuit", "mode", "correlated", "sweep", "measure_diamond")
        )
        seed = _seed(config, overrides)
        mode_name = section.string("mode", "exact").lower()
        mode: InjectionMode
        if mode_name == "exact":
            mode = ExactAveraged()
        elif mode_name == "sampled":
            shots = _shots(config, overrides, DEFAULT_INJECTION_SHOTS)
            try:
                mode = Sampled(shots, seed)
            except IncoherentError as error:
                raise section.error(str(error), "shots")
        else:
            raise section.error(
                f"mode must be 'exact' or 'sampled', got '{mode_name}'", "mode"
            )
        sweep = overrides.sweep
        if sweep is None and "sweep" in section:
            values = section.numbers("sweep")
            if len(values) != 3 or values[2] != int(values[2]):
                raise section.error("sweep needs 's_min, s_max, points'", "sweep")
            sweep = (values[0], values[1], int(values[2]))
        return cls(
            spec=load_circuit(config.resolve("circuit"), inject_t=True),
            ancillas=load_ancillas(config.resolve("ancillas")),
            mode=mode,
            correlated=section.boolean("correlated", False),
            sweep=sweep,
            measure_diamond=overrides.measure_diamond
            or section.boolean("measure_diamond", False),
            seed=seed,
        )


STATES = ("plus", "zero")


@dataclass(frozen=True, eq=False)
class VerifyExperiment(Experiment):
    """
    Averaged against ideal expectations of a circuit file, checked against
    the circuit bound
    """

    NAME = "verify"

    spec: CircuitSpec
    observables: tuple[str, ...]
    state: str = "plus"
    shots: int = 0
    seed: int = DEFAULT_SEED

    @classmethod
    def from_config(cls, config: ExperimentConfig, overrides: Overrides):
        section = config.section
        section.check_keys(COMMON_KEYS + ("circuit", "observables", "state"))
        spec = load_circuit(config.resolve("circuit"))
        if spec.circuit.width > AVERAGED_WIDTH_CAP:
            raise section.error(
                f"verify evolves the averaged state of up to {AVERAGED_WIDTH_CAP} "
                f"qubits, the circuit has {spec.circuit.width}",
                "circuit",
            )
        observables = tuple(label.upper() for label in section.strings("observables"))
        for label in observables:
            if len(label) != spec.circuit.width or set(label) - set("IXYZ"):
                raise section.error(
                    f"'{label}' is not a Pauli string on {spec.circuit.width} qubits",
                    "observables",
                )
        state = section.string("state", "plus").lower()
        if state not in STATES:
            raise section.error(f"state must be one of {', '.join(STATES)}", "state")
        shots = _shots(config, overrides, 0)
        if shots == 1:
            raise config_error(
                config, "verify needs at least 2 shots for a standard error, or 0"
            )
        return cls(
            spec=spec,
            observables=observables,
            state=state,
            shots=shots,
            seed=_seed(config, overrides),
        )


def build_experiment(
    name: str, config: ExperimentConfig, overrides: Overrides
) -> Experiment:
    """
    :raises UnknownExperimentError: if no experiment is called ``name``
    :raises ConfigError: if the config is for another experiment or invalid
    """
    try:
        experiment_cls = ExperimentMeta.registered()[name]
    except KeyError:
        raise UnknownExperimentError(f"Unknown experiment: '{name}'")
    if config.kind is not None and config.kind != name:
        raise config_error(
            config, f"config is for the '{config.kind}' experiment, not '{name}'"
        )
    return experiment_cls.from_config(config, overrides)


# Runners


def _worst_option_distance(e: MixedUnitaryEnsemble) -> float:
    return max(
        linalg.operator_norm(w - e.target) for w, q in zip(e.options, e.probs) if q > 0
    )


def run_bounds(experiment: BoundsExperiment, recorder: RunRecorder) -> None:
    columns = (
        "gate",
        "line",
        "name",
        "qubits",
        "repeat",
        "delta",
        "mean_deviation",
        "lemma1_bound",
        "naive_bound",
        "diamond_distance",
    )
    rows = []
    per_slot: list[MixedUnitaryEnsemble] = []
    naive_total = 0.0
    for gate in experiment.spec.gates:
        e = gate.ensemble or exact_ensemble(gate.matrix)
        bound = lemma1_bound(e)
        naive = 2 * _worst_option_distance(e)
        measured = None
        if experiment.measure_diamond:
            if e.dim <= MAX_NORM_DIM:
                measured = diamond_norm_diff(
                    e.target_channel(), e.channel(), experiment.seed
                )
                recorder.emit(
                    BoundChecked(experiment.NAME, f"gate {gate.index}", measured, bound)
                )
            else:
                logger.warning(f"Gate {gate.index} is too wide for a diamond norm")
        rows.append(
            (
                gate.index,
                gate.lineno,
                gate.label,
                " ".join(str(q) for q in gate.placement),
                gate.repeat,
                delta(e),
                mean_deviation(e),
                bound,
                naive,
                measured,
            )
        )
        per_slot.extend([e] * gate.repeat)
        naive_total += naive * gate.repeat

    rows.append(
        (
            "total",
            None,
            None,
            None,
            len(per_slot),
            float(sum(delta(e) for e in per_slot)),
            float(sum(mean_deviation(e) for e in per_slot)),
            lemma2_bound(per_slot),
            naive_total,
            None,
        )
    )
    recorder.emit(TableComputed(experiment.NAME, columns, tuple(rows)))


def _toy_sweep(task: tuple[float, float, tuple[int, ...], ProtocolKind, int, int]):
    theta, epsilon, ns, protocol, seeds, seed = task
    return scaling_sweep(theta, epsilon, ns, protocol, seeds, seed)


def _run_sweeps(experiment: ToyExperiment) -> list[Sweep]:
    tasks = [
        (
            experiment.theta,
            eps,
            experiment.ns,
            protocol,
            experiment.seeds,
            experiment.seed,
        )
        for protocol in TOY_PROTOCOLS
        for eps in experiment.epsilons
    ]
    if experiment.jobs > 1:
        logger.info(f"Running {len(tasks)} sweeps on {experiment.jobs} workers")
        # map keeps task order, so rows don't depend on scheduling
        with ProcessPoolExecutor(max_workers=experiment.jobs) as pool:
            return list(pool.map(_toy_sweep, tasks))
    return [_toy_sweep(task) for task in tasks]


def _fit_footer(sweep: Sweep) -> str:
    prefix = f"fit protocol={sweep.protocol.value} epsilon={sweep.epsilon:.12g}"
    if sweep.fit is None:
        return f"{prefix} none: fewer than two points above the noise floor"
    return f"{prefix} {sweep.fit.summary()}"


def _coefficient_footers(sweeps: list[Sweep]) -> list[str]:
    resampled = sorted(
        (s for s in sweeps if s.protocol is ProtocolKind.RESAMPLED and s.fit),
        key=lambda s: s.epsilon,
    )
    footers = []
    for low, high in zip(resampled, resampled[1:]):
        if low.epsilon <= 0:
            continue
        ratio = high.fit.coefficient / low.fit.coefficient
        expected = (high.epsilon / low.epsilon) ** 2
        footers.append(
            f"resampled coefficient ratio epsilon={low.epsilon:.12g}->"
            f"{high.epsilon:.12g}: {ratio:.6g} (epsilon^2 scaling gives "
            f"{expected:.6g})"
        )
    return footers


def run_toy(experiment: ToyExperiment, recorder: RunRecorder) -> None:
    columns = ("protocol", "epsilon", "n", "distance", "observable_error", "samples")
    sweeps = _run_sweeps(experiment)
    rows = [
        (p.protocol.value, p.epsilon, p.n, p.distance, p.observable_error, p.samples)
        for sweep in sweeps
        for p in sweep.points
    ]
    if experiment.shots:
        for eps in experiment.epsilons:
            for n in experiment.ns:
                result = run_protocol(
                    toy_circuit(experiment.theta, eps, n),
                    PLUS_STATE,
                    TOY_OBSERVABLE,
                    Resampled(),
                    shots=experiment.shots,
                    seed=experiment.seed,
                )
                rows.append(
                    (
                        "resampled-sampled",
                        eps,
                        n,
                        result.trace_distance,
                        abs(result.error),
                        experiment.shots,
                    )
                )
    footer = [_fit_footer(s) for s in sweeps] + _coefficient_footers(sweeps)
    recorder.emit(
        TableComputed(experiment.NAME, columns, tuple(rows), tuple(footer))
    )


def _distinct(ancillas: AncillaEnsemble) -> list[AncillaState]:
    seen = []
    for a in ancillas.ancillas:
        if a not in seen:
            seen.append(a)
    return seen


def run_injection(experiment: InjectionExperiment, recorder: RunRecorder) -> None:
    run = simulate_injected_circuit(
        experiment.spec.circuit,
        experiment.ancillas,
        experiment.mode,
        correlated=experiment.correlated,
    )
    mode = "exact" if isinstance(experiment.mode, ExactAveraged) else "sampled"
    columns = (
        "mode",
        "correlated",
        "injections",
        "ancillas",
        "shots",
        "mu2",
        "mu4",
        "trace_distance",
        "bound",
        "passed",
    )
    row = (
        mode,
        run.correlated,
        run.injections,
        len(experiment.ancillas),
        run.shots,
        run.mu2,
        run.mu4,
        run.trace_distance,
        run.bound,
        run.passed,
    )
    recorder.emit(TableComputed(experiment.NAME, columns, (row,)))
    recorder.emit(
        BoundChecked(experiment.NAME, "ensemble", run.trace_distance, run.bound)
    )

    if experiment.measure_diamond:
        _check_ancillas(experiment, recorder)
    if experiment.sweep is not None:
        _second_order_table(experiment, recorder)


def _check_ancillas(experiment: InjectionExperiment, recorder: RunRecorder) -> None:
    target = t_channel()
    rows = []
    for a in _distinct(experiment.ancillas):
        bound = injection_bound(a)
        measured = diamond_norm_diff(target, injection_channel(a), experiment.seed)
        rows.append((a.theta, a.tau, bound, measured))
        label = f"ancilla ({a.theta:.6g}, {a.tau:.6g})"
        recorder.emit(BoundChecked(experiment.NAME, label, measured, bound))
    columns = ("theta", "tau", "injection_bound", "diamond_distance")
    recorder.emit(
        TableComputed(experiment.NAME, columns, tuple(rows), table="ancillas")
    )


def _second_order_table(experiment: InjectionExperiment, recorder: RunRecorder) -> None:
    s_min, s_max, points = experiment.sweep
    rows = []
    footer = []
    for ray in second_order_sweep(s_min, s_max, points):
        d_theta, d_tau = ray.direction
        for s, bound in zip(ray.scales, ray.bounds):
            rows.append((d_theta, d_tau, s, bound, bound / s**2))
        label = f"direction=({d_theta:.6g}, {d_tau:.6g})"
        if ray.fit is None:
            footer.append(f"fit {label} none")
            continue
        footer.append(f"fit {label} {ray.fit.summary()}")
        recorder.emit(
            BoundChecked(
                experiment.NAME,
                f"slope {label}",
                abs(ray.fit.slope - SLOPE_TARGET),
                SLOPE_TOLERANCE,
                slack=0.0,
            )
        )
    columns = ("direction_theta", "direction_tau", "s", "bound", "bound_over_s2")
    recorder.emit(
        TableComputed(experiment.NAME, columns, tuple(rows), tuple(footer), "sweep")
    )


def _register_state(name: str, width: int) -> Matrix:
    if name == "plus":
        return plus_register(width)
    zero = np.zeros((2**width, 2**width), dtype=complex)
    zero[0, 0] = 1.0
    return zero


def run_verify(experiment: VerifyExperiment, recorder: RunRecorder) -> None:
    c = experiment.spec.circuit
    rho = _register_state(experiment.state, c.width)
    bound = lemma2_bound(c.ensembles)
    columns = (
        "observable",
        "norm",
        "ideal",
        "averaged",
        "error",
        "bound",
        "passed",
        "mc_mean",
        "mc_stderr",
        "mc_within_3se",
    )
    rows = []
    for label in experiment.observables:
        m = linalg.pauli_string(label)
        ideal = ideal_expectation(c, rho, m)
        averaged = averaged_expectation(c, rho, m)
        error = abs(averaged - ideal)
        cap = bound * observable_norm(m)
        mc_mean = mc_stderr = within = None
        if experiment.shots:
            result = run_protocol(
                c, rho, m, Resampled(), shots=experiment.shots, seed=experiment.seed
            )
            mc_mean, mc_stderr = result.value, result.standard_error
            within = abs(mc_mean - averaged) <= 3 * mc_stderr + 1e-12
        rows.append(
            (
                label,
                observable_norm(m),
                ideal,
                averaged,
                error,
                cap,
                error <= cap + 1e-6,
                mc_mean,
                mc_stderr,
                within,
            )
        )
        recorder.emit(BoundChecked(experiment.NAME, label, error, cap))
    recorder.emit(TableComputed(experiment.NAME, columns, tuple(rows)))


RUNNERS: dict[type[Experiment], t.Callable] = {
    BoundsExperiment: run_bounds,
    ToyExperiment: run_toy,
    InjectionExperiment: run_injection,
    VerifyExperiment: run_verify,
}


def default_bus() -> ExperimentBus:
    """
    A bus with every runner subscribed and no listeners
    """
    bus = ExperimentBus()
    for experiment_cls, runner in RUNNERS.items():
        bus.subscribe_runner(experiment_cls, runner)
    return bus
