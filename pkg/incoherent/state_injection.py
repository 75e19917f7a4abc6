"""
T gates by state injection.

The ancilla ``u|0> + v|1>`` with ``u = cos(tau) e^{i theta/2}`` and
``v = sin(tau) e^{-i theta/2}`` is the target of a CNOT from the data qubit.
Measuring the ancilla in the Z basis leaves the data qubit acted on by
``diag(u, v)`` (outcome 0) or ``diag(v, u)`` (outcome 1); outcome 1 is followed
by the correction ``exp(i pi/4 Z)``. Averaged over outcomes this is the channel
with Kraus pair

    A1 = diag(u, v),    A2 = diag(v e^{i pi/4}, u e^{-i pi/4})

which is exactly the T gate ``exp(i pi/8 Z)`` at ``theta = tau = pi/4``.
"""
import logging
import typing as t
from dataclasses import dataclass

import numpy as np

from incoherent import channels
from incoherent import linalg
from incoherent.circuits.base import AVERAGED_WIDTH_CAP
from incoherent.circuits.base import CNOT_GATE
from incoherent.circuits.base import S_GATE
from incoherent.circuits.base import T_GATE
from incoherent.circuits.base import Circuit
from incoherent.circuits.base import check_density
from incoherent.circuits.base import conjugate_local
from incoherent.circuits.base import to_matrix
from incoherent.circuits.base import to_tensor
from incoherent.circuits.protocols import ExactAveraged
from incoherent.circuits.simulate import apply_averaged_slot
from incoherent.circuits.simulate import batch_size
from incoherent.circuits.simulate import check_trace
from incoherent.circuits.simulate import ideal_state
from incoherent.circuits.simulate import trace_distance_to
from incoherent.ensembles import MixedUnitaryEnsemble
from incoherent.ensembles import ZRotationSpec
from incoherent.ensembles import normalize_angle
from incoherent.ensembles import z_rotation_ensemble
from incoherent.exceptions import InjectionCircuitError
from incoherent.exceptions import InvalidMixtureError
from incoherent.exceptions import NonFiniteError
from incoherent.exceptions import WidthCapError
from incoherent.fitting import SlopeFit
from incoherent.fitting import fit_loglog_slope
from incoherent.linalg import Matrix

logger = logging.getLogger(__name__)

OMEGA = np.exp(1j * np.pi / 8)
MAGIC_ANGLE = np.pi / 4
CORRECTION: Matrix = S_GATE

# Quartic remainder constant of the ensemble bound S mu2 + C S mu4. Chosen and
# checked numerically for offsets |theta - pi/4| <= 0.3.
MU4_CONSTANT = 2.0

QUADRATIC_STEP = 1e-3
SWEEP_DIRECTIONS: tuple[tuple[float, float], ...] = (
    (1.0, 0.0),
    (0.0, 1.0),
    (2**-0.5, 2**-0.5),
    (2**-0.5, -(2**-0.5)),
    (0.6, -0.8),
    (-0.8, 0.6),
)


@dataclass(frozen=True)
class AncillaState:
    """
    ``u|0> + v|1>``. Angles in radians.
    """

    theta: float
    tau: float

    def __post_init__(self):
        if not (np.isfinite(self.theta) and np.isfinite(self.tau)):
            raise NonFiniteError(f"Ancilla angles must be finite: {self}")
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def u(self) -> complex:
        return complex(np.cos(self.tau) * np.exp(0.5j * self.theta))

    @property
    def v(self) -> complex:
        return complex(np.sin(self.tau) * np.exp(-0.5j * self.theta))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.u, self.v])

    @property
    def is_magic(self) -> bool:
        return bool(
            np.isclose(self.theta, MAGIC_ANGLE, atol=1e-12)
            and np.isclose(self.tau, MAGIC_ANGLE, atol=1e-12)
        )


PERFECT_ANCILLA = AncillaState(MAGIC_ANGLE, MAGIC_ANGLE)


@dataclass(frozen=True)
class AncillaEnsemble:
    """
    Ancillas drawn uniformly; repeat an entry to weight it.

    ``mu2`` and ``mu4`` average ``(theta - pi/4)^2`` and ``(theta - pi/4)^4``,
    the offset taken in ``(-pi, pi]``.

    :raises InvalidMixtureError: if empty
    """

    ancillas: tuple[AncillaState, ...]

    def __post_init__(self):
        if not self.ancillas:
            raise InvalidMixtureError("An ancilla ensemble needs at least one ancilla")
        object.__setattr__(self, "ancillas", tuple(self.ancillas))

    def __len__(self) -> int:
        return len(self.ancillas)

    @property
    def offsets(self) -> np.ndarray:
        return np.array([normalize_angle(a.theta - MAGIC_ANGLE) for a in self.ancillas])

    @property
    def mu2(self) -> float:
        return float(np.mean(self.offsets**2))

    @property
    def mu4(self) -> float:
        return float(np.mean(self.offsets**4))


def ensemble_bound(ens: AncillaEnsemble, injections: int) -> float:
    """
    ``S mu2 + 2 S mu4``, the cap on ``tr|rho - sigma|`` after ``S`` injections
    with ``tau = pi/4`` ancillas
    """
    return injections * (ens.mu2 + MU4_CONSTANT * ens.mu4)


# Kraus description


def injection_kraus(a: AncillaState) -> tuple[Matrix, Matrix]:
    u, v = a.u, a.v
    a1 = np.diag([u, v])
    a2 = np.diag([v * np.exp(0.25j * np.pi), u * np.exp(-0.25j * np.pi)])
    return a1, a2


def injection_channel(a: AncillaState) -> channels.Channel:
    return channels.channel_from_kraus(injection_kraus(a))


def t_channel() -> channels.Channel:
    return channels.channel_from_unitary(T_GATE)


@dataclass(frozen=True, eq=False)
class MeanOperator:
    """
    ``G(sigma) = 2 W sigma W^+ + sum_i D_i sigma D_i^+`` with
    ``W = (A1 + A2) / 2`` and ``D_i = A_i - W``
    """

    mean: Matrix
    deviations: tuple[Matrix, Matrix]


def injection_mean_operator(a: AncillaState) -> MeanOperator:
    a1, a2 = injection_kraus(a)
    mean = (a1 + a2) / 2
    return MeanOperator(mean, (a1 - mean, a2 - mean))


def injection_ensemble(a: AncillaState) -> MixedUnitaryEnsemble:
    """
    For ``tau = pi/4`` the injection is the Z ensemble ``exp(i theta/2 Z)``,
    ``exp(i (pi/4 - theta/2) Z)`` with probability 1/2 each, targeting T

    :raises InvalidMixtureError: unless ``tau = pi/4``
    """
    if not np.isclose(a.tau, MAGIC_ANGLE, atol=1e-12):
        raise InvalidMixtureError(
            f"Only tau = pi/4 ancillas reduce to a Z ensemble, got tau={a.tau!r}"
        )
    spec = ZRotationSpec(np.pi / 8, (a.theta / 2, np.pi / 4 - a.theta / 2))
    return z_rotation_ensemble(spec, (0.5, 0.5))


# The circuit


def protocol_branches(
    a: AncillaState, control_rho: t.Any
) -> list[tuple[float, Matrix]]:
    """
    Runs the CNOT and Z measurement on ``control (x) ancilla`` and returns
    ``(probability, corrected control state)`` for outcomes 0 and 1. The state
    of an impossible outcome is the zero matrix.

    :raises InvalidStateError:
    """
    rho = check_density(control_rho, 1)
    joint = np.kron(rho, linalg.pure_state(a.vector))
    joint = CNOT_GATE @ joint @ CNOT_GATE.conj().T
    branches = []
    for outcome in (0, 1):
        projector = np.kron(linalg.I2, np.diag([1.0 - outcome, float(outcome)]))
        branch = linalg.partial_trace(projector @ joint @ projector, (2, 2), keep=0)
        if outcome == 1:
            branch = CORRECTION @ branch @ CORRECTION.conj().T
        probability = float(np.trace(branch).real)
        if probability > 0:
            branch = branch / probability
        branches.append((probability, branch))
    return branches


def protocol_simulate(
    a: AncillaState, control_rho: t.Any, rng: np.random.Generator
) -> tuple[int, Matrix]:
    """
    One run of the injection circuit: the measured outcome and the corrected
    control state

    :raises InvalidStateError:
    """
    branches = protocol_branches(a, control_rho)
    p1 = branches[1][0]
    outcome = int(rng.random() < p1 / (branches[0][0] + p1))
    return outcome, branches[outcome][1]


def protocol_average(a: AncillaState, control_rho: t.Any) -> Matrix:
    """
    The outcome-averaged output: equals ``injection_channel(a)(rho)``
    """
    return sum(p * state for p, state in protocol_branches(a, control_rho))


# Bounds


def injection_bound(a: AncillaState) -> float:
    """
    ``2 |omega - (u + omega^2 v) / sqrt(2)| + 2 (1/4) |u - v e^{i pi/4}|^2``,
    which bounds the diamond distance between the injected channel and T
    """
    u, v = a.u, a.v
    mean_term = abs(OMEGA - (u + OMEGA**2 * v) / np.sqrt(2))
    spread_term = abs(u - v * np.exp(0.25j * np.pi)) ** 2 / 4
    return float(2 * mean_term + 2 * spread_term)


def _bound_at(dtheta: float, dtau: float) -> float:
    return injection_bound(AncillaState(MAGIC_ANGLE + dtheta, MAGIC_ANGLE + dtau))


def injection_quadratic_form(h: float = QUADRATIC_STEP) -> np.ndarray:
    """
    Finite-difference Hessian of ``injection_bound`` in ``(theta, tau)`` at
    the perfect ancilla. The bound isn't analytic there, so this is the
    second-order behaviour seen at scale ``h``, not an exact Taylor term.
    """
    axes = np.eye(2) * h
    hessian = np.zeros((2, 2))
    for i in range(2):
        for j in range(2):
            pp = _bound_at(*(axes[i] + axes[j]))
            pm = _bound_at(*(axes[i] - axes[j]))
            mp = _bound_at(*(-axes[i] + axes[j]))
            mm = _bound_at(*(-axes[i] - axes[j]))
            hessian[i, j] = (pp - pm - mp + mm) / (4 * h * h)
    return (hessian + hessian.T) / 2


@dataclass(frozen=True)
class RayScaling:
    direction: tuple[float, float]
    scales: tuple[float, ...]
    bounds: tuple[float, ...]
    fit: SlopeFit | None


def second_order_sweep(
    s_min: float,
    s_max: float,
    points: int,
    directions: t.Sequence[tuple[float, float]] = SWEEP_DIRECTIONS,
) -> list[RayScaling]:
    """
    ``injection_bound(pi/4 + s d)`` over log-spaced ``s`` along each ray ``d``
    with the log-log slope in ``s``

    :raises InvalidMixtureError: on an empty or non-positive scale range
    """
    if not 0 < s_min < s_max or points < 2:
        raise InvalidMixtureError(
            f"Sweep needs 0 < s_min < s_max and at least two points, got "
            f"({s_min}, {s_max}, {points})"
        )
    scales = np.geomspace(s_min, s_max, points)
    rays = []
    for direction in directions:
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        bounds = [_bound_at(*(s * d)) for s in scales]
        fit = fit_loglog_slope(scales, bounds)
        rays.append(
            RayScaling(
                (float(d[0]), float(d[1])),
                tuple(float(s) for s in scales),
                tuple(bounds),
                fit,
            )
        )
    return rays


# Circuits with injected T gates


@dataclass(frozen=True)
class Sampled:
    """
    Monte Carlo over ``shots`` runs of the injection circuits, each with its
    own ancilla draws and measurement outcomes
    """

    shots: int
    seed: int = 0

    def __post_init__(self):
        if self.shots < 1:
            raise InjectionCircuitError(
                f"At least one shot is required, got {self.shots}"
            )


InjectionMode = t.Union[ExactAveraged, Sampled]


@dataclass(frozen=True, eq=False)
class InjectionRun:
    """
    ``sigma`` is the averaged output, ``trace_distance`` its distance
    ``tr|rho - sigma|`` to the output ``rho`` of the ideal-T circuit and
    ``injections`` the number ``S`` of injected T gates.
    """

    sigma: Matrix
    trace_distance: float
    injections: int
    mu2: float
    mu4: float
    bound: float
    correlated: bool
    shots: int | None = None

    @property
    def passed(self) -> bool:
        return self.trace_distance <= self.bound + 1e-9


def plus_register(width: int) -> Matrix:
    return linalg.kron_all([linalg.pure_state([1, 1])] * width)


def _averaged_kraus(ens: AncillaEnsemble) -> list[Matrix]:
    weight = 1 / np.sqrt(len(ens))
    return [weight * op for a in ens.ancillas for op in injection_kraus(a)]


def _evolve_exact(
    c: Circuit, tensor: np.ndarray, t_kraus: t.Sequence[Matrix]
) -> np.ndarray:
    for slot in c.slots:
        if slot.is_injected_t:
            tensor = sum(
                conjugate_local(tensor, op, slot.placement, c.width) for op in t_kraus
            )
        else:
            tensor = apply_averaged_slot(tensor, slot, c.width)
    return tensor


def _exact_output(
    c: Circuit, rho: Matrix, ens: AncillaEnsemble, correlated: bool
) -> Matrix:
    tensor = to_tensor(rho, c.width)
    if not correlated:
        return to_matrix(_evolve_exact(c, tensor, _averaged_kraus(ens)), c.width)
    outputs = [_evolve_exact(c, tensor, injection_kraus(a)) for a in ens.ancillas]
    return to_matrix(sum(outputs) / len(ens), c.width)


def _measure_injection(
    tensor: np.ndarray,
    pair: np.ndarray,
    placement: tuple[int, ...],
    width: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    One injection per state of the batch: ``pair`` holds each run's Kraus
    pair, shape ``(count, 2, 2, 2)``. The outcome is drawn with the Born rule
    and the state renormalized.
    """
    count = len(tensor)
    dim = 2**width
    expand = (count,) + (1,) * (2 * width)
    branches = [
        conjugate_local(tensor, pair[:, k], placement, width, batched=True)
        for k in (0, 1)
    ]
    weights = np.stack(
        [np.real(np.einsum("nii->n", b.reshape(count, dim, dim))) for b in branches],
        axis=1,
    )
    outcome = rng.random(count) * weights.sum(axis=1) < weights[:, 1]
    chosen = np.where(outcome.reshape(expand), branches[1], branches[0])
    norms = np.where(outcome, weights[:, 1], weights[:, 0])
    return chosen / norms.reshape(expand)


def _sampled_output(
    c: Circuit, rho: Matrix, ens: AncillaEnsemble, correlated: bool, mode: Sampled
) -> Matrix:
    rng = np.random.default_rng(mode.seed)
    kraus = np.array([injection_kraus(a) for a in ens.ancillas])
    total = np.zeros((c.dim, c.dim), dtype=complex)
    chunk = batch_size(c)
    done = 0
    while done < mode.shots:
        count = min(chunk, mode.shots - done)
        tensor = np.broadcast_to(
            to_tensor(rho, c.width), (count,) + (2,) * (2 * c.width)
        ).copy()
        shared = rng.integers(len(ens), size=count)
        for slot in c.slots:
            if slot.is_injected_t:
                drawn = shared if correlated else rng.integers(len(ens), size=count)
                tensor = _measure_injection(
                    tensor, kraus[drawn], slot.placement, c.width, rng
                )
                continue
            if slot.ensemble is None:
                op = np.broadcast_to(slot.ideal, (count,) + slot.ideal.shape)
            else:
                e = slot.ensemble
                op = np.stack(e.options)[rng.choice(e.size, size=count, p=e.probs)]
            tensor = conjugate_local(tensor, op, slot.placement, c.width, batched=True)
        total += tensor.reshape(count, c.dim, c.dim).sum(axis=0)
        done += count
    return total / mode.shots


def simulate_injected_circuit(
    c: Circuit,
    ens: AncillaEnsemble,
    mode: InjectionMode,
    correlated: bool = False,
    rho: t.Any = None,
) -> InjectionRun:
    """
    Realizes every T slot of ``c`` by injection with ancillas drawn uniformly
    from ``ens``: independently per injection, or once per run when
    ``correlated``. ``rho`` defaults to ``|+...+>``.

    :raises InjectionCircuitError: if ``c`` has no T slots or on a bad mode
    :raises WidthCapError: above the width cap of the mode
    """
    injections = c.t_count
    if not injections:
        raise InjectionCircuitError("Circuit has no T slots to inject")
    if isinstance(mode, ExactAveraged) and c.width > AVERAGED_WIDTH_CAP:
        raise WidthCapError(
            f"Exact averaging supports up to {AVERAGED_WIDTH_CAP} qubits, "
            f"got {c.width}: use Sampled"
        )
    rho = plus_register(c.width) if rho is None else check_density(rho, c.width)
    ideal = ideal_state(c, rho)

    if isinstance(mode, ExactAveraged):
        sigma = _exact_output(c, rho, ens, correlated)
        shots = None
    elif isinstance(mode, Sampled):
        sigma = _sampled_output(c, rho, ens, correlated, mode)
        shots = mode.shots
    else:
        raise InjectionCircuitError(f"Unknown injection mode: {mode!r}")

    check_trace(sigma)
    run = InjectionRun(
        sigma=sigma,
        trace_distance=trace_distance_to(sigma, ideal),
        injections=injections,
        mu2=ens.mu2,
        mu4=ens.mu4,
        bound=ensemble_bound(ens, injections),
        correlated=correlated,
        shots=shots,
    )
    logger.debug(
        f"Injected {injections} T gates from {len(ens)} ancillas: "
        f"distance={run.trace_distance:.3e} bound={run.bound:.3e}"
    )
    return run
