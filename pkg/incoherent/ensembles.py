"""
Mixed-unitary ensembles and their error bounds.

An ensemble replaces an ideal gate ``U`` by a random choice among unitaries
``W_a`` drawn with probabilities ``q(a)``. Its averaged effect is the channel
``sigma -> sum_a q(a) W_a sigma W_a^+``, which is within

    delta + 2 ||W_mean - U||,    delta = sum_a q(a) ||W_a - W_mean||^2

of ``U`` in diamond norm. Errors of the mean add linearly over a circuit,
while the spread ``delta`` is second order in the option offsets.
"""
import logging
import typing as t
from dataclasses import dataclass

import numpy as np

from incoherent import channels
from incoherent import linalg
from incoherent.channels.base import check_distribution
from incoherent.exceptions import DimensionError
from incoherent.exceptions import InvalidMixtureError
from incoherent.linalg import Matrix

logger = logging.getLogger(__name__)

# Quartic remainder constants for the series bounds. Not derived: chosen and
# checked numerically for offsets |phi| <= 0.3.
NORM_REMAINDER_CONSTANT = 1.0
DELTA_REMAINDER_CONSTANT = 2.0

ANGLE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MixedUnitaryEnsemble:
    """
    Options ``W_1..W_n`` for the ideal gate ``target``, drawn with ``probs``.

    :raises DimensionError: on empty or mismatching options
    :raises DistributionError: if ``probs`` isn't a distribution
    :raises NotUnitaryError: if the target or an option isn't unitary
    """

    target: Matrix
    options: tuple[Matrix, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if not self.options:
            raise DimensionError("An ensemble needs at least one option")
        target = linalg.check_unitary(self.target)
        options = tuple(linalg.check_unitary(w) for w in self.options)
        for w in options:
            if w.shape != target.shape:
                raise DimensionError(
                    f"Option of shape {w.shape} for a target of shape {target.shape}"
                )
        probs = check_distribution(self.probs, len(options))
        object.__setattr__(self, "target", linalg.freeze(target))
        object.__setattr__(self, "options", tuple(linalg.freeze(w) for w in options))
        object.__setattr__(self, "probs", tuple(float(q) for q in probs))

    @property
    def dim(self) -> int:
        return self.target.shape[0]

    @property
    def size(self) -> int:
        return len(self.options)

    @property
    def is_exact(self) -> bool:
        """
        Every option with nonzero weight is the target itself
        """
        return all(
            q == 0 or np.allclose(w, self.target, atol=1e-14)
            for w, q in zip(self.options, self.probs)
        )

    def channel(self) -> channels.Channel:
        """
        The averaged channel ``sigma -> sum_a q(a) W_a sigma W_a^+``
        """
        return channels.mix(
            [channels.channel_from_unitary(w) for w in self.options], self.probs
        )

    def target_channel(self) -> channels.Channel:
        return channels.channel_from_unitary(self.target)


def exact_ensemble(u: t.Any) -> MixedUnitaryEnsemble:
    """
    A gate implemented without error: one option, the target itself
    """
    return MixedUnitaryEnsemble(u, (u,), (1.0,))


# Bounds


def mean_unitary(e: MixedUnitaryEnsemble) -> Matrix:
    """
    ``W_mean = sum_a q(a) W_a``. Not unitary in general.
    """
    return sum(q * w for q, w in zip(e.probs, e.options))


def mean_deviation(e: MixedUnitaryEnsemble) -> float:
    """
    ``||W_mean - U||``
    """
    return linalg.operator_norm(mean_unitary(e) - e.target)


def delta(e: MixedUnitaryEnsemble) -> float:
    """
    ``sum_a q(a) ||W_a - W_mean||^2``
    """
    mean = mean_unitary(e)
    return float(
        sum(q * linalg.operator_norm(w - mean) ** 2 for q, w in zip(e.probs, e.options))
    )


def lemma1_bound(e: MixedUnitaryEnsemble) -> float:
    """
    Per-gate bound ``delta + 2 ||W_mean - U||`` on the diamond distance
    between the ideal gate and the averaged channel
    """
    return delta(e) + 2 * mean_deviation(e)


def lemma2_bound(ensembles: t.Iterable[MixedUnitaryEnsemble]) -> float:
    """
    Circuit bound: the per-gate bounds summed over the circuit
    """
    return float(sum(lemma1_bound(e) for e in ensembles))


def naive_coherent_bound(
    realized: t.Sequence[t.Any], targets: t.Sequence[t.Any]
) -> float:
    """
    ``2 sum_i ||V_i - U_i||``: the triangle-inequality bound on
    ``tr|U rho U^+ - V rho V^+|`` for one fixed realization
    """
    if len(realized) != len(targets):
        raise DimensionError(f"{len(realized)} gates realized for {len(targets)}")
    return 2 * float(
        sum(
            linalg.operator_norm(linalg.as_matrix(v) - linalg.as_matrix(u))
            for v, u in zip(realized, targets)
        )
    )


# Sampling


def sample(e: MixedUnitaryEnsemble, rng: np.random.Generator) -> tuple[int, Matrix]:
    """
    Draws an option with probability ``q(a)``. Options are numbered from 1.
    """
    if e.size == 1:
        return 1, e.options[0]
    index = int(rng.choice(e.size, p=e.probs))
    return index + 1, e.options[index]


# Z rotations


def normalize_angle(angle: float) -> float:
    """
    Maps an angle into ``(-pi, pi]``
    """
    return float(np.pi - np.mod(np.pi - angle, 2 * np.pi))


@dataclass(frozen=True)
class ZRotationSpec:
    """
    Target ``exp(i theta Z)`` approximated by the options
    ``exp(i theta_a Z)``. Angles are normalized to ``(-pi, pi]``.
    """

    theta_target: float
    theta_options: tuple[float, ...]

    def __post_init__(self):
        if not self.theta_options:
            raise InvalidMixtureError("A Z rotation needs at least one option angle")
        object.__setattr__(self, "theta_target", normalize_angle(self.theta_target))
        object.__setattr__(
            self, "theta_options", tuple(normalize_angle(a) for a in self.theta_options)
        )

    @property
    def phis(self) -> tuple[float, ...]:
        """
        Option offsets ``phi_a = theta_a - theta`` in ``(-pi, pi]``
        """
        theta = self.theta_target
        return tuple(normalize_angle(a - theta) for a in self.theta_options)


def z_rotation_probs(spec: ZRotationSpec) -> tuple[float, ...]:
    """
    Solves ``q1 phi1 + q2 phi2 = 0`` for two options, so the mixture may
    straddle the branch cut at ``pi``. A target on an endpoint gives the
    degenerate distribution on that endpoint.

    :raises InvalidMixtureError: if there aren't exactly two options or the
        target lies outside the interval they span
    """
    if len(spec.theta_options) != 2:
        raise InvalidMixtureError(
            f"The mean constraint fixes the mixture of two options only, got "
            f"{len(spec.theta_options)}: supply the probabilities explicitly"
        )
    theta = spec.theta_target
    phi1, phi2 = spec.phis
    if phi1 == phi2:
        if abs(phi1) <= ANGLE_TOL:
            return (1.0, 0.0)
        option = spec.theta_options[0]
        raise InvalidMixtureError(
            f"Both options are {option!r}, cannot average to {theta!r}"
        )
    if not min(phi1, phi2) - ANGLE_TOL <= 0 <= max(phi1, phi2) + ANGLE_TOL:
        low, high = spec.theta_options
        raise InvalidMixtureError(
            f"Target {theta!r} lies outside the option interval [{low!r}, {high!r}]"
        )
    q1 = float(np.clip(phi2 / (phi2 - phi1), 0.0, 1.0))
    return (q1, 1.0 - q1)


def _z_probs(spec: ZRotationSpec, probs: t.Sequence[float] | None) -> np.ndarray:
    if probs is None:
        probs = z_rotation_probs(spec)
    return check_distribution(probs, len(spec.theta_options))


def z_rotation_ensemble(
    spec: ZRotationSpec, probs: t.Sequence[float] | None = None
) -> MixedUnitaryEnsemble:
    """
    The ensemble of ``exp(i theta_a Z)`` for the target ``exp(i theta Z)``.
    Without ``probs`` the two-option mean constraint is solved.

    :raises InvalidMixtureError:
    """
    q = _z_probs(spec, probs)
    mean_offset = float(np.dot(q, spec.phis))
    if abs(mean_offset) > 1e-9:
        logger.debug(
            f"Mixture misses the target {spec.theta_target:.12g} by "
            f"{mean_offset:.12g}: the mean error enters the bound linearly"
        )
    return MixedUnitaryEnsemble(
        linalg.z_rotation(spec.theta_target),
        tuple(linalg.z_rotation(a) for a in spec.theta_options),
        tuple(q),
    )


def _mean_phase(spec: ZRotationSpec, q: np.ndarray) -> complex:
    return complex(np.sum(q * np.exp(1j * np.asarray(spec.phis))))


def z_rotation_norm_exact(
    spec: ZRotationSpec, probs: t.Sequence[float] | None = None
) -> float:
    """
    ``||W_mean - U|| = |sum_a q_a exp(i phi_a) - 1|``
    """
    return abs(_mean_phase(spec, _z_probs(spec, probs)) - 1)


def z_rotation_delta_exact(
    spec: ZRotationSpec, probs: t.Sequence[float] | None = None
) -> float:
    """
    ``delta = 1 - |sum_a q_a exp(i phi_a)|^2`` for diagonal options
    """
    return max(0.0, 1 - abs(_mean_phase(spec, _z_probs(spec, probs))) ** 2)


@dataclass(frozen=True)
class SeriesBound:
    """
    Second-order bounds on ``||W_mean - U||`` and ``delta`` with their
    quartic remainder caps
    """

    norm_leading: float
    delta_leading: float
    norm_remainder: float
    delta_remainder: float

    @property
    def norm_bound(self) -> float:
        return self.norm_leading + self.norm_remainder

    @property
    def delta_bound(self) -> float:
        return self.delta_leading + self.delta_remainder


def z_rotation_series_bound(
    spec: ZRotationSpec, probs: t.Sequence[float] | None = None
) -> SeriesBound:
    """
    Leading terms ``sum_a q_a phi_a^2 / 2`` (norm) and ``sum_a q_a phi_a^2``
    (delta), valid when the probabilities satisfy the mean constraint
    """
    q = _z_probs(spec, probs)
    phis = np.asarray(spec.phis)
    second = float(np.sum(q * phis**2))
    quartic = float(np.sum(phis**4))
    return SeriesBound(
        norm_leading=second / 2,
        delta_leading=second,
        norm_remainder=NORM_REMAINDER_CONSTANT * quartic,
        delta_remainder=DELTA_REMAINDER_CONSTANT * quartic,
    )
