"""
Quantum channels and Hermiticity-preserving differences of channels.

The superoperator is the canonical representation. It acts on density
matrices vectorized by column stacking::

    vec(A X B) = (B^T (x) A) vec(X)

so the channel ``X -> K X K^+`` has superoperator ``conj(K) (x) K``.
"""
import enum
import typing as t
from dataclasses import dataclass

import numpy as np

from incoherent import linalg
from incoherent.exceptions import DimensionError
from incoherent.exceptions import DistributionError
from incoherent.exceptions import KrausCompletenessError
from incoherent.linalg import Matrix

KRAUS_TOL = 1e-9
PROBABILITY_TOL = 1e-12


class ChannelKind(enum.Enum):
    CPTP = "cptp"
    DIFFERENCE = "hermiticity-preserving-difference"


def vec(x: Matrix) -> Matrix:
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: Matrix, dim: int) -> Matrix:
    return np.asarray(v).reshape(dim, dim, order="F")


@dataclass(frozen=True, eq=False)
class Channel:
    """
    A linear map on ``input_dim x input_dim`` matrices. Kraus operators are
    kept when known and few (no more than ``input_dim**2``).
    """

    input_dim: int
    superoperator: Matrix
    kraus: tuple[Matrix, ...] | None = None
    kind: ChannelKind = ChannelKind.CPTP

    def __post_init__(self):
        d2 = self.input_dim**2
        if self.superoperator.shape != (d2, d2):
            raise DimensionError(
                f"Superoperator shape {self.superoperator.shape} doesn't act on "
                f"{self.input_dim}x{self.input_dim} matrices"
            )
        object.__setattr__(self, "superoperator", linalg.freeze(self.superoperator))
        if self.kraus is not None:
            object.__setattr__(
                self, "kraus", tuple(linalg.freeze(op) for op in self.kraus)
            )

    def __call__(self, rho: t.Any) -> Matrix:
        return apply(self, rho)

    def __sub__(self, other: "Channel") -> "Channel":
        return difference(self, other)

    def is_trace_preserving(self, tol: float = 1e-10) -> bool:
        """
        ``tr(E(X)) = tr(X)`` for every X, i.e. ``vec(I)^T S = vec(I)^T``
        """
        identity = vec(np.eye(self.input_dim))
        return bool(np.max(np.abs(identity @ self.superoperator - identity)) <= tol)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """
    Unnormalized Choi matrix ``J = (Phi (x) I)(|Omega><Omega|)`` with
    ``|Omega> = sum_i |ii>``. The first tensor factor is the channel output.
    """

    matrix: Matrix
    input_dim: int

    def output_trace(self) -> Matrix:
        """
        Partial trace over the output factor. Identity for trace-preserving maps.
        """
        return linalg.partial_trace(
            self.matrix, (self.input_dim, self.input_dim), keep=1
        )

    def is_positive(self, tol: float = 1e-9) -> bool:
        eigenvalues, _ = linalg.hermitian_eig(self.matrix, tol=max(tol, 1e-10))
        return bool(eigenvalues[0] >= -tol)


def _square_dim(ops: t.Sequence[Matrix]) -> int:
    if not ops:
        raise DimensionError("At least one operator is required")
    dim = ops[0].shape[0]
    for op in ops:
        if op.shape != (dim, dim):
            raise DimensionError(f"Operators of shapes {ops[0].shape} and {op.shape}")
    return dim


def _superoperator_from_kraus(ops: t.Sequence[Matrix]) -> Matrix:
    return sum(np.kron(op.conj(), op) for op in ops)


def _trimmed_kraus(ops: list[Matrix], dim: int) -> tuple[Matrix, ...] | None:
    ops = [op for op in ops if np.any(op)]
    return tuple(ops) if 0 < len(ops) <= dim**2 else None


def kraus_deviation(ops: t.Sequence[Matrix]) -> float:
    total = sum(op.conj().T @ op for op in ops)
    return float(np.max(np.abs(total - np.eye(ops[0].shape[0]))))


# Constructors


def identity_channel(dim: int) -> Channel:
    return channel_from_unitary(np.eye(dim))


def channel_from_unitary(u: t.Any) -> Channel:
    """
    ``sigma -> U sigma U^+``

    :raises NotUnitaryError:
    """
    u = linalg.check_unitary(u)
    return Channel(u.shape[0], np.kron(u.conj(), u), kraus=(u,))


def channel_from_kraus(ops: t.Sequence[t.Any]) -> Channel:
    """
    ``sigma -> sum_i A_i sigma A_i^+``

    :raises KrausCompletenessError: if ``sum A_i^+ A_i`` isn't the identity
    """
    matrices = [linalg.as_matrix(op) for op in ops]
    dim = _square_dim(matrices)
    deviation = kraus_deviation(matrices)
    if deviation > KRAUS_TOL:
        raise KrausCompletenessError(deviation)
    return Channel(
        dim, _superoperator_from_kraus(matrices), kraus=_trimmed_kraus(matrices, dim)
    )


# Algebra


def check_distribution(probs: t.Sequence[float], size: int) -> np.ndarray:
    """
    :raises DistributionError:
    """
    p = np.asarray(probs, dtype=float)
    if p.shape != (size,):
        raise DistributionError(f"Expected {size} probabilities, got {p.shape}")
    if np.any(~np.isfinite(p)) or np.any(p < 0):
        raise DistributionError(f"Probabilities must be nonnegative: {p}")
    if abs(p.sum() - 1.0) > PROBABILITY_TOL:
        raise DistributionError(f"Probabilities sum to {p.sum():.15g}, not 1")
    return p


def _check_same_dim(channels: t.Sequence[Channel]) -> int:
    if not channels:
        raise DimensionError("At least one channel is required")
    dims = {c.input_dim for c in channels}
    if len(dims) != 1:
        raise DimensionError(f"Channels act on different dimensions: {sorted(dims)}")
    return channels[0].input_dim


def mix(channels: t.Sequence[Channel], probs: t.Sequence[float]) -> Channel:
    """
    Convex combination ``sum_a q(a) E_a``

    :raises DistributionError:
    :raises DimensionError:
    """
    dim = _check_same_dim(channels)
    p = check_distribution(probs, len(channels))
    superoperator = sum(q * c.superoperator for q, c in zip(p, channels))
    kraus = None
    if all(c.kraus is not None for c in channels):
        kraus = _trimmed_kraus(
            [np.sqrt(q) * op for q, c in zip(p, channels) for op in c.kraus], dim
        )
    kind = ChannelKind.CPTP
    if any(c.kind is ChannelKind.DIFFERENCE for c in channels):
        kind = ChannelKind.DIFFERENCE
    return Channel(dim, superoperator, kraus=kraus, kind=kind)


def compose(outer: Channel, inner: Channel) -> Channel:
    """
    ``outer o inner``: ``inner`` acts first

    :raises DimensionError:
    """
    dim = _check_same_dim([outer, inner])
    kraus = None
    if outer.kraus is not None and inner.kraus is not None:
        kraus = _trimmed_kraus([a @ b for a in outer.kraus for b in inner.kraus], dim)
    kind = ChannelKind.CPTP
    if ChannelKind.DIFFERENCE in (outer.kind, inner.kind):
        kind = ChannelKind.DIFFERENCE
    return Channel(dim, outer.superoperator @ inner.superoperator, kraus, kind)


def compose_all(channels: t.Sequence[Channel]) -> Channel:
    """
    ``E_N o ... o E_1`` for ``channels = [E_1, ..., E_N]``
    """
    result = channels[0]
    for channel in channels[1:]:
        result = compose(channel, result)
    return result


def difference(e: Channel, g: Channel) -> Channel:
    """
    The Hermiticity-preserving map ``e - g``
    """
    dim = _check_same_dim([e, g])
    return Channel(
        dim, e.superoperator - g.superoperator, kind=ChannelKind.DIFFERENCE
    )


def apply(c: Channel, rho: t.Any) -> Matrix:
    """
    :raises DimensionError: if ``rho`` doesn't match the channel dimension
    """
    rho = linalg.as_matrix(rho)
    if rho.shape != (c.input_dim, c.input_dim):
        raise DimensionError(
            f"Channel acts on dimension {c.input_dim}, got shape {rho.shape}"
        )
    return unvec(c.superoperator @ vec(rho), c.input_dim)


def to_choi(c: Channel) -> ChoiMatrix:
    """
    ``J = sum_ij Phi(E_ij) (x) E_ij``
    """
    d = c.input_dim
    matrix = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            matrix += np.kron(apply(c, unit), unit)
    return ChoiMatrix(linalg.freeze(matrix), d)


def tensor_identity(c: Channel, ancilla_dim: int) -> Channel:
    """
    ``c (x) id`` on ``input_dim * ancilla_dim`` dimensional matrices, the
    channel factor being the slow index
    """
    d, a = c.input_dim, ancilla_dim
    # s[i, j, k, l] maps X[k, l] into Y[i, j]
    s = c.superoperator.reshape(d, d, d, d, order="F")
    big = np.einsum("ijkl,pr,qs->ipjqkrls", s, np.eye(a), np.eye(a))
    big = big.reshape(d * a, d * a, d * a, d * a)
    big = big.reshape((d * a) ** 2, (d * a) ** 2, order="F")
    kraus = None
    if c.kraus is not None:
        kraus = tuple(np.kron(op, np.eye(a)) for op in c.kraus)
    return Channel(d * a, big, kraus=kraus, kind=c.kind)
