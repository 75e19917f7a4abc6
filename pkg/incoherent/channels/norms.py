"""
Distances between channels, computed by direct maximization.

For a Hermiticity-preserving map ``Phi`` with Choi matrix ``J``::

    ||Phi||_diamond = max_rho || (I (x) sqrt(rho)) J (I (x) sqrt(rho)) ||_1

Writing ``rho = B^+ B / tr(B^+ B)`` the objective becomes
``||(I (x) B) J (I (x) B^+)||_1 / tr(B^+ B)`` (polar decomposition of ``B``),
which is smooth in the entries of ``B`` and needs no square roots.

The maximization is a dense grid over the density matrices followed by a
pattern search (coordinate moves plus a few random directions, step halved
when a sweep doesn't improve) from the best grid points and from random
restarts. Everything is seeded, so results are deterministic.
"""
import logging
import typing as t
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from incoherent import linalg
from incoherent.channels.base import Channel
from incoherent.channels.base import difference
from incoherent.channels.base import to_choi
from incoherent.exceptions import DiamondDimensionError
from incoherent.exceptions import DimensionError
from incoherent.linalg import Matrix

logger = logging.getLogger(__name__)

MAX_NORM_DIM = 4
DEFAULT_SEED = 0
RESTARTS = 20
GRID_KEEP = 4
SOBOL_POINTS = 256
BLOCH_RADII = (0.5, 0.8, 0.95, 1.0)
BLOCH_DIRECTIONS = 48
RANDOM_DIRECTIONS = 4
STEP_START = 0.25
STEP_MIN = 1e-8
MAX_SWEEPS = 400

Objective = t.Callable[[np.ndarray], np.ndarray]
Normalizer = t.Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class NormSearch:
    """
    Outcome of a norm maximization. ``maximizer`` is the optimal density
    matrix for diamond norms and the optimal rank-one input ``|u><v|`` for
    induced trace norms. ``slack`` estimates how far ``value`` may sit below
    the true maximum.
    """

    value: float
    slack: float
    maximizer: Matrix
    evaluations: int


# Parameterizations


def _to_complex(x: np.ndarray, d: int, blocks: int) -> np.ndarray:
    """
    Real parameters (real parts, then imaginary parts) to a complex ``d x d``
    matrix (``blocks == 1``) or to ``blocks`` complex vectors of length ``d``
    """
    half = x.shape[-1] // 2
    z = x[..., :half] + 1j * x[..., half:]
    if blocks == 1:
        return z.reshape(*x.shape[:-1], d, d)
    return z.reshape(*x.shape[:-1], blocks, d)


def _from_complex(z: np.ndarray) -> np.ndarray:
    flat = z.reshape(*z.shape[: z.ndim - 2], -1) if z.ndim > 1 else z
    return np.concatenate([flat.real, flat.imag], axis=-1)


def _unit_rows(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


# Pattern search


def _pattern_search(
    objective: Objective,
    starts: np.ndarray,
    normalize: Normalizer,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """
    Maximizes ``objective`` from every row of ``starts`` at once.

    Returns the final points, their values, the gain of each start's last
    productive sweep and the number of objective evaluations.
    """
    x = normalize(starts.copy())
    values = objective(x)
    evaluations = len(x)
    steps = np.full(len(x), STEP_START)
    last_gain = np.zeros(len(x))
    p = x.shape[1]

    for _ in range(MAX_SWEEPS):
        active = np.flatnonzero(steps > STEP_MIN)
        if not active.size:
            break
        directions = np.vstack(
            [np.eye(p), _unit_rows(rng.normal(size=(RANDOM_DIRECTIONS, p)))]
        )
        before = values[active].copy()
        for direction in directions:
            for sign in (1.0, -1.0):
                candidate = x[active] + (sign * steps[active])[:, None] * direction
                trial = objective(candidate)
                evaluations += active.size
                better = trial > values[active]
                x[active[better]] = candidate[better]
                values[active[better]] = trial[better]
        gain = values[active] - before
        last_gain[active[gain > 0]] = gain[gain > 0]
        steps[active[gain <= 0]] /= 2
        x[active] = normalize(x[active])

    return x, values, last_gain, evaluations


def _maximize(
    objective: Objective,
    grid: np.ndarray,
    restarts: np.ndarray,
    normalize: Normalizer,
    rng: np.random.Generator,
) -> tuple[np.ndarray, float, float, int]:
    grid_values = objective(normalize(grid.copy()))
    best_grid = grid[np.argsort(grid_values)[::-1][:GRID_KEEP]]
    starts = np.vstack([best_grid, restarts])
    x, values, last_gain, evaluations = _pattern_search(
        objective, starts, normalize, rng
    )
    winner = int(np.argmax(values))
    best = float(values[winner])
    # Starts ending near the winner converged to the same maximum: their
    # spread and the winner's last gain estimate the remaining slack.
    agreeing = values[values >= best - 1e-4]
    slack = max(float(best - agreeing.min()), float(last_gain[winner]), 1e-12)
    return x[winner], best, slack, evaluations + len(grid)


# Diamond norm


def _bloch_grid() -> np.ndarray:
    """
    Square roots of qubit density matrices on shells of the Bloch ball
    """
    k = np.arange(BLOCH_DIRECTIONS) + 0.5
    polar = np.arccos(1 - 2 * k / BLOCH_DIRECTIONS)
    azimuth = np.pi * (1 + 5**0.5) * k
    directions = np.stack(
        [
            np.sin(polar) * np.cos(azimuth),
            np.sin(polar) * np.sin(azimuth),
            np.cos(polar),
        ],
        axis=1,
    )
    roots = [linalg.psd_sqrt(np.eye(2) / 2)]
    for radius in BLOCH_RADII:
        for nx, ny, nz in directions * radius:
            rho = (np.eye(2) + nx * linalg.X + ny * linalg.Y + nz * linalg.Z) / 2
            roots.append(linalg.psd_sqrt(rho))
    return _from_complex(np.array(roots))


def _sobol_grid(size: int, seed: int) -> np.ndarray:
    sample = qmc.Sobol(d=size, scramble=True, seed=seed).random(SOBOL_POINTS)
    return 2 * sample - 1


def _check_norm_dim(c: Channel) -> None:
    if c.input_dim > MAX_NORM_DIM:
        raise DiamondDimensionError(
            f"Norm searches support input dimension <= {MAX_NORM_DIM}, "
            f"got {c.input_dim}"
        )


def diamond_norm_search(c: Channel, seed: int = DEFAULT_SEED) -> NormSearch:
    """
    Maximizes the stabilized trace norm of the Hermiticity-preserving map ``c``

    :raises DiamondDimensionError: if the input dimension exceeds 4
    """
    _check_norm_dim(c)
    d = c.input_dim
    choi = to_choi(c).matrix
    choi = (choi + choi.conj().T) / 2
    j4 = choi.reshape(d, d, d, d)

    def objective(x: np.ndarray) -> np.ndarray:
        b = _to_complex(x, d, blocks=1)
        out = np.einsum("nbk,akcl,nel->nabce", b, j4, b.conj())
        out = out.reshape(len(x), d * d, d * d)
        out = (out + np.conj(np.swapaxes(out, 1, 2))) / 2
        weights = np.sum(np.abs(b) ** 2, axis=(1, 2))
        return linalg.hermitian_trace_norms(out) / weights

    rng = np.random.default_rng(seed)
    if d == 2:
        grid = _bloch_grid()
    else:
        identity = _from_complex(np.eye(d, dtype=complex))[None, :]
        grid = np.vstack([identity, _sobol_grid(2 * d * d, seed)])
    restarts = rng.normal(size=(RESTARTS, 2 * d * d))

    x, value, slack, evaluations = _maximize(objective, grid, restarts, _unit_rows, rng)
    b = _to_complex(x, d, blocks=1)
    rho = b.conj().T @ b
    rho = rho / np.trace(rho).real
    logger.debug(
        f"Diamond norm search (d={d}): {value:.12g} +/- {slack:.1e} "
        f"after {evaluations} evaluations"
    )
    return NormSearch(value, slack, rho, evaluations)


def diamond_norm(c: Channel, seed: int = DEFAULT_SEED) -> float:
    return diamond_norm_search(c, seed).value


def diamond_norm_diff(e: Channel, g: Channel, seed: int = DEFAULT_SEED) -> float:
    """
    ``||e - g||_diamond``

    :raises DimensionError: if the channels act on different dimensions
    :raises DiamondDimensionError: if the input dimension exceeds 4
    """
    if e.input_dim != g.input_dim:
        raise DimensionError(
            f"Channels act on different dimensions: {e.input_dim} and {g.input_dim}"
        )
    return diamond_norm(difference(e, g), seed)


# Induced trace norm


def induced_one_norm_search(c: Channel, seed: int = DEFAULT_SEED) -> NormSearch:
    """
    Maximizes ``||c(X)||_1`` over ``||X||_1 = 1`` without an ancilla. The
    maximum of a convex function sits on an extreme point ``|u><v|`` of the
    trace-norm ball, so the search runs over pairs of vectors.

    :raises DiamondDimensionError: if the input dimension exceeds 4
    """
    _check_norm_dim(c)
    d = c.input_dim
    superoperator = np.asarray(c.superoperator)

    def split(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z = _to_complex(x, d, blocks=2)
        return z[:, 0], z[:, 1]

    def normalize(x: np.ndarray) -> np.ndarray:
        u, v = split(x)
        u, v = _unit_rows(u), _unit_rows(v)
        return _from_complex(np.stack([u, v], axis=1))

    def objective(x: np.ndarray) -> np.ndarray:
        u, v = split(x)
        inputs = np.einsum("ni,nj->nij", u, v.conj())
        vectors = inputs.transpose(0, 2, 1).reshape(len(x), d * d)
        outputs = (vectors @ superoperator.T).reshape(len(x), d, d).transpose(0, 2, 1)
        norms = np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1)
        return np.linalg.svd(outputs, compute_uv=False).sum(axis=-1) / norms

    rng = np.random.default_rng(seed)
    grid = _sobol_grid(4 * d, seed)
    restarts = rng.normal(size=(RESTARTS, 4 * d))
    x, value, slack, evaluations = _maximize(objective, grid, restarts, normalize, rng)
    u, v = split(x[None, :])
    maximizer = np.outer(u[0], v[0].conj())
    maximizer = maximizer / linalg.trace_norm(maximizer)
    logger.debug(f"Induced trace norm search (d={d}): {value:.12g} +/- {slack:.1e}")
    return NormSearch(value, slack, maximizer, evaluations)


def induced_one_norm_diff(e: Channel, g: Channel, seed: int = DEFAULT_SEED) -> float:
    """
    ``||e - g||_1``, the induced trace norm of the difference (no ancilla)
    """
    if e.input_dim != g.input_dim:
        raise DimensionError(
            f"Channels act on different dimensions: {e.input_dim} and {g.input_dim}"
        )
    return induced_one_norm_search(difference(e, g), seed).value


def choi_trace_norm(c: Channel) -> float:
    """
    ``||J(c)||_1``. For ``d``-dimensional maps
    ``||J||_1 / d <= ||c||_diamond <= ||J||_1``.
    """
    return linalg.trace_norm(to_choi(c).matrix)
