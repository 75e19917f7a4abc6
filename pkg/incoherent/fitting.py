"""
Power-law exponents from log-log least squares.
"""
import logging
import math
import typing as t
from dataclasses import dataclass

import numpy as np
from scipy import stats

logger = logging.getLogger(__name__)

NOISE_FLOOR = 1e-12
CONFIDENCE = 0.95


@dataclass(frozen=True)
class SlopeFit:
    """
    ``log10(y) = slope * log10(x) + intercept``. ``low``/``high`` bound the
    slope at 95% confidence; they are NaN when only two points remain.
    """

    slope: float
    intercept: float
    low: float
    high: float
    points: int

    @property
    def coefficient(self) -> float:
        """
        ``c`` in ``y ~ c x^slope``
        """
        return 10**self.intercept

    def summary(self) -> str:
        return (
            f"slope={self.slope:.6g} ci95=[{self.low:.6g}, {self.high:.6g}] "
            f"coefficient={self.coefficient:.6g} points={self.points}"
        )


def fit_loglog_slope(
    xs: t.Sequence[float], ys: t.Sequence[float], floor: float = NOISE_FLOOR
) -> SlopeFit | None:
    """
    Fits a line to ``(log10 x, log10 y)``, skipping points with ``y < floor``.
    Returns None when fewer than two points survive.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    keep = (x > 0) & np.isfinite(y) & (y >= floor)
    if np.count_nonzero(keep) < 2:
        logger.debug(f"Not enough points above {floor:g} to fit a slope")
        return None
    lx, ly = np.log10(x[keep]), np.log10(y[keep])
    result = stats.linregress(lx, ly)
    points = len(lx)
    if points > 2:
        spread = stats.t.ppf((1 + CONFIDENCE) / 2, points - 2) * result.stderr
        low, high = result.slope - spread, result.slope + spread
    else:
        low = high = math.nan
    return SlopeFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        low=float(low),
        high=float(high),
        points=points,
    )
