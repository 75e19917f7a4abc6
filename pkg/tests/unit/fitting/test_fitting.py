import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from incoherent.fitting import fit_loglog_slope


@given(
    st.floats(min_value=-3, max_value=3),
    st.floats(min_value=1e-3, max_value=1e3),
)
def test_exact_power_laws(slope, coefficient):
    """
    Test y = c x^k gives slope k and coefficient c
    """
    xs = np.geomspace(1, 1000, 7)
    fit = fit_loglog_slope(xs, coefficient * xs**slope, floor=0.0)
    assert fit.slope == pytest.approx(slope, abs=1e-9)
    assert fit.coefficient == pytest.approx(coefficient, rel=1e-9)
    assert fit.points == 7
    assert fit.low <= fit.slope <= fit.high


def test_points_below_the_floor_are_skipped():
    """
    Test zeros and values under the noise floor don't enter the fit
    """
    xs = [1, 10, 100, 1000]
    fit = fit_loglog_slope(xs, [0.0, 1e-14, 1e-4, 1e-2])
    assert fit.points == 2
    assert fit.slope == pytest.approx(2.0)


def test_two_points_have_no_interval():
    """
    Test the confidence interval is NaN with two points
    """
    fit = fit_loglog_slope([1, 10], [1, 100])
    assert fit.slope == pytest.approx(2.0)
    assert math.isnan(fit.low) and math.isnan(fit.high)
    assert "points=2" in fit.summary()


def test_too_few_points():
    """
    Test None when fewer than two points survive
    """
    assert fit_loglog_slope([1, 10], [1e-3, 0.0]) is None
    assert fit_loglog_slope([], []) is None
    assert fit_loglog_slope([0, 10], [1, 1]) is None


def test_noisy_slope_interval(rng):
    """
    Test a noisy power law recovers its slope with a narrow interval
    """
    xs = np.geomspace(10, 1000, 12)
    ys = 0.5 * xs**0.5 * np.exp(rng.normal(scale=0.01, size=len(xs)))
    fit = fit_loglog_slope(xs, ys)
    assert fit.slope == pytest.approx(0.5, abs=0.02)
    assert fit.low < fit.slope < fit.high
    assert fit.high - fit.low < 0.05
