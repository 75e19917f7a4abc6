import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from incoherent.ensembles import ZRotationSpec
from incoherent.ensembles import delta
from incoherent.ensembles import mean_deviation
from incoherent.ensembles import mean_unitary
from incoherent.ensembles import normalize_angle
from incoherent.ensembles import z_rotation_delta_exact
from incoherent.ensembles import z_rotation_ensemble
from incoherent.ensembles import z_rotation_norm_exact
from incoherent.ensembles import z_rotation_probs
from incoherent.ensembles import z_rotation_series_bound
from incoherent.exceptions import DistributionError
from incoherent.exceptions import InvalidMixtureError

PI8_SPEC = ZRotationSpec(np.pi / 8, (0.35, 0.40))


def test_mean_constraint_solve():
    """
    Test q1 theta1 + q2 theta2 = theta for the pi/8 target
    """
    q1, q2 = z_rotation_probs(PI8_SPEC)
    assert q1 == pytest.approx((0.40 - np.pi / 8) / 0.05, abs=1e-12)
    assert q1 == pytest.approx(0.1460, abs=1e-4)
    assert q2 == pytest.approx(1 - q1)
    assert q1 * 0.35 + q2 * 0.40 == pytest.approx(np.pi / 8, abs=1e-12)


def test_pi8_mean_unitary():
    """
    Test W_mean = diag(q1 e^{0.35i} + q2 e^{0.40i}, conjugate)
    """
    q1, q2 = z_rotation_probs(PI8_SPEC)
    entry = q1 * np.exp(0.35j) + q2 * np.exp(0.40j)
    e = z_rotation_ensemble(PI8_SPEC)
    assert np.allclose(mean_unitary(e), np.diag([entry, np.conj(entry)]), atol=1e-12)


def test_target_on_an_endpoint_is_degenerate():
    """
    Test the whole weight goes to the matching endpoint
    """
    assert z_rotation_probs(ZRotationSpec(0.35, (0.35, 0.40))) == pytest.approx(
        (1.0, 0.0)
    )
    assert z_rotation_probs(ZRotationSpec(0.2, (0.2, 0.2))) == (1.0, 0.0)


def test_unreachable_targets_are_rejected():
    """
    Test targets outside the option interval have no mixture
    """
    with pytest.raises(InvalidMixtureError):
        z_rotation_probs(ZRotationSpec(0.5, (0.35, 0.40)))
    with pytest.raises(InvalidMixtureError):
        z_rotation_probs(ZRotationSpec(0.3, (0.2, 0.2)))


def test_more_than_two_options_need_probabilities():
    """
    Test the mean constraint is only solved for two options
    """
    spec = ZRotationSpec(0.3, (0.25, 0.3, 0.35))
    with pytest.raises(InvalidMixtureError):
        z_rotation_ensemble(spec)
    e = z_rotation_ensemble(spec, (0.25, 0.5, 0.25))
    assert e.size == 3
    with pytest.raises(DistributionError):
        z_rotation_ensemble(spec, (0.5, 0.5))


def test_empty_options_are_rejected():
    """
    Test a Z rotation spec needs an option
    """
    with pytest.raises(InvalidMixtureError):
        ZRotationSpec(0.1, ())


def test_angles_are_normalized():
    """
    Test angles map into (-pi, pi]
    """
    assert normalize_angle(np.pi) == pytest.approx(np.pi)
    assert normalize_angle(-np.pi) == pytest.approx(np.pi)
    assert normalize_angle(3 * np.pi / 2) == pytest.approx(-np.pi / 2)
    spec = ZRotationSpec(2 * np.pi + 0.1, (0.05, 0.15 - 2 * np.pi))
    assert spec.theta_target == pytest.approx(0.1)
    assert spec.phis == pytest.approx((-0.05, 0.05))


def test_closed_forms_match_the_generic_quantities():
    """
    Test |sum q e^{i phi} - 1| and 1 - |sum q e^{i phi}|^2 against matrices
    """
    for spec in (PI8_SPEC, ZRotationSpec(0.0, (0.1, -0.1))):
        e = z_rotation_ensemble(spec)
        norm = z_rotation_norm_exact(spec)
        assert norm == pytest.approx(mean_deviation(e), abs=1e-12)
        assert z_rotation_delta_exact(spec) == pytest.approx(delta(e), abs=1e-12)


def test_pm_epsilon_closed_forms():
    """
    Test the +-0.1 mixture: deviation 1 - cos(0.1), delta sin^2(0.1)
    """
    spec = ZRotationSpec(0.0, (0.1, -0.1))
    assert z_rotation_norm_exact(spec) == pytest.approx(0.0049958, abs=1e-7)
    assert z_rotation_delta_exact(spec) == pytest.approx(np.sin(0.1) ** 2, abs=1e-12)


@given(
    st.floats(min_value=-1.0, max_value=1.0),
    st.floats(min_value=0.0, max_value=0.3),
    st.floats(min_value=0.0, max_value=0.3),
)
def test_series_bound_dominates_the_exact_values(theta, up, down):
    """
    Test the second-order bounds with their remainders for |phi| <= 0.3
    """
    spec = ZRotationSpec(theta, (theta + up, theta - down))
    if up == down == 0:
        return
    series = z_rotation_series_bound(spec)
    assert z_rotation_norm_exact(spec) <= series.norm_bound + 1e-12
    assert z_rotation_delta_exact(spec) <= series.delta_bound + 1e-12
    assert series.delta_leading == pytest.approx(2 * series.norm_leading)


def test_series_leading_terms():
    """
    Test sum q phi^2 / 2 and sum q phi^2 for the +-eps mixture
    """
    series = z_rotation_series_bound(ZRotationSpec(0.0, (0.1, -0.1)))
    assert series.norm_leading == pytest.approx(0.005)
    assert series.delta_leading == pytest.approx(0.01)
    assert series.norm_remainder == pytest.approx(2e-4)
    assert series.delta_remainder == pytest.approx(4e-4)


def test_offsets_straddling_pi_are_wrapped():
    """
    Test options on both sides of the branch cut give small offsets
    """
    spec = ZRotationSpec(np.pi - 0.01, (np.pi + 0.05, np.pi - 0.05))
    assert spec.phis == pytest.approx((0.06, -0.04), abs=1e-12)
    assert z_rotation_probs(spec) == pytest.approx((0.4, 0.6), abs=1e-12)
    series = z_rotation_series_bound(spec, (0.5, 0.5))
    assert series.norm_leading == pytest.approx(0.0013, abs=1e-12)
    assert series.delta_leading == pytest.approx(0.0026, abs=1e-12)
    assert series.delta_remainder == pytest.approx(2 * (0.06**4 + 0.04**4))


def test_series_bound_across_the_branch_cut():
    """
    Test the solved mixture around pi against its closed forms and matrices
    """
    spec = ZRotationSpec(np.pi - 0.01, (np.pi + 0.05, np.pi - 0.05))
    e = z_rotation_ensemble(spec)
    series = z_rotation_series_bound(spec)
    assert series.delta_leading == pytest.approx(0.0024, abs=1e-12)
    assert z_rotation_norm_exact(spec) == pytest.approx(mean_deviation(e), abs=1e-12)
    assert z_rotation_delta_exact(spec) == pytest.approx(delta(e), abs=1e-12)
    assert z_rotation_norm_exact(spec) <= series.norm_bound
    assert z_rotation_delta_exact(spec) <= series.delta_bound
    assert series.norm_bound < 2e-3
