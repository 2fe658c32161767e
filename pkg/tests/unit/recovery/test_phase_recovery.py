from dataclasses import replace

import numpy as np
import pytest
from phaseless_farfield.data_container.far_field import (
    pairing_indices,
    with_values,
)
from phaseless_farfield.data_container.phaseless import synthesize_dataset
from phaseless_farfield.geometry.scene import ReferenceBall
from phaseless_farfield.geometry.scenes import builtin_scene
from phaseless_farfield.recovery.phase_recovery import (
    PhaseCandidates,
    RecoveredField,
    absolute_phase,
    disambiguate_branch,
    fix_global_phase,
    gauge_aligned_error,
    recover_far_field,
    relative_phase,
    resolve_signs,
    wrap,
)
from phaseless_farfield.utilities.exceptions import (
    ExpansionValidityError,
    FragmentationError,
    GaugeInconsistencyError,
    UnresolvedBranchError,
)
from tests.unit.recovery.sample_data import (  # NOQA
    shifted_disk_16,
    shifted_disk_32,
    shifted_disk_64,
    centered_disk_32,
    lone_ball,
    lone_ball_far_field,
    half_aperture_field,
    kite_ball_64,
)


def true_delta(F, d0_index):
    values = F.values
    return wrap(np.angle(values) - np.angle(values[:, d0_index])[:, None])


@pytest.mark.parametrize(
    "angle, expected",
    [(np.pi, np.pi), (-np.pi, np.pi), (1.5 * np.pi, -0.5 * np.pi), (0.25, 0.25),
     (-2.5 * np.pi, -0.5 * np.pi)],
)
def test_wrap(angle, expected):
    """Test to confirm wrapping onto (-pi, pi]"""
    assert abs(wrap(angle) - expected) < 1e-12


def test_relative_phase_cosines(shifted_disk_32):  # NOQA
    """Test to confirm cos delta matches the phase differences of the far field"""
    dataset = synthesize_dataset(shifted_disk_32, float(shifted_disk_32["incidence"][5]))
    rp = relative_phase(dataset)
    assert np.all(rp.mask)
    np.testing.assert_allclose(rp.cos_delta, np.cos(true_delta(shifted_disk_32, 5)), atol=1e-10)
    np.testing.assert_array_equal(rp.cos_delta[:, 5], 1.0)
    assert rp.d0_index == 5 and rp.periodic


def test_vanishing_moduli_are_masked(shifted_disk_32):  # NOQA
    """Test to confirm zero moduli are masked with cos delta = 1 instead of NaN"""
    values = shifted_disk_32.values.copy()
    values[4, :] = 0.0
    values[9, 12] = 0.0
    rp = relative_phase(synthesize_dataset(with_values(shifted_disk_32, values), 0.0))
    assert not np.any(np.isnan(rp.cos_delta))
    assert not np.any(rp.mask[4, :])
    assert not rp.mask[9, 12]
    assert rp.cos_delta[9, 12] == 1.0 and rp.delta[9, 12] == 0.0
    assert np.sum(~rp.mask) == 32 + 1


def test_reciprocity_signs_up_to_global_flip(shifted_disk_32):  # NOQA
    """Test to confirm reciprocity fixes every sign of exact data up to one global flip"""
    dataset = synthesize_dataset(shifted_disk_32, 0.0)
    rp = resolve_signs(relative_phase(dataset), "reciprocity")
    assert rp.method == "reciprocity"
    pm, pn = pairing_indices(rp.obs, rp.inc, "full")
    paired = np.arange(32)[:, None] != pm[None, :]
    truth = true_delta(shifted_disk_32, 0)
    same = np.max(np.abs(wrap(rp.delta - truth))[paired])
    flipped = np.max(np.abs(wrap(rp.delta + truth))[paired])
    assert min(same, flipped) < 1e-6


def test_self_reciprocal_signs_follow_their_rows(kite_ball_64):  # NOQA
    """Test to confirm backscatter entries paired with themselves get the signs of the true delta"""
    dataset = synthesize_dataset(kite_ball_64, 0.0)
    rp = resolve_signs(relative_phase(dataset), "reciprocity")
    pm, _ = pairing_indices(rp.obs, rp.inc, "full")
    own = np.arange(64)[:, None] == pm[None, :]
    assert np.sum(own) > 0
    truth = true_delta(kite_ball_64, 0)
    same = np.max(np.abs(wrap(rp.delta - truth)))
    flipped = np.max(np.abs(wrap(rp.delta + truth)))
    orientation = 1.0 if same <= flipped else -1.0
    assert min(same, flipped) < 1e-6
    assert np.max(np.abs(wrap(rp.delta - orientation * truth))[own]) < 1e-6


def test_smoothness_signs_up_to_global_flip(shifted_disk_64):  # NOQA
    """Test to confirm row continuation alone recovers every sign of exact data up to one flip"""
    dataset = synthesize_dataset(shifted_disk_64, 0.0)
    rp = resolve_signs(relative_phase(dataset), "smoothness")
    assert rp.method == "smoothness"
    truth = true_delta(shifted_disk_64, 0)
    same = np.max(np.abs(wrap(rp.delta - truth))[rp.mask])
    flipped = np.max(np.abs(wrap(rp.delta + truth))[rp.mask])
    assert min(same, flipped) < 1e-6
    assert absolute_phase(rp, dataset).consistency < 1e-6


def test_auto_method_falls_back_to_smoothness(shifted_disk_32):  # NOQA
    """Test to confirm grids without reciprocity partners use the smoothness sweep"""
    unpaired = shifted_disk_32.isel(incidence=slice(0, 8))
    rp = resolve_signs(relative_phase(synthesize_dataset(unpaired, 0.0)))
    assert rp.method == "smoothness"
    assert rp.delta.shape == (32, 8)


def test_unknown_sign_method(shifted_disk_32):  # NOQA
    """Test to confirm unknown sign methods are rejected"""
    with pytest.raises(ValueError):
        resolve_signs(relative_phase(synthesize_dataset(shifted_disk_32, 0.0)), "majority")


def test_fragmented_mask(half_aperture_field):  # NOQA
    """Test to confirm a masked column splitting the grid raises with its components"""
    values = half_aperture_field.values.copy()
    values[:, 3] = 0.0
    dataset = synthesize_dataset(with_values(half_aperture_field, values),
                                 float(half_aperture_field["incidence"][0]))
    with pytest.raises(FragmentationError) as error:
        resolve_signs(relative_phase(dataset), "smoothness")
    assert len(error.value.components) == 2


def test_lift_of_exact_phases(shifted_disk_32):  # NOQA
    """Test to confirm exact relative phases lift to F and -delta to its conjugate"""
    dataset = synthesize_dataset(shifted_disk_32, 0.0)
    rp = replace(relative_phase(dataset), delta=true_delta(shifted_disk_32, 0))
    candidates = absolute_phase(rp, dataset)
    assert candidates.consistency < 1e-8
    assert candidates.warnings == ()
    assert gauge_aligned_error(candidates.direct, shifted_disk_32)[0] < 1e-8
    conjugate = with_values(shifted_disk_32, np.conj(shifted_disk_32.values))
    assert gauge_aligned_error(candidates.conjugate, conjugate)[0] < 1e-8


def test_symmetric_scene_leaves_branch_unresolved(centered_disk_32, lone_ball):  # NOQA
    """Test to confirm a far field symmetric under x -> -x cannot select a branch"""
    candidates = PhaseCandidates(centered_disk_32, centered_disk_32, 0.0)
    with pytest.raises(UnresolvedBranchError) as error:
        disambiguate_branch(candidates, lone_ball)
    assert error.value.ratio < 1.1


def test_gauge_constant_of_the_ball_alone(lone_ball_far_field, lone_ball):  # NOQA
    """Test to confirm boundary matching recovers c = 1 and scales inversely with an injected gauge"""
    reference = fix_global_phase(RecoveredField(lone_ball_far_field, "direct", 10.0), lone_ball, 1.2)
    constant = reference.report["gauge_constant"]
    assert abs(constant - 1) < 0.05
    assert reference.global_phase_fixed
    gauge = np.exp(0.4j)
    injected = fix_global_phase(
        RecoveredField(with_values(lone_ball_far_field, lone_ball_far_field.values * gauge),
                       "direct", 10.0),
        lone_ball, 1.2,
    )
    assert abs(injected.report["gauge_constant"] * gauge - constant) < 1e-10
    np.testing.assert_allclose(injected.far_field.values, reference.far_field.values, atol=1e-10)


def test_inconsistent_gauge(lone_ball_far_field, lone_ball):  # NOQA
    """Test to confirm a constant far from the unit circle is reported"""
    doubled = with_values(lone_ball_far_field, 2 * lone_ball_far_field.values)
    with pytest.raises(GaugeInconsistencyError) as error:
        fix_global_phase(RecoveredField(doubled, "direct", 10.0), lone_ball, 1.2)
    assert abs(abs(error.value.constant) - 0.5) < 0.05


def test_gauge_injection_on_the_kite_scene(kite_ball_64):  # NOQA
    """Test to confirm an injected gauge exp(i pi/3) comes back as its inverse with a small boundary residual"""
    scene = builtin_scene("kite_ball")
    gauge = np.exp(1j * np.pi / 3)
    reference = fix_global_phase(RecoveredField(kite_ball_64, "direct", 10.0), scene.ball, scene.R)
    assert abs(reference.report["gauge_constant"] - 1) < 1e-6
    injected = fix_global_phase(
        RecoveredField(with_values(kite_ball_64, kite_ball_64.values * gauge), "direct", 10.0),
        scene.ball, scene.R,
    )
    assert abs(injected.report["gauge_constant"] - np.conj(gauge)) < 1e-6
    assert injected.report["boundary_residual"] < 1e-4
    np.testing.assert_allclose(injected.far_field.values, kite_ball_64.values, atol=1e-5)


@pytest.mark.parametrize(
    "ball, R, field",
    [
        (ReferenceBall((1.8, 0.8), 0.29, 2.0), 1.0, "lone_ball_far_field"),
        (ReferenceBall((1.2, 0.5), 0.3), 1.2, "lone_ball_far_field"),
        (ReferenceBall((2.2, 1.3), 0.3), 1.2, "shifted_disk_16"),
        (ReferenceBall((1.8, 1.5), 0.3), 1.2, "half_aperture_field"),
    ],
)
def test_expansion_validity(request, ball, R, field):
    """Test to confirm boundary matching refuses penetrable balls, close balls, coarse and half-aperture data"""
    F = request.getfixturevalue(field)
    with pytest.raises(ExpansionValidityError):
        fix_global_phase(RecoveredField(F, "direct", 10.0), ball, R)


def test_end_to_end_kite_recovery(kite_ball_64):  # NOQA
    """Test to confirm the kite scene is recovered with a clear branch and a fixed global phase"""
    scene = builtin_scene("kite_ball")
    rec = recover_far_field(synthesize_dataset(kite_ball_64, 0.0), scene.ball, scene.R)
    assert rec.branch_score_ratio >= 10
    assert rec.global_phase_fixed
    assert rec.report["sign_method"] == "reciprocity"
    assert rec.report["masked_entries"] == 0
    error, constant = gauge_aligned_error(rec.far_field, kite_ball_64)
    assert error < 1e-4
    assert abs(constant - 1) < 0.05


def test_conjugate_branch_points_at_the_reflected_ball(kite_ball_64):  # NOQA
    """Test to confirm swapping the prior to -b flips the selected branch"""
    scene = builtin_scene("kite_ball")
    dataset = synthesize_dataset(kite_ball_64, 0.0)
    candidates = absolute_phase(resolve_signs(relative_phase(dataset)), dataset)
    chosen = disambiguate_branch(candidates, scene.ball)
    flipped = disambiguate_branch(candidates, scene.ball.reflected())
    assert chosen.branch != flipped.branch
    assert set(chosen.report["branch_scores"]) == {"direct", "conjugate"}

