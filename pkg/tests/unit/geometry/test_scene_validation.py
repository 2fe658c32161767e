import math

import pytest
from phaseless_farfield.geometry.curves import make_curve
from phaseless_farfield.geometry.scene import (
    MediumInclusion,
    MediumSpec,
    ObstacleComponent,
    ReferenceBall,
    Scene,
    transmission_radius_bound,
    validate_scene,
)
from phaseless_farfield.geometry.scenes import (
    BUILTIN_SCENES,
    GOLDEN_WAVENUMBERS,
    builtin_scene,
)
from phaseless_farfield.geometry.surface import SurfaceProfile
from phaseless_farfield.utilities.exceptions import InvalidGeometryError
from tests.unit.geometry.sample_data import kite_ball_scene  # NOQA

KITE = make_curve("kite", {"scale": 0.5})
BUMP = {"bumps": [{"amplitude": 0.3, "center": 0.0, "width": 1.0}]}


@pytest.mark.parametrize("name", ["kite_ball", "circle_ball", "impedance_kite_ball",
                                  "medium_disk_ball", "bump_ball", "double_bump_ball",
                                  "flat_ball"])
def test_golden_scenes_are_admissible(name):
    """Test to confirm the golden scenes validate cleanly at their wave numbers"""
    scene = builtin_scene(name)
    report = validate_scene(scene, GOLDEN_WAVENUMBERS[scene.variant])
    assert report.codes == []
    report.raise_for_errors()


@pytest.mark.parametrize(
    "scene, k, code, severity",
    [
        (Scene("obstacle", 1.2, ReferenceBall((1.0, 0.9), 0.3), (ObstacleComponent(KITE),)),
         5.0, "ball_overlaps_enclosing_disk", "error"),
        (Scene("obstacle", 1.2, ReferenceBall((2.2, 1.3), 0.3), (ObstacleComponent(KITE),)),
         9.0, "eigenvalue_risk", "warning"),
        (Scene("obstacle", 0.6, ReferenceBall((2.2, 1.3), 0.3), (ObstacleComponent(KITE),)),
         5.0, "component_outside_enclosing_disk", "error"),
        (Scene("obstacle", 1.2, ReferenceBall((2.2, 1.3), 0.3),
               (ObstacleComponent(KITE, "impedance", (1.0 - 1.0j,)),)),
         5.0, "impedance_sign", "error"),
        (Scene("obstacle", 1.2, ReferenceBall((2.2, 1.3), 0.3),
               (ObstacleComponent(KITE),
                ObstacleComponent(make_curve("circle", {"radius": 0.1})))),
         5.0, "components_overlap", "error"),
        (Scene("obstacle", 1.2, obstacles=(ObstacleComponent(KITE),)),
         5.0, "missing_ball", "warning"),
        (Scene("medium", 1.0, ReferenceBall((1.8, 0.8), 0.29, 2.0),
               medium=MediumSpec((MediumInclusion("disk", (0.0, 0.0), (0.6,), -1.0),))),
         2.0, "index_sign", "error"),
        (Scene("medium", 1.0, ReferenceBall((1.8, 0.8), 0.29, 1.0),
               medium=MediumSpec((MediumInclusion("disk", (0.0, 0.0), (0.6,), 1.5),))),
         2.0, "ball_index", "error"),
        (Scene("medium", 1.0, ReferenceBall((1.8, 0.8), 0.29, 2.0),
               medium=MediumSpec((MediumInclusion("disk", (0.0, 0.0), (0.6,), 1.5),))),
         3.0, "transmission_radius", "warning"),
        (Scene("medium", 1.0, ReferenceBall((1.8, 0.8), 0.29, 2.0),
               medium=MediumSpec((MediumInclusion("box", (0.5, 0.0), (0.6, 0.3), 1.5),))),
         2.0, "medium_outside_enclosing_disk", "error"),
        (Scene("rough_surface", 1.2, ReferenceBall((0.2, 1.5), 0.3),
               surface=SurfaceProfile("bump", BUMP)),
         5.0, "ball_meets_axis", "error"),
        (Scene("rough_surface", 1.2, ReferenceBall((0.2, 1.5), 0.3),
               surface=SurfaceProfile("bump", BUMP)),
         5.0, "image_balls_overlap", "error"),
        (Scene("rough_surface", 1.2, ReferenceBall((1.8, 1.5), 0.3),
               surface=SurfaceProfile(
                   "bump", {"bumps": [{"amplitude": -0.2, "center": 0.0, "width": 0.5}]})),
         5.0, "profile_below_line", "error"),
        (Scene("rough_surface", 0.8, ReferenceBall((1.8, 1.5), 0.3),
               surface=SurfaceProfile("bump", BUMP)),
         5.0, "support_outside_enclosing_disk", "error"),
    ],
)
def test_violations_are_reported(scene, k, code, severity):
    """Test to confirm each violated invariant is reported with its severity"""
    report = validate_scene(scene, k)
    matching = [v for v in report.violations if v.code == code]
    assert matching
    assert all(v.severity == severity for v in matching)
    if severity == "error":
        with pytest.raises(InvalidGeometryError):
            report.raise_for_errors()
    elif not report.errors:
        report.raise_for_errors()


def test_every_violation_is_collected():
    """Test to confirm validation reports all violations, not only the first"""
    scene = Scene(
        "obstacle", 0.6, ReferenceBall((0.6, 0.5), 0.3),
        (ObstacleComponent(KITE, "impedance", (-1.0j,)),),
    )
    codes = validate_scene(scene, 5.0).codes
    for code in ("ball_overlaps_enclosing_disk", "component_outside_enclosing_disk",
                 "impedance_sign"):
        assert code in codes


def test_transmission_radius_bound():
    """Test to confirm the bound pi / (2k (sqrt(n0) + 1))"""
    assert abs(transmission_radius_bound(2.0, 4.0) - math.pi / 12) < 1e-15


def test_ball_images():
    """Test to confirm the reflected and mirrored balls"""
    ball = ReferenceBall((1.8, 1.5), 0.3)
    assert ball.reflected().center == (-1.8, -1.5)
    assert ball.mirrored().center == (1.8, -1.5)
    assert not ball.overlaps(ball.mirrored())
    assert ball.overlaps(ReferenceBall((2.3, 1.5), 0.2))


@pytest.mark.parametrize(
    "factory, exception",
    [
        (lambda: ReferenceBall((2.0, 0.0), 0.0), InvalidGeometryError),
        (lambda: Scene("waveguide", 1.0), InvalidGeometryError),
        (lambda: Scene("obstacle", -1.0), InvalidGeometryError),
        (lambda: ObstacleComponent(KITE, "neumann"), InvalidGeometryError),
        (lambda: ObstacleComponent(KITE, "impedance"), InvalidGeometryError),
        (lambda: builtin_scene("no_such_scene"), KeyError),
    ],
)
def test_construction_errors(factory, exception):
    """Test to confirm malformed scene parts are rejected on construction"""
    with pytest.raises(exception):
        factory()


def test_translated_scene(kite_ball_scene):  # NOQA
    """Test to confirm translation moves every component and grows R"""
    moved = kite_ball_scene.translated((0.3, -0.4))
    assert moved.ball.center == pytest.approx((2.5, 0.9))
    assert tuple(moved.obstacles[0].curve.center) == pytest.approx((0.3, -0.4))
    assert moved.R == pytest.approx(1.7)


def test_builtin_registry_builds_every_scene():
    """Test to confirm every registered scene factory builds a named scene"""
    for name in BUILTIN_SCENES:
        assert builtin_scene(name).name == name
