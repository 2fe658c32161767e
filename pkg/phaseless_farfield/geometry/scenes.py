"""Built-in golden scenes used by the validation suites and the tests"""
from typing import Callable, Dict

from .curves import make_curve
from .scene import (
    MediumInclusion,
    MediumSpec,
    ObstacleComponent,
    ReferenceBall,
    Scene,
)
from .surface import SurfaceProfile

OBSTACLE_BALL = ReferenceBall((2.2, 1.3), 0.3)
MEDIUM_BALL = ReferenceBall((1.8, 0.8), 0.29, index=2.0)
SURFACE_BALL = ReferenceBall((1.8, 1.5), 0.3)

#: wave numbers at which the golden scenes are admissible and resolved
GOLDEN_WAVENUMBERS = {"obstacle": 5.0, "medium": 2.0, "rough_surface": 5.0}


def _kite(bump_amplitude: float = 0.0):
    return make_curve(
        "kite",
        {"center": (0.0, 0.0), "scale": 0.5, "bump_amplitude": bump_amplitude,
         "bump_mode": 3},
    )


def disk() -> Scene:
    """Sound-soft unit disk at the origin, no reference ball"""
    return Scene(
        "obstacle", 1.2,
        obstacles=(ObstacleComponent(make_curve("circle", {"radius": 1.0})),),
        name="disk",
    )


def ball_only() -> Scene:
    return Scene("obstacle", 1.2, ball=OBSTACLE_BALL, name="ball_only")


def kite_ball() -> Scene:
    return Scene(
        "obstacle", 1.2, ball=OBSTACLE_BALL,
        obstacles=(ObstacleComponent(_kite()),), name="kite_ball",
    )


def circle_ball() -> Scene:
    return Scene(
        "obstacle", 1.2, ball=OBSTACLE_BALL,
        obstacles=(ObstacleComponent(make_curve("circle", {"radius": 0.6})),),
        name="circle_ball",
    )


def kite_bump_ball() -> Scene:
    """kite_ball with the kite perturbed by a 1e-3 bump"""
    return Scene(
        "obstacle", 1.2, ball=OBSTACLE_BALL,
        obstacles=(ObstacleComponent(_kite(1e-3)),), name="kite_bump_ball",
    )


def impedance_kite_ball() -> Scene:
    return Scene(
        "obstacle", 1.2, ball=OBSTACLE_BALL,
        obstacles=(ObstacleComponent(_kite(), "impedance", (2.0 + 0.0j,)),),
        name="impedance_kite_ball",
    )


def medium_disk_ball() -> Scene:
    medium = MediumSpec((MediumInclusion("disk", (0.0, 0.0), (0.6,), 1.5 + 0.0j),))
    return Scene("medium", 1.0, ball=MEDIUM_BALL, medium=medium,
                 name="medium_disk_ball")


def medium_square_ball() -> Scene:
    medium = MediumSpec(
        (MediumInclusion("box", (0.0, 0.0), (0.4, 0.3), 1.5 + 0.0j),)
    )
    return Scene("medium", 1.0, ball=MEDIUM_BALL, medium=medium,
                 name="medium_square_ball")


def bump_ball() -> Scene:
    surface = SurfaceProfile(
        "bump", {"bumps": [{"amplitude": 0.3, "center": 0.0, "width": 1.0}]}
    )
    return Scene("rough_surface", 1.2, ball=SURFACE_BALL, surface=surface,
                 name="bump_ball")


def double_bump_ball() -> Scene:
    surface = SurfaceProfile(
        "bump",
        {"bumps": [
            {"amplitude": 0.2, "center": -0.4, "width": 0.5},
            {"amplitude": 0.15, "center": 0.5, "width": 0.4},
        ]},
    )
    return Scene("rough_surface", 1.2, ball=SURFACE_BALL, surface=surface,
                 name="double_bump_ball")


def flat_ball() -> Scene:
    return Scene("rough_surface", 1.2, ball=SURFACE_BALL, surface=SurfaceProfile(),
                 name="flat_ball")


BUILTIN_SCENES: Dict[str, Callable[[], Scene]] = {
    "disk": disk,
    "ball_only": ball_only,
    "kite_ball": kite_ball,
    "circle_ball": circle_ball,
    "kite_bump_ball": kite_bump_ball,
    "impedance_kite_ball": impedance_kite_ball,
    "medium_disk_ball": medium_disk_ball,
    "medium_square_ball": medium_square_ball,
    "bump_ball": bump_ball,
    "double_bump_ball": double_bump_ball,
    "flat_ball": flat_ball,
}


def builtin_scene(name: str) -> Scene:
    try:
        return BUILTIN_SCENES[name]()
    except KeyError:
        raise KeyError(
            f"Unknown built-in scene {name}, choose one of {sorted(BUILTIN_SCENES)}"
        )
