"""
Scenes: the unknown scatterer inside the disk B_R plus the known reference
ball, for the obstacle, medium and locally rough surface variants.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from matplotlib.path import Path
from scipy.signal import resample
from scipy.spatial.distance import cdist

from ..special_functions.specfun import J0_FIRST_ZERO, as_wavenumber
from ..utilities.exceptions import InvalidGeometryError
from .curves import BoundaryCurve, make_curve
from .surface import SurfaceProfile

logger = logging.getLogger(__name__)

SCENE_VARIANTS = ("obstacle", "medium", "rough_surface")
BOUNDARY_CONDITIONS = ("dirichlet", "impedance")


@dataclass(frozen=True)
class ReferenceBall:
    """Known sound-soft ball, or homogeneous ball of index n0 in medium scenes"""

    center: Tuple[float, float]
    radius: float
    index: Optional[float] = None

    def __post_init__(self):
        if self.radius <= 0:
            raise InvalidGeometryError("Reference ball radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def curve(self) -> BoundaryCurve:
        return make_curve("circle", {"center": self.center, "radius": self.radius})

    def reflected(self) -> "ReferenceBall":
        """Image under x -> -x"""
        return ReferenceBall((-self.center[0], -self.center[1]), self.radius, self.index)

    def mirrored(self) -> "ReferenceBall":
        """Image under the vertical flip (x1, x2) -> (x1, -x2)"""
        return ReferenceBall((self.center[0], -self.center[1]), self.radius, self.index)

    def contains(self, points: np.ndarray) -> np.ndarray:
        return np.hypot(
            points[..., 0] - self.center[0], points[..., 1] - self.center[1]
        ) < self.radius

    def overlaps(self, other: "ReferenceBall") -> bool:
        """True if the closures intersect"""
        distance = math.hypot(
            self.center[0] - other.center[0], self.center[1] - other.center[1]
        )
        return distance <= self.radius + other.radius


@dataclass(frozen=True, eq=False)
class ObstacleComponent:
    """
    One bounded obstacle. impedance holds samples of eta on an equispaced
    parameter grid (a single sample means a constant eta).
    """

    curve: BoundaryCurve
    boundary_condition: str = "dirichlet"
    impedance: Optional[Tuple[complex, ...]] = None

    def __post_init__(self):
        if self.boundary_condition not in BOUNDARY_CONDITIONS:
            raise InvalidGeometryError(
                f"Unknown boundary condition {self.boundary_condition}"
            )
        if self.boundary_condition == "impedance" and not self.impedance:
            raise InvalidGeometryError("Impedance components need eta samples")

    def impedance_at(self, N: int) -> np.ndarray:
        """eta on N equispaced parameters, trigonometric interpolation"""
        samples = np.asarray(self.impedance, dtype=complex)
        if len(samples) == 1:
            return np.full(N, samples[0])
        if len(samples) == N:
            return samples
        return resample(samples, N)


@dataclass(frozen=True)
class MediumInclusion:
    """Disk (size = radius) or box (size = half widths) of constant index"""

    kind: str
    center: Tuple[float, float]
    size: Tuple[float, ...]
    index: complex

    def contains(self, points: np.ndarray) -> np.ndarray:
        offset = points - np.asarray(self.center)
        if self.kind == "disk":
            return np.hypot(offset[..., 0], offset[..., 1]) < self.size[0]
        if self.kind == "box":
            return (np.abs(offset[..., 0]) < self.size[0]) & (
                np.abs(offset[..., 1]) < self.size[1]
            )
        raise InvalidGeometryError(f"Unknown inclusion kind {self.kind}")

    def extent(self) -> float:
        """Largest distance from the origin covered by the inclusion"""
        if self.kind == "disk":
            return math.hypot(*self.center) + self.size[0]
        return math.hypot(abs(self.center[0]) + self.size[0],
                          abs(self.center[1]) + self.size[1])


@dataclass(frozen=True, eq=False)
class MediumRaster:
    """Per-cell refractive index on a box with lower-left corner origin"""

    origin: Tuple[float, float]
    h: float
    index: np.ndarray

    def values_at(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Index at points by cell lookup, plus the mask of covered points"""
        rows, columns = self.index.shape
        column = np.floor((points[..., 0] - self.origin[0]) / self.h).astype(int)
        row = np.floor((points[..., 1] - self.origin[1]) / self.h).astype(int)
        covered = (column >= 0) & (column < columns) & (row >= 0) & (row < rows)
        values = np.ones(points.shape[:-1], dtype=complex)
        values[covered] = self.index[row[covered], column[covered]]
        return values, covered

    def corners(self) -> np.ndarray:
        rows, columns = self.index.shape
        x0, y0 = self.origin
        x1, y1 = x0 + columns * self.h, y0 + rows * self.h
        return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])


@dataclass(frozen=True, eq=False)
class MediumSpec:
    inclusions: Tuple[MediumInclusion, ...] = ()
    raster: Optional[MediumRaster] = None

    def index_at(self, points: np.ndarray) -> np.ndarray:
        """Refractive index of the unknown medium, 1 outside of it"""
        if self.raster is not None:
            values, _ = self.raster.values_at(points)
        else:
            values = np.ones(points.shape[:-1], dtype=complex)
        for inclusion in self.inclusions:
            values = np.where(inclusion.contains(points), inclusion.index, values)
        return values

    def all_indices(self) -> np.ndarray:
        values = [complex(i.index) for i in self.inclusions]
        if self.raster is not None:
            values.extend(np.asarray(self.raster.index).ravel().tolist())
        return np.asarray(values, dtype=complex)

    def extent(self) -> float:
        extents = [i.extent() for i in self.inclusions]
        if self.raster is not None:
            extents.append(float(np.max(np.hypot(*self.raster.corners().T))))
        return max(extents, default=0.0)


@dataclass(frozen=True, eq=False)
class Scene:
    """
    Scatterer configuration. The unknown content lives in the disk B_R
    centered at the origin, ball is the known reference ball.
    """

    variant: str
    R: float
    ball: Optional[ReferenceBall] = None
    obstacles: Tuple[ObstacleComponent, ...] = ()
    medium: Optional[MediumSpec] = None
    surface: Optional[SurfaceProfile] = None
    name: str = ""

    def __post_init__(self):
        if self.variant not in SCENE_VARIANTS:
            raise InvalidGeometryError(
                f"Unknown scene variant {self.variant}, choose one of {SCENE_VARIANTS}"
            )
        if self.R <= 0:
            raise InvalidGeometryError("Enclosing radius R must be positive")
        object.__setattr__(self, "obstacles", tuple(self.obstacles))

    def components(self) -> List[ObstacleComponent]:
        """Obstacle components followed by the ball as a Dirichlet component"""
        components = list(self.obstacles)
        if self.ball is not None:
            components.append(ObstacleComponent(self.ball.curve()))
        return components

    def translated(self, shift: Sequence[float]) -> "Scene":
        """Obstacle scene with every component shifted by `shift`"""
        if self.variant != "obstacle":
            raise InvalidGeometryError("Only obstacle scenes can be translated")

        def moved(curve: BoundaryCurve) -> BoundaryCurve:
            params = dict(curve.params)
            params["center"] = (curve.center[0] + shift[0], curve.center[1] + shift[1])
            return make_curve(curve.kind, params)

        obstacles = tuple(
            ObstacleComponent(moved(c.curve), c.boundary_condition, c.impedance)
            for c in self.obstacles
        )
        ball = None
        if self.ball is not None:
            ball = ReferenceBall(
                (self.ball.center[0] + shift[0], self.ball.center[1] + shift[1]),
                self.ball.radius, self.ball.index,
            )
        radius = self.R + math.hypot(*shift)
        return Scene("obstacle", radius, ball, obstacles, name=f"{self.name}+shift")


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    severity: str = "error"


@dataclass
class ValidationReport:
    """Every violated scene invariant; empty means admissible"""

    violations: List[Violation] = field(default_factory=list)

    def add(self, code: str, message: str, severity: str = "error"):
        logger.debug(f"Scene violation {code}: {message}")
        self.violations.append(Violation(code, message, severity))

    @property
    def errors(self) -> List[Violation]:
        return [v for v in self.violations if v.severity == "error"]

    @property
    def warnings(self) -> List[Violation]:
        return [v for v in self.violations if v.severity == "warning"]

    @property
    def codes(self) -> List[str]:
        return [v.code for v in self.violations]

    def is_empty(self) -> bool:
        return not self.violations

    def raise_for_errors(self):
        """Hard checks, used as the precondition of every solver"""
        if self.errors:
            details = "; ".join(v.message for v in self.errors)
            raise InvalidGeometryError(f"Inadmissible scene: {details}")
        for warning in self.warnings:
            logger.warning(warning.message)


def transmission_radius_bound(k: float, n0: float) -> float:
    """pi / (2k (sqrt(n0) + 1))"""
    return math.pi / (2 * k * (math.sqrt(n0) + 1))


def _check_ball_against_disk(scene: Scene, report: ValidationReport):
    ball = scene.ball
    if math.hypot(*ball.center) <= scene.R + ball.radius:
        report.add(
            "ball_overlaps_enclosing_disk",
            f"Reference ball at {ball.center} with radius {ball.radius} meets "
            f"the closed disk of radius {scene.R}",
        )


def _check_obstacles(scene: Scene, report: ValidationReport):
    samples = []
    for position, component in enumerate(scene.obstacles):
        points = component.curve.samples()
        samples.append(points)
        if np.max(np.hypot(points[:, 0], points[:, 1])) >= scene.R:
            report.add(
                "component_outside_enclosing_disk",
                f"Obstacle component {position} leaves the disk of radius {scene.R}",
            )
        if component.boundary_condition == "impedance":
            if np.any(np.imag(np.asarray(component.impedance, dtype=complex)) < 0):
                report.add(
                    "impedance_sign",
                    f"Obstacle component {position} has Im(eta) < 0",
                )
    if scene.ball is not None:
        samples.append(scene.ball.curve().samples())
    for first in range(len(samples)):
        for second in range(first + 1, len(samples)):
            touching = np.min(cdist(samples[first], samples[second])) <= 1e-9
            nested = np.any(Path(samples[first]).contains_points(samples[second])) or \
                np.any(Path(samples[second]).contains_points(samples[first]))
            if touching or nested:
                report.add(
                    "components_overlap",
                    f"Scene components {first} and {second} overlap",
                )


def _check_medium(scene: Scene, k: float, report: ValidationReport):
    medium = scene.medium or MediumSpec()
    indices = medium.all_indices()
    if np.any(indices.real <= 0) or np.any(indices.imag < 0):
        report.add("index_sign", "Refractive index needs Re n > 0 and Im n >= 0")
    if medium.extent() >= scene.R:
        report.add(
            "medium_outside_enclosing_disk",
            f"Medium support leaves the disk of radius {scene.R}",
        )
    ball = scene.ball
    if ball is None:
        return
    if ball.index is None or ball.index <= 0 or ball.index == 1:
        report.add(
            "ball_index",
            f"Ball index n0 must be positive and different from 1, got {ball.index}",
        )
        return
    bound = transmission_radius_bound(k, ball.index)
    if ball.radius >= bound:
        report.add(
            "transmission_radius",
            f"Ball radius {ball.radius} is not below pi/(2k(sqrt(n0)+1)) = {bound:.6f}, "
            f"k^2 may be an interior transmission eigenvalue of the ball",
            severity="warning",
        )


def _check_rough_surface(scene: Scene, report: ValidationReport):
    profile = scene.surface or SurfaceProfile()
    lo, hi = profile.support()
    if not profile.is_flat:
        if lo <= -scene.R or hi >= scene.R:
            report.add(
                "support_outside_enclosing_disk",
                f"Profile support [{lo}, {hi}] is not inside (-{scene.R}, {scene.R})",
            )
        heights = profile.height(np.linspace(lo, hi, 1025))
        if np.min(heights) < 0:
            report.add(
                "profile_below_line",
                "Surface profile dips below the flat line, the half-plane "
                "kernel needs h >= 0",
            )
    ball = scene.ball
    if ball is None:
        return
    x1 = np.linspace(ball.center[0] - ball.radius, ball.center[0] + ball.radius, 257)
    if ball.center[1] - ball.radius <= np.max(profile.height(x1)):
        report.add("ball_below_surface", "Reference ball does not lie above the surface")
    if abs(ball.center[0]) <= ball.radius:
        report.add(
            "ball_meets_axis",
            "Reference ball meets the vertical axis {x1 = 0}",
        )
    images = {
        "B": ball,
        "B'": ball.mirrored(),
        "B~": ball.reflected(),
        "B~'": ball.reflected().mirrored(),
    }
    names = list(images)
    for first in range(len(names)):
        for second in range(first + 1, len(names)):
            if images[names[first]].overlaps(images[names[second]]):
                report.add(
                    "image_balls_overlap",
                    f"Balls {names[first]} and {names[second]} are not disjoint",
                )


def validate_scene(scene: Scene, k) -> ValidationReport:
    """
    Checks every scene invariant at wave number k

    Args:
        scene(Scene): the scene
        k(float/Wavenumber): wave number

    Returns:
        ValidationReport: violated invariants, empty if admissible
    """
    k = as_wavenumber(k)
    report = ValidationReport()
    ball = scene.ball
    if ball is None:
        report.add("missing_ball", "Scene has no reference ball", severity="warning")
    else:
        _check_ball_against_disk(scene, report)
        if scene.variant in ("obstacle", "rough_surface") and k * ball.radius >= J0_FIRST_ZERO:
            report.add(
                "eigenvalue_risk",
                f"k*rho = {k * ball.radius:.4f} is not below the first zero of J_0 "
                f"({J0_FIRST_ZERO:.4f}), k^2 may be a Dirichlet eigenvalue of the ball",
                severity="warning",
            )
    if scene.variant == "obstacle":
        _check_obstacles(scene, report)
    elif scene.variant == "medium":
        _check_medium(scene, k, report)
    else:
        _check_rough_surface(scene, report)
    return report
