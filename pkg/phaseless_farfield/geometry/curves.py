"""
Closed parametric boundary curves p(t), t in [0, 2pi), counterclockwise,
and the periodic trapezoidal quadrature on them.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from ..utilities.exceptions import InvalidGeometryError

logger = logging.getLogger(__name__)

CURVE_KINDS = ("circle", "kite", "trig_polynomial")
VALIDATION_SAMPLES = 512


def _unit_circle(t: np.ndarray):
    """e(t), e'(t) = e_perp(t)"""
    e = np.stack([np.cos(t), np.sin(t)], axis=-1)
    e_perp = np.stack([-np.sin(t), np.cos(t)], axis=-1)
    return e, e_perp


def _radial(r, dr, ddr, t):
    """p, p', p'' of r(t) e(t)"""
    e, e_perp = _unit_circle(t)
    p = r[:, None] * e
    dp = dr[:, None] * e + r[:, None] * e_perp
    ddp = (ddr - r)[:, None] * e + 2 * dr[:, None] * e_perp
    return p, dp, ddp


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """
    Validated closed C^2 curve. Use make_curve to construct one.

    params per kind:
        circle: center, radius
        kite: center, scale, bump_amplitude, bump_mode
        trig_polynomial: center, a0, cos, sin (radial Fourier coefficients)
    """

    kind: str
    params: Dict = field(default_factory=dict)

    @property
    def center(self) -> np.ndarray:
        return np.asarray(self.params.get("center", (0.0, 0.0)), dtype=float)

    def evaluate(self, t) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Points and the first two parameter derivatives

        Args:
            t(np.ndarray): parameters in [0, 2pi)

        Returns:
            Tuple of (len(t), 2) arrays: p(t), p'(t), p''(t)
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.kind == "circle":
            radius = float(self.params["radius"])
            ones = np.full_like(t, radius)
            zeros = np.zeros_like(t)
            p, dp, ddp = _radial(ones, zeros, zeros, t)
        elif self.kind == "kite":
            scale = float(self.params.get("scale", 1.0))
            p = scale * np.stack(
                [np.cos(t) + 0.65 * np.cos(2 * t) - 0.65, 1.5 * np.sin(t)], axis=-1
            )
            dp = scale * np.stack(
                [-np.sin(t) - 1.3 * np.sin(2 * t), 1.5 * np.cos(t)], axis=-1
            )
            ddp = scale * np.stack(
                [-np.cos(t) - 2.6 * np.cos(2 * t), -1.5 * np.sin(t)], axis=-1
            )
            amplitude = float(self.params.get("bump_amplitude", 0.0))
            if amplitude:
                mode = int(self.params.get("bump_mode", 3))
                bump = _radial(
                    amplitude * np.cos(mode * t),
                    -amplitude * mode * np.sin(mode * t),
                    -amplitude * mode ** 2 * np.cos(mode * t),
                    t,
                )
                p, dp, ddp = p + bump[0], dp + bump[1], ddp + bump[2]
        elif self.kind == "trig_polynomial":
            r, dr, ddr = self.radial_function(t)
            p, dp, ddp = _radial(r, dr, ddr, t)
        else:
            raise InvalidGeometryError(f"Unknown curve kind {self.kind}")
        return p + self.center, dp, ddp

    def radial_function(self, t: np.ndarray):
        """r(t), r'(t), r''(t) of a trig_polynomial curve"""
        r = np.full_like(t, float(self.params["a0"]))
        dr = np.zeros_like(t)
        ddr = np.zeros_like(t)
        for j, a_j in enumerate(self.params.get("cos", ()), start=1):
            r += a_j * np.cos(j * t)
            dr -= j * a_j * np.sin(j * t)
            ddr -= j ** 2 * a_j * np.cos(j * t)
        for j, b_j in enumerate(self.params.get("sin", ()), start=1):
            r += b_j * np.sin(j * t)
            dr += j * b_j * np.cos(j * t)
            ddr -= j ** 2 * b_j * np.sin(j * t)
        return r, dr, ddr

    def points(self, t) -> np.ndarray:
        return self.evaluate(t)[0]

    def samples(self, count: int = VALIDATION_SAMPLES) -> np.ndarray:
        t = 2 * np.pi * np.arange(count) / count
        return self.points(t)

    def diameter(self) -> float:
        samples = self.samples(128)
        return float(np.max(cdist(samples, samples)))

    def length(self, N: int = 256) -> float:
        return float(np.sum(quadrature(self, N).weights))

    def to_dict(self) -> Dict:
        document = {"kind": self.kind}
        for key, value in self.params.items():
            document[key] = list(value) if isinstance(value, (tuple, np.ndarray)) \
                else value
        return document


def _segments_cross(points: np.ndarray) -> bool:
    """True if two non-adjacent edges of the closed polygon intersect"""
    start = points
    end = np.roll(points, -1, axis=0)
    count = len(points)

    def orientation(a, b, c):
        return np.sign(
            (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
            - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])
        )

    a, b = start[:, None, :], end[:, None, :]
    c, d = start[None, :, :], end[None, :, :]
    crossing = (orientation(a, b, c) * orientation(a, b, d) < 0) & (
        orientation(c, d, a) * orientation(c, d, b) < 0
    )
    index = np.arange(count)
    gap = np.abs(index[:, None] - index[None, :])
    gap = np.minimum(gap, count - gap)
    return bool(np.any(crossing & (gap >= 2)))


def validate_curve(curve: BoundaryCurve) -> BoundaryCurve:
    """
    Numerical regularity checks of a closed curve

    Args:
        curve(BoundaryCurve): curve to check

    Returns:
        BoundaryCurve: the same curve

    Raises:
        InvalidGeometryError: vanishing speed or self-intersection
    """
    count = VALIDATION_SAMPLES
    t = 2 * np.pi * np.arange(count) / count
    points, derivative, _ = curve.evaluate(t)
    if not np.all(np.isfinite(points)):
        raise InvalidGeometryError(f"{curve.kind} curve has non-finite points")
    diameter = float(np.max(cdist(points, points)))
    if diameter <= 0:
        raise InvalidGeometryError(f"{curve.kind} curve is degenerate")
    speed = np.linalg.norm(derivative, axis=1)
    if np.min(speed) <= 1e-10 * diameter:
        raise InvalidGeometryError(
            f"{curve.kind} curve has a vanishing tangent, min |p'| = {np.min(speed):.3e}"
        )
    distances = cdist(points, points)
    index = np.arange(count)
    gap = np.abs(index[:, None] - index[None, :])
    gap = np.minimum(gap, count - gap)
    min_distance = np.min(distances[gap >= 2])
    if min_distance <= 1e-6 * diameter or _segments_cross(points):
        raise InvalidGeometryError(
            f"{curve.kind} curve with parameters {curve.params} intersects itself"
        )
    return curve


def make_curve(kind: str, params: Dict = None) -> BoundaryCurve:
    """
    Builds and validates a boundary curve

    Args:
        kind(str): one of circle, kite, trig_polynomial
        params(Dict): shape parameters of that kind

    Returns:
        BoundaryCurve: the validated curve
    """
    params = dict(params or {})
    if kind not in CURVE_KINDS:
        raise InvalidGeometryError(
            f"Unknown curve kind {kind}, choose one of {CURVE_KINDS}"
        )
    params["center"] = tuple(float(c) for c in params.get("center", (0.0, 0.0)))
    if kind == "circle":
        if float(params.get("radius", 0.0)) <= 0:
            raise InvalidGeometryError("Circle radius must be positive")
    elif kind == "kite":
        if float(params.get("scale", 1.0)) <= 0:
            raise InvalidGeometryError("Kite scale must be positive")
    else:
        params["cos"] = tuple(float(c) for c in params.get("cos", ()))
        params["sin"] = tuple(float(c) for c in params.get("sin", ()))
        curve = BoundaryCurve(kind, params)
        t = 2 * np.pi * np.arange(VALIDATION_SAMPLES) / VALIDATION_SAMPLES
        if np.min(curve.radial_function(t)[0]) <= 0:
            raise InvalidGeometryError(
                "trig_polynomial radial function must stay positive, "
                "the curve passes through its center and crosses itself"
            )
    return validate_curve(BoundaryCurve(kind, params))


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Equispaced nodes t_j with trapezoidal weights |p'(t_j)| 2pi/N"""

    parameters: np.ndarray
    nodes: np.ndarray
    derivatives: np.ndarray
    second_derivatives: np.ndarray
    speed: np.ndarray
    weights: np.ndarray
    normals: np.ndarray

    @property
    def N(self) -> int:
        return len(self.parameters)


def quadrature(curve, N: int, offset: float = 0.0) -> QuadratureRule:
    """
    Periodic trapezoidal rule on a parametrized curve

    Args:
        curve: anything with evaluate(t) -> (p, p', p''), counterclockwise
        N(int): even node count, at least 16
        offset(float): shift of the nodes in units of the step, open arcs \
            use 0.5 to keep the endpoints off the grid

    Returns:
        QuadratureRule: nodes, weights and outward normals
    """
    if int(N) != N or N < 16 or N % 2:
        raise ValueError(f"Quadrature needs an even node count >= 16, got {N}")
    t = 2 * np.pi * (np.arange(N) + offset) / N
    nodes, derivatives, second_derivatives = curve.evaluate(t)
    speed = np.hypot(derivatives[:, 0], derivatives[:, 1])
    normals = np.stack([derivatives[:, 1], -derivatives[:, 0]], axis=-1) / speed[:, None]
    return QuadratureRule(
        parameters=t,
        nodes=nodes,
        derivatives=derivatives,
        second_derivatives=second_derivatives,
        speed=speed,
        weights=speed * 2 * np.pi / N,
        normals=normals,
    )
