"""
Locally rough surface profiles x2 = h(x1) with compact support, and the
truncated arc of the surface that carries the boundary density.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
from scipy.interpolate import make_interp_spline

from ..utilities.exceptions import InvalidGeometryError

logger = logging.getLogger(__name__)

PROFILE_KINDS = ("flat", "bump", "spline")
FLAT_TOLERANCE = 1e-12


def _bump(x, amplitude, center, width):
    """a exp(1/(s^2 - 1)) on |s| < 1 with its first two derivatives"""
    s = (x - center) / width
    inside = np.abs(s) < 1
    h = np.zeros_like(x)
    dh = np.zeros_like(x)
    ddh = np.zeros_like(x)
    if not np.any(inside):
        return h, dh, ddh
    s_in = s[inside]
    q = s_in ** 2 - 1
    g = 1.0 / q
    dg = -2 * s_in / q ** 2 / width
    ddg = (-2 / q ** 2 + 8 * s_in ** 2 / q ** 3) / width ** 2
    value = amplitude * np.exp(g)
    h[inside] = value
    dh[inside] = value * dg
    ddh[inside] = value * (dg ** 2 + ddg)
    return h, dh, ddh


@dataclass(frozen=True, eq=False)
class SurfaceProfile:
    """
    Compactly supported C^2 profile.

    params per kind:
        flat: none
        bump: bumps, a list of {amplitude, center, width}, summed
        spline: knots, values; quintic interpolant whose value, slope and \
            curvature vanish at the first and last knot
    """

    kind: str = "flat"
    params: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise InvalidGeometryError(
                f"Unknown profile kind {self.kind}, choose one of {PROFILE_KINDS}"
            )
        if self.kind == "bump":
            for bump in self.params.get("bumps", ()):
                if float(bump["width"]) <= 0:
                    raise InvalidGeometryError("Bump width must be positive")
        if self.kind == "spline":
            knots = np.asarray(self.params["knots"], dtype=float)
            values = np.asarray(self.params["values"], dtype=float)
            if len(knots) != len(values) or len(knots) < 3:
                raise InvalidGeometryError(
                    "Spline profile needs matching knots and values (at least 3)"
                )
            if np.any(np.diff(knots) <= 0):
                raise InvalidGeometryError("Spline knots must be strictly increasing")
            if values[0] != 0 or values[-1] != 0:
                raise InvalidGeometryError(
                    "Spline profile must vanish at its end knots"
                )
            zero_derivatives = [(1, 0.0), (2, 0.0)]
            spline = make_interp_spline(
                knots, values, k=5, bc_type=(zero_derivatives, zero_derivatives)
            )
            object.__setattr__(self, "_spline", spline)

    def evaluate(self, x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """h(x), h'(x), h''(x)"""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        h = np.zeros_like(x)
        dh = np.zeros_like(x)
        ddh = np.zeros_like(x)
        if self.kind == "bump":
            for bump in self.params.get("bumps", ()):
                values = _bump(
                    x, float(bump["amplitude"]), float(bump["center"]),
                    float(bump["width"]),
                )
                h, dh, ddh = h + values[0], dh + values[1], ddh + values[2]
        elif self.kind == "spline":
            lo, hi = self.support()
            inside = (x > lo) & (x < hi)
            spline = self._spline
            h[inside] = spline(x[inside])
            dh[inside] = spline(x[inside], 1)
            ddh[inside] = spline(x[inside], 2)
        return h, dh, ddh

    def height(self, x) -> np.ndarray:
        return self.evaluate(x)[0]

    def support(self) -> Tuple[float, float]:
        """Closed interval outside of which h vanishes, (0, 0) if flat"""
        if self.kind == "bump":
            bumps = self.params.get("bumps", ())
            if not bumps:
                return 0.0, 0.0
            return (
                min(float(b["center"]) - float(b["width"]) for b in bumps),
                max(float(b["center"]) + float(b["width"]) for b in bumps),
            )
        if self.kind == "spline":
            knots = self.params["knots"]
            return float(knots[0]), float(knots[-1])
        return 0.0, 0.0

    @property
    def is_flat(self) -> bool:
        lo, hi = self.support()
        return self.kind == "flat" or hi <= lo

    def to_dict(self) -> Dict:
        document = {"kind": self.kind}
        document.update(self.params)
        return document


@dataclass(frozen=True, eq=False)
class SurfaceArc:
    """
    Truncated surface Gamma_c over [x_lo, x_hi], traversed from right to left
    so that (x2', -x1') points into the upper half-plane. The abscissa is
    cosine-graded, x1(t) = mid + half cos(t/2), t in [0, 2pi], which
    clusters nodes toward the endpoints.
    """

    profile: SurfaceProfile
    x_lo: float
    x_hi: float

    def evaluate(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        mid = 0.5 * (self.x_lo + self.x_hi)
        half = 0.5 * (self.x_hi - self.x_lo)
        x1 = mid + half * np.cos(t / 2)
        dx1 = -0.5 * half * np.sin(t / 2)
        ddx1 = -0.25 * half * np.cos(t / 2)
        h, dh, ddh = self.profile.evaluate(x1)
        points = np.stack([x1, h], axis=-1)
        derivative = np.stack([dx1, dh * dx1], axis=-1)
        second = np.stack([ddx1, ddh * dx1 ** 2 + dh * ddx1], axis=-1)
        return points, derivative, second


def truncated_arc(profile: SurfaceProfile, margin: float) -> SurfaceArc:
    """
    Perturbed part of the surface plus a flat margin on each side

    Args:
        profile(SurfaceProfile): the surface
        margin(float): flat margin, one wavelength by default in the solver

    Returns:
        SurfaceArc: the compact curve carrying unknowns
    """
    if profile.is_flat:
        raise InvalidGeometryError("A flat surface has no perturbed part")
    lo, hi = profile.support()
    return SurfaceArc(profile, lo - margin, hi + margin)
