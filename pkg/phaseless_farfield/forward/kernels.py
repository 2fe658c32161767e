"""
Nystrom discretization of boundary integral equations on smooth
parametrized curves, following the Kress quadrature for kernels with a
logarithmic singularity

    K(t, tau) = K1(t, tau) ln(4 sin^2((t - tau)/2)) + K2(t, tau)

The density psi(t) = phi(x(t)) of every component lives on its quadrature
nodes. Dirichlet components carry the combined potential
u^s = (D - i eta S) phi with eta = k; impedance components carry the
single-layer potential u^s = S phi. The kernels use the conventions

    L(x, y)  = (ik/2) [nu(y)|y'| . (y - x)] H_1(kr) / r        (-2 dPhi/dnu(y) |y'|)
    M(x, y)  = (i/2) H_0(kr) |y'|                              (2 Phi |y'|)
    L'(x, y) = -(ik/2) [nu(x) . (x - y)] H_1(kr) / r |y'|      (2 dPhi/dnu(x) |y'|)
    T(x, y)  = 2 d^2 Phi / dnu(x) dnu(y) |y'|

With half_plane=True every kernel is replaced by its Dirichlet half-plane
version G(x, y) = Phi(x, y) - Phi(x, y'), y' the vertical flip of y.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy import linalg, special
from scipy.signal import resample

from ..geometry.curves import QuadratureRule
from ..special_functions.specfun import EULER_GAMMA, far_field_constant
from ..utilities.exceptions import ConditioningError, SingularityError
from ..utilities.general_utilities import map_in_threads, split_in_chunks

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
FLAT_TOLERANCE = 1e-12
MIRROR = np.array([1.0, -1.0])


def log_weights(target_t: np.ndarray, source_t: np.ndarray) -> np.ndarray:
    """
    Quadrature weights R_j(t) for the integral of
    ln(4 sin^2((t - tau)/2)) f(tau) over [0, 2pi] on the equispaced sources

    Args:
        target_t(np.ndarray): target parameters
        source_t(np.ndarray): N equispaced source parameters

    Returns:
        np.ndarray: (len(target_t), N) weights
    """
    N = len(source_t)
    n = N // 2
    m = np.arange(1, n)
    difference = target_t[:, None] - source_t[None, :]
    series = np.zeros(difference.shape)
    for order in m:
        series += np.cos(order * difference) / order
    return -2 * np.pi / n * series - np.pi / n ** 2 * np.cos(n * difference)


def circulant_log_weights(N: int) -> np.ndarray:
    """log_weights with targets on the nodes, R[i, j] = R(t_i - t_j)"""
    n = N // 2
    difference = 2 * np.pi * np.arange(N) / N
    m = np.arange(1, n)
    first_column = -2 * np.pi / n * np.sum(
        np.cos(np.outer(difference, m)) / m, axis=1
    ) - np.pi / n ** 2 * np.cos(n * difference)
    return linalg.circulant(first_column)


def _pair_distance(targets: np.ndarray, sources: np.ndarray):
    difference = targets[:, None, :] - sources[None, :, :]
    distance = np.hypot(difference[..., 0], difference[..., 1])
    return difference, distance


def _guarded(distance: np.ndarray, allowed: Optional[np.ndarray] = None):
    """Replaces coincident pairs by 1 where `allowed`, fails elsewhere"""
    coincident = distance < 1e-14
    if allowed is not None:
        if np.any(coincident & ~allowed):
            raise SingularityError("Kernel evaluated at coincident points")
        return np.where(coincident, 1.0, distance), coincident
    if np.any(coincident):
        raise SingularityError("Kernel evaluated at coincident points")
    return distance, coincident


@dataclass
class KernelSet:
    """Full kernels between targets and sources, optionally with Kress parts"""

    L: np.ndarray
    M: np.ndarray
    Lp: Optional[np.ndarray] = None
    T: Optional[np.ndarray] = None


def full_kernels(
    k: float,
    targets: np.ndarray,
    sources: np.ndarray,
    source_derivatives: np.ndarray,
    target_normals: Optional[np.ndarray] = None,
    allowed: Optional[np.ndarray] = None,
) -> KernelSet:
    """
    Smooth (off-curve or cross-component) kernels L, M and, when target
    normals are given, L' and T

    Args:
        k(float): wave number
        targets(np.ndarray): (T, 2) target points
        sources(np.ndarray): (S, 2) source nodes
        source_derivatives(np.ndarray): (S, 2) parameter derivatives y'
        target_normals(np.ndarray): (T, 2) unit normals at the targets
        allowed(np.ndarray): (T, S) mask of pairs that may coincide, their \
            entries are meaningless and must be overwritten by the caller

    Returns:
        KernelSet: kernels as (T, S) arrays
    """
    difference, distance = _pair_distance(targets, sources)
    distance, _ = _guarded(distance, allowed)
    kr = k * distance
    h0 = special.hankel1(0, kr)
    h1 = special.hankel1(1, kr)
    source_speed = np.hypot(source_derivatives[:, 0], source_derivatives[:, 1])
    # nu(y)|y'| . (y - x)
    b_source = -(source_derivatives[None, :, 1] * difference[..., 0]
                 - source_derivatives[None, :, 0] * difference[..., 1])
    kernels = KernelSet(
        L=0.5j * k * b_source * h1 / distance,
        M=0.5j * h0 * source_speed[None, :],
    )
    if target_normals is not None:
        unit = difference / distance[..., None]
        source_normals = np.stack(
            [source_derivatives[:, 1], -source_derivatives[:, 0]], axis=-1
        ) / source_speed[:, None]
        nx_e = np.sum(target_normals[:, None, :] * unit, axis=-1)
        ny_e = np.sum(source_normals[None, :, :] * unit, axis=-1)
        nx_ny = target_normals @ source_normals.T
        kernels.Lp = -0.5j * k * h1 * nx_e * source_speed[None, :]
        dh1 = h0 - h1 / kr
        kernels.T = 0.5j * k * (
            k * dh1 * nx_e * ny_e + h1 / distance * (nx_ny - nx_e * ny_e)
        ) * source_speed[None, :]
    return kernels


@dataclass
class SplitKernels:
    L1: np.ndarray
    L2: np.ndarray
    M1: np.ndarray
    M2: np.ndarray
    Lp1: np.ndarray
    Lp2: np.ndarray


def split_kernels(
    k: float,
    rule: QuadratureRule,
    target_t: Optional[np.ndarray] = None,
    curve: Optional[object] = None,
) -> SplitKernels:
    """
    Kress splitting of L, M and L' on one curve. Targets default to the
    nodes, with the analytic diagonal limits; otherwise they are the curve
    points at parameters target_t, which must avoid the nodes.
    """
    on_nodes = target_t is None
    if on_nodes:
        target_t = rule.parameters
        targets, target_derivatives = rule.nodes, rule.derivatives
    else:
        raise_if_on_nodes(target_t, rule.parameters)
        targets, target_derivatives = curve_points(rule, target_t, curve)
    difference, distance = _pair_distance(targets, rule.nodes)
    if on_nodes:
        np.fill_diagonal(distance, 1.0)
    kr = k * distance
    h0, h1 = special.hankel1(0, kr), special.hankel1(1, kr)
    j0, j1 = special.jv(0, kr), special.jv(1, kr)
    speed = rule.speed
    target_speed = np.hypot(target_derivatives[:, 0], target_derivatives[:, 1])
    b_source = -(rule.derivatives[None, :, 1] * difference[..., 0]
                 - rule.derivatives[None, :, 0] * difference[..., 1])
    b_target = (target_derivatives[:, None, 1] * difference[..., 0]
                - target_derivatives[:, None, 0] * difference[..., 1])
    ratio = speed[None, :] / target_speed[:, None]

    L = 0.5j * k * b_source * h1 / distance
    L1 = -k / (2 * np.pi) * b_source * j1 / distance
    M = 0.5j * h0 * speed[None, :]
    M1 = -1 / (2 * np.pi) * j0 * speed[None, :]
    Lp = -0.5j * k * b_target * h1 / distance * ratio
    Lp1 = k / (2 * np.pi) * b_target * j1 / distance * ratio

    half_difference = 0.5 * (target_t[:, None] - rule.parameters[None, :])
    sine_squared = np.sin(half_difference) ** 2
    if on_nodes:
        np.fill_diagonal(sine_squared, 1.0)
    logarithm = np.log(4 * sine_squared)
    L2, M2, Lp2 = L - L1 * logarithm, M - M1 * logarithm, Lp - Lp1 * logarithm
    if on_nodes:
        d, dd = rule.derivatives, rule.second_derivatives
        curvature_term = (d[:, 0] * dd[:, 1] - d[:, 1] * dd[:, 0]) / speed ** 2
        diagonal = np.diag_indices(rule.N)
        L1[diagonal] = 0.0
        L2[diagonal] = curvature_term / (2 * np.pi)
        Lp1[diagonal] = 0.0
        Lp2[diagonal] = -curvature_term / (2 * np.pi)
        M1[diagonal] = -speed / (2 * np.pi)
        M2[diagonal] = (
            0.5j - EULER_GAMMA / np.pi - np.log(k * speed / 2) / np.pi
        ) * speed
    return SplitKernels(L1, L2, M1, M2, Lp1, Lp2)


def raise_if_on_nodes(target_t: np.ndarray, source_t: np.ndarray):
    step = 2 * np.pi / len(source_t)
    offset = np.mod(target_t[:, None] - source_t[None, :], 2 * np.pi)
    offset = np.minimum(offset, 2 * np.pi - offset)
    if np.any(offset < 1e-3 * step):
        raise SingularityError("Off-node evaluation requested on a quadrature node")


def curve_points(rule: QuadratureRule, target_t: np.ndarray, curve=None):
    """Curve points and derivatives at arbitrary parameters, exact when the
    curve is given, otherwise by trigonometric interpolation of the nodes"""
    if curve is not None:
        points, derivatives, _ = curve.evaluate(target_t)
        return points, derivatives
    N = rule.N
    spectrum_points = np.fft.fft(rule.nodes, axis=0)
    spectrum_derivatives = np.fft.fft(rule.derivatives, axis=0)
    frequencies = np.fft.fftfreq(N, 1.0 / N)
    frequencies[N // 2] = 0.0
    shift = target_t - rule.parameters[0]
    basis = np.exp(1j * np.outer(shift, frequencies)) / N
    points = np.real(basis @ spectrum_points)
    derivatives = np.real(basis @ spectrum_derivatives)
    return points, derivatives


@dataclass
class DiscreteComponent:
    """One boundary piece with its quadrature and boundary condition"""

    rule: QuadratureRule
    condition: str = "dirichlet"
    coupling: float = 0.0
    impedance: Optional[np.ndarray] = None
    evaluator: Optional[object] = None
    flat: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.flat is None:
            self.flat = np.zeros(self.rule.N, dtype=bool)

    @property
    def N(self) -> int:
        return self.rule.N

    @property
    def step(self) -> float:
        return 2 * np.pi / self.rule.N


class BoundaryIntegralSystem:
    """
    Global Nystrom system over all components of a scene. One LU
    factorization serves every right-hand side.
    """

    def __init__(
        self, k: float, components: List[DiscreteComponent], half_plane: bool = False
    ):
        self.k = k
        self.components = components
        self.half_plane = half_plane
        self.offsets = np.cumsum([0] + [c.N for c in components])
        self._factorization = None
        self.condition_estimate = None

    @property
    def size(self) -> int:
        return int(self.offsets[-1])

    def block(self, index: int) -> slice:
        return slice(self.offsets[index], self.offsets[index + 1])

    def _image_sources(self, component: DiscreteComponent):
        """Flipped nodes with derivatives -P y', so that nu|y'| maps to P nu|y'|"""
        nodes = component.rule.nodes * MIRROR
        derivatives = -component.rule.derivatives * MIRROR
        return nodes, derivatives

    def _cross_block(self, target: DiscreteComponent, source: DiscreteComponent,
                     same: bool) -> np.ndarray:
        """Smooth contribution of source to the target equations"""
        need_normals = target.condition == "impedance"
        w = source.step
        blocks = []
        source_sets = []
        if not same:
            source_sets.append((source.rule.nodes, source.rule.derivatives, 1.0))
        if self.half_plane:
            image_nodes, image_derivatives = self._image_sources(source)
            source_sets.append((image_nodes, image_derivatives, -1.0))
        for nodes, derivatives, sign in source_sets:
            allowed = None
            if sign < 0:
                allowed = target.flat[:, None] & source.flat[None, :]
            kernels = full_kernels(
                self.k, target.rule.nodes, nodes, derivatives,
                target.rule.normals if need_normals else None, allowed,
            )
            blocks.append(sign * self._combine(kernels, target, source, w))
        return sum(blocks) if blocks else 0.0

    @staticmethod
    def _combine(kernels: KernelSet, target, source, w) -> np.ndarray:
        eta = source.coupling
        if target.condition == "dirichlet":
            if source.condition == "dirichlet":
                return -w * (kernels.L + 1j * eta * kernels.M)
            return w * kernels.M
        lam = target.impedance[:, None]
        if source.condition == "impedance":
            return w * (kernels.Lp + lam * kernels.M)
        return w * ((kernels.T - 1j * eta * kernels.Lp)
                    - lam * (kernels.L + 1j * eta * kernels.M))

    def _self_block(self, component: DiscreteComponent) -> np.ndarray:
        split = split_kernels(self.k, component.rule)
        R = circulant_log_weights(component.N)
        w = component.step
        identity = np.eye(component.N)
        if component.condition == "dirichlet":
            eta = component.coupling
            block = identity - (
                R * (split.L1 + 1j * eta * split.M1)
                + w * (split.L2 + 1j * eta * split.M2)
            )
        else:
            lam = component.impedance[:, None]
            block = -identity + (
                R * (split.Lp1 + lam * split.M1) + w * (split.Lp2 + lam * split.M2)
            )
        return block

    def matrix(self) -> np.ndarray:
        """Assembles the dense system matrix"""
        size = self.size
        A = np.zeros((size, size), dtype=complex)
        for a, target in enumerate(self.components):
            for b, source in enumerate(self.components):
                block = self._cross_block(target, source, same=(a == b))
                if a == b:
                    block = block + self._self_block(source)
                A[self.block(a), self.block(b)] += block
        if self.half_plane:
            # G(x, .) vanishes for x on the flat line: those rows reduce to psi = 0
            for a, component in enumerate(self.components):
                rows = np.flatnonzero(component.flat) + self.offsets[a]
                A[rows, :] = 0.0
                A[rows, rows] = 1.0
        return A

    def factorize(self):
        if self._factorization is None:
            A = self.matrix()
            self.condition_estimate = float(np.linalg.cond(A))
            logger.debug(
                f"Nystrom system of size {self.size}, condition estimate "
                f"{self.condition_estimate:.3e}"
            )
            if not np.isfinite(self.condition_estimate) or \
                    self.condition_estimate > CONDITION_LIMIT:
                raise ConditioningError(
                    "Boundary integral system is numerically singular",
                    self.condition_estimate,
                )
            self._factorization = linalg.lu_factor(A)
        return self._factorization

    def right_hand_side(self, incident_fields) -> np.ndarray:
        """
        Boundary data for a list of incident fields

        Args:
            incident_fields: objects with value(points) and \
                normal_derivative(points, normals)

        Returns:
            np.ndarray: (size, len(incident_fields)) right-hand sides
        """
        rhs = np.zeros((self.size, len(incident_fields)), dtype=complex)
        for a, component in enumerate(self.components):
            nodes, normals = component.rule.nodes, component.rule.normals
            for column, incident in enumerate(incident_fields):
                value = incident.value(nodes)
                if component.condition == "dirichlet":
                    data = -2 * value
                else:
                    data = -2 * (incident.normal_derivative(nodes, normals)
                                 + component.impedance * value)
                data = np.where(component.flat, 0.0, data)
                rhs[self.block(a), column] = data
        return rhs

    def solve(self, rhs: np.ndarray, threads: int = 1) -> np.ndarray:
        if self.size == 0:
            self.condition_estimate = 1.0
            return np.zeros(rhs.shape, dtype=complex)
        factorization = self.factorize()
        if rhs.ndim == 1 or threads <= 1:
            return linalg.lu_solve(factorization, rhs)
        chunks = split_in_chunks(rhs.shape[1], threads)
        solved = map_in_threads(
            lambda chunk: linalg.lu_solve(factorization, rhs[:, chunk]), chunks, threads
        )
        return np.concatenate(solved, axis=1)

    def _far_field_block(self, component, obs: np.ndarray, nodes, derivatives):
        k = self.k
        speed = np.hypot(derivatives[:, 0], derivatives[:, 1])
        normals_speed = np.stack([derivatives[:, 1], -derivatives[:, 0]], axis=-1)
        phase = np.exp(-1j * k * obs @ nodes.T)
        if component.condition == "dirichlet":
            factor = -1j * k * (obs @ normals_speed.T) - 1j * component.coupling * speed
        else:
            factor = np.broadcast_to(speed, phase.shape)
        return component.step * factor * phase

    def far_field_operator(self, obs: np.ndarray) -> np.ndarray:
        """(len(obs), size) map from densities to far field values"""
        gamma = far_field_constant(self.k)
        operator = np.zeros((len(obs), self.size), dtype=complex)
        for a, component in enumerate(self.components):
            block = self._far_field_block(
                component, obs, component.rule.nodes, component.rule.derivatives
            )
            if self.half_plane:
                block = block - self._far_field_block(
                    component, obs, *self._image_sources(component)
                )
            operator[:, self.block(a)] = gamma * block
        return operator

    def field_operator(self, points: np.ndarray) -> np.ndarray:
        """(len(points), size) map from densities to u^s at points off the boundary"""
        operator = np.zeros((len(points), self.size), dtype=complex)
        for a, component in enumerate(self.components):
            source_sets = [(component.rule.nodes, component.rule.derivatives, 1.0)]
            if self.half_plane:
                source_sets.append((*self._image_sources(component), -1.0))
            for nodes, derivatives, sign in source_sets:
                kernels = full_kernels(self.k, points, nodes, derivatives)
                if component.condition == "dirichlet":
                    block = -(kernels.L + 1j * component.coupling * kernels.M)
                else:
                    block = kernels.M
                operator[:, self.block(a)] += sign * 0.5 * component.step * block
        return operator

    def boundary_trace_operator(self, index: int):
        """
        u^s at the parameter midpoints of a Dirichlet component, evaluated
        with the singular product quadrature and the trigonometric
        interpolant of the density

        Returns:
            Tuple: (points, (P, size) operator)
        """
        component = self.components[index]
        if component.condition != "dirichlet":
            raise ValueError("Boundary traces are only available on Dirichlet components")
        rule = component.rule
        N = rule.N
        target_t = rule.parameters + np.pi / N
        points, _ = curve_points(rule, target_t, component.evaluator)
        operator = np.zeros((N, self.size), dtype=complex)
        interpolation = resample(np.eye(N), 2 * N, axis=0)[1::2]
        split = split_kernels(self.k, rule, target_t, component.evaluator)
        R = log_weights(target_t, rule.parameters)
        eta = component.coupling
        self_part = interpolation - (
            R * (split.L1 + 1j * eta * split.M1) + component.step * (
                split.L2 + 1j * eta * split.M2)
        )
        operator[:, self.block(index)] += 0.5 * self_part
        for b, source in enumerate(self.components):
            source_sets = []
            if b != index:
                source_sets.append((source.rule.nodes, source.rule.derivatives, 1.0))
            if self.half_plane:
                source_sets.append((*self._image_sources(source), -1.0))
            for nodes, derivatives, sign in source_sets:
                kernels = full_kernels(self.k, points, nodes, derivatives)
                if source.condition == "dirichlet":
                    block = -(kernels.L + 1j * source.coupling * kernels.M)
                else:
                    block = kernels.M
                operator[:, self.block(b)] += sign * 0.5 * source.step * block
        return points, operator
