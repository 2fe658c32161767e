"""
Recovery of the phased far-field matrix from phaseless superposition data.

With delta(x, d) = arg F(x, d) - arg F(x, d0), the superposition moduli give

    |F(x, d) + F(x, d0)|^2 = |F(x, d)|^2 + |F(x, d0)|^2 + 2 |F(x, d)| |F(x, d0)| cos delta

so cos delta is measured and only its sign is missing. Reciprocity
F(x, d) = F(-d, -x) couples the signs across rows and fixes the row phases
phi(x) = arg F(x, d0) up to one additive constant. The remaining global sign
flip is the conjugation branch, decided by localizing the known reference
ball, and the remaining constant is pinned by the Dirichlet condition on the
ball boundary.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np
import xarray as xr
from scipy import linalg, sparse, special
from scipy.interpolate import CubicSpline
from scipy.signal import resample
from scipy.sparse.csgraph import breadth_first_order, connected_components
from scipy.sparse.linalg import lsqr

from ..data_container.far_field import (
    far_field_matrix,
    grids,
    is_uniform_full,
    pairing_indices,
)
from ..forward.incident import directions
from ..geometry.scene import ReferenceBall
from ..inversion.lsm import probe_ratio
from ..special_functions.specfun import far_field_constant
from ..utilities.exceptions import (
    ExpansionValidityError,
    FragmentationError,
    GaugeInconsistencyError,
    GridMisalignmentError,
    UnresolvedBranchError,
)

logger = logging.getLogger(__name__)

MASK_THRESHOLD = 1e-6
MARGIN_TOLERANCE = 1e-9
DEGENERATE_SINE = 1e-9
CONSISTENCY_WARNING = 1e-3
BRANCH_THRESHOLD = 1.1
GAUGE_TOLERANCE = 0.05
BOUNDARY_SAMPLES = 64
FIT_CUTOFF = 1e-12
UPSAMPLING = 16
ROW_REACH = 2
RESOLUTION_WARNING = 1e-6
SIGN_METHODS = ("auto", "reciprocity", "smoothness")


def wrap(angle):
    """Principal value in (-pi, pi]"""
    return np.pi - np.mod(np.pi - np.asarray(angle, dtype=float), 2 * np.pi)


@dataclass(frozen=True, eq=False)
class RelativePhaseField:
    """
    Phase differences delta(x, d) = arg F(x, d) - arg F(x, d0) on the
    measurement grid, with the single-incidence moduli. Masked-out entries
    carry cos_delta = 1 and delta = 0.
    """

    cos_delta: np.ndarray
    delta: np.ndarray
    sign_confidence: np.ndarray
    mask: np.ndarray
    modulus: np.ndarray
    obs: np.ndarray
    inc: np.ndarray
    aperture: str
    d0_index: int
    method: str = ""

    @property
    def magnitude(self) -> np.ndarray:
        return np.arccos(self.cos_delta)

    @property
    def periodic(self) -> bool:
        return self.aperture == "full"


@dataclass(frozen=True, eq=False)
class PhaseCandidates:
    direct: xr.DataArray
    conjugate: xr.DataArray
    consistency: float
    warnings: Tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class RecoveredField:
    far_field: xr.DataArray
    branch: str
    branch_score_ratio: float
    global_phase_fixed: bool = False
    report: Dict = field(default_factory=dict)


def relative_phase(dataset: xr.Dataset) -> RelativePhaseField:
    """
    cos delta from the three moduli

    Args:
        dataset(xr.Dataset): phaseless dataset

    Returns:
        RelativePhaseField: clamped cosines with the unsigned delta = arccos, \
            entries with a vanishing denominator masked out
    """
    single = dataset["mod_single"].values
    ref = dataset["mod_ref"].values[:, None]
    superposed = dataset["mod_super"].values
    d0_index = int(dataset.attrs["d0_index"])
    denominator = 2 * single * ref
    scale = float(np.max(denominator)) if denominator.size else 0.0
    mask = denominator >= MASK_THRESHOLD * scale if scale > 0 else np.zeros_like(single, bool)
    numerator = superposed ** 2 - single ** 2 - ref ** 2
    cos_delta = np.ones_like(single)
    cos_delta[mask] = numerator[mask] / denominator[mask]
    clamped = np.abs(cos_delta) > 1
    if np.any(clamped):
        logger.debug(
            f"Clamped {int(np.sum(clamped))} cosines, largest excess "
            f"{float(np.max(np.abs(cos_delta[clamped])) - 1):.3e}"
        )
    cos_delta = np.clip(cos_delta, -1.0, 1.0)
    cos_delta[:, d0_index] = 1.0
    masked = int(mask.size - np.sum(mask))
    if masked:
        logger.info(f"Masked {masked} of {mask.size} entries with vanishing moduli")
    return RelativePhaseField(
        cos_delta=cos_delta,
        delta=np.where(mask, np.arccos(cos_delta), 0.0),
        sign_confidence=np.zeros_like(cos_delta),
        mask=mask,
        modulus=single,
        obs=dataset["observation"].values,
        inc=dataset["incidence"].values,
        aperture=dataset.attrs["aperture"],
        d0_index=d0_index,
    )


def _pair_cost(base, first, second):
    """min over s1, s2 in {1, -1} of |wrap(base + s1 first - s2 second)|"""
    return np.min(
        [np.abs(wrap(base + s1 * first - s2 * second)) for s1 in (1, -1) for s2 in (1, -1)],
        axis=0,
    )


def _grid_components(mask: np.ndarray, periodic: bool):
    """Connected components of the unmasked entries under 4-neighbour adjacency"""
    rows, columns = mask.shape
    index = np.arange(mask.size).reshape(mask.shape)
    pairs = []
    for axis in (0, 1):
        if periodic:
            first, second = index, np.roll(index, -1, axis=axis)
            linked = mask & np.roll(mask, -1, axis=axis)
        else:
            cut = [slice(None), slice(None)]
            cut[axis] = slice(0, mask.shape[axis] - 1)
            shifted = [slice(None), slice(None)]
            shifted[axis] = slice(1, None)
            first, second = index[tuple(cut)], index[tuple(shifted)]
            linked = mask[tuple(cut)] & mask[tuple(shifted)]
        pairs.append((first[linked], second[linked]))
    sources = np.concatenate([pair[0] for pair in pairs])
    targets = np.concatenate([pair[1] for pair in pairs])
    graph = sparse.coo_matrix(
        (np.ones(len(sources)), (sources, targets)), shape=(mask.size, mask.size)
    )
    _, labels = connected_components(graph, directed=False)
    labels = labels.reshape(mask.shape)
    return [np.argwhere(mask & (labels == label)) for label in np.unique(labels[mask])]


def _synchronize_rows(weights, edges, eligible):
    """
    Greedy sign synchronization of the rows. weights[m, j] > 0 favours equal
    signs of rows m and j, its modulus is the margin of that preference.
    """
    count = len(weights)
    sigma = np.zeros(count)
    confidence = np.zeros(count)
    candidates = np.flatnonzero(eligible)
    if len(candidates) == 0:
        return sigma, confidence
    start = candidates[np.argmax(np.abs(weights[candidates]).sum(axis=1))]
    sigma[start], confidence[start] = 1.0, 1.0
    fixed = np.zeros(count, bool)
    fixed[start] = True
    vote = weights[:, start].copy()
    support = edges[:, start].astype(float)
    for _ in range(len(candidates) - 1):
        open_rows = np.flatnonzero(eligible & ~fixed)
        pick = open_rows[np.argmax(np.abs(vote[open_rows]))]
        sigma[pick] = 1.0 if vote[pick] >= 0 else -1.0
        confidence[pick] = min(abs(vote[pick]) / (np.pi * max(support[pick], 1.0)), 1.0)
        fixed[pick] = True
        vote += sigma[pick] * weights[:, pick]
        support += edges[:, pick]
    return sigma, confidence


def _fine_envelope(squared: np.ndarray, periodic: bool) -> Tuple[np.ndarray, int]:
    """Square root of a smooth nonnegative row resampled UPSAMPLING times finer"""
    count = len(squared)
    if count < 4:
        return np.sqrt(np.maximum(squared, 0.0)), 1
    if periodic:
        fine = resample(squared, count * UPSAMPLING)
    else:
        spline = CubicSpline(np.arange(count), squared)
        fine = spline(np.arange((count - 1) * UPSAMPLING + 1) / UPSAMPLING)
    return np.sqrt(np.maximum(fine, 0.0)), UPSAMPLING


def _walk_signs(envelope: np.ndarray, order: np.ndarray, signs: np.ndarray):
    """Continues the signed envelope along order by quadratic extrapolation"""
    history = [float(envelope[order[0]])]
    for index in order[1:]:
        if len(history) >= 3:
            predicted = 3 * history[-1] - 3 * history[-2] + history[-3]
        elif len(history) == 2:
            predicted = 2 * history[-1] - history[-2]
        else:
            predicted = history[-1]
        signs[index] = 1.0 if predicted >= 0 else -1.0
        history.append(signs[index] * envelope[index])


def _row_signs(imaginary: np.ndarray, periodic: bool) -> np.ndarray:
    """
    Signs of a real band-limited row known only through its modulus, up to
    one flip of the row. The squared row is band-limited too, so it is
    resampled finely and its signed square root is continued through the
    zeros, starting from the largest value.
    """
    envelope, factor = _fine_envelope(imaginary ** 2, periodic)
    signs = np.ones(len(envelope))
    start = int(np.argmax(envelope))
    if periodic:
        orders = [np.roll(np.arange(len(envelope)), -start)]
    else:
        orders = [np.arange(start, len(envelope)), np.arange(start, -1, -1)]
    for order in orders:
        _walk_signs(envelope, order, signs)
    return signs[::factor][:len(imaginary)]


def _row_votes(delta, mask, eligible, periodic):
    """Synchronization weights of nearby rows from the phase jumps between them"""
    count = len(delta)
    index = np.arange(count)
    distance = np.abs(index[:, None] - index[None, :])
    if periodic:
        distance = np.minimum(distance, count - distance)
    edges = (distance > 0) & (distance <= ROW_REACH) & eligible[:, None] & eligible[None, :]
    weights = np.zeros((count, count))
    for m, j in zip(*np.nonzero(np.triu(edges))):
        shared = mask[m] & mask[j]
        same = np.sum(np.abs(wrap(delta[j, shared] - delta[m, shared])))
        flipped = np.sum(np.abs(wrap(delta[j, shared] + delta[m, shared])))
        weights[m, j] = weights[j, m] = flipped - same
    return weights, edges


def _high_frequency_share(rows: np.ndarray) -> float:
    """Largest fraction of a row spectrum in its top eighth"""
    spectrum = np.abs(np.fft.rfft(rows, axis=1))
    top = spectrum[:, -max(spectrum.shape[1] // 8, 1):]
    total = np.maximum(np.sum(spectrum, axis=1), np.finfo(float).tiny)
    return float(np.max(np.sum(top, axis=1) / total))


def _smoothness_signs(rp: RelativePhaseField):
    """
    Row by row continuation of Im(F(x, d) conj F(x, d0)) / |F(x, d0)|, a
    band-limited function of d known up to sign, followed by a vote that
    orients every row against its neighbours
    """
    components = _grid_components(rp.mask, rp.periodic)
    if len(components) > 1:
        raise FragmentationError(components)
    magnitude = rp.magnitude
    imaginary = np.where(rp.mask, rp.modulus * np.sin(magnitude), 0.0)
    periodic = rp.periodic and is_uniform_full(rp.inc)
    if periodic and imaginary.size:
        share = _high_frequency_share(imaginary ** 2)
        if share > RESOLUTION_WARNING:
            logger.warning(
                f"Rows are under-resolved for sign continuation, {share:.2e} of the "
                f"squared row spectrum sits near the Nyquist limit"
            )
    signs = np.array([_row_signs(row, periodic) for row in imaginary]).reshape(magnitude.shape)
    row_delta = np.where(rp.mask, signs * magnitude, 0.0)
    tiny = np.finfo(float).tiny
    scale = np.max(imaginary, axis=1, initial=0.0)
    eligible = scale > DEGENERATE_SINE * max(float(np.max(scale, initial=0.0)), tiny)
    weights, edges = _row_votes(
        row_delta, rp.mask, eligible, rp.periodic and is_uniform_full(rp.obs)
    )
    sigma, row_confidence = _synchronize_rows(weights, edges, eligible)
    sigma[~eligible] = 1.0
    relative = imaginary / np.maximum(scale, tiny)[:, None]
    confidence = np.where(rp.mask, np.minimum(row_confidence[:, None], relative), 0.0)
    return sigma[:, None] * row_delta, confidence


def _band_limited_prediction(angles, values, known):
    """Least-squares trigonometric fit to the known entries of a row, evaluated on the whole row"""
    degree = max((int(np.sum(known)) - 1) // 2 - 1, 0)
    orders = np.arange(-degree, degree + 1)
    basis = np.exp(1j * np.outer(angles, orders))
    coefficients = linalg.lstsq(basis[known], values[known], cond=FIT_CUTOFF)[0]
    return basis @ coefficients


def _fill_from_rows(rp: RelativePhaseField, delta, determined, confidence):
    """
    Signs of the entries reciprocity leaves open, chosen so that
    |F| exp(i delta) continues the band-limited fit through the resolved
    entries of the same row
    """
    magnitude = rp.magnitude
    open_entries = rp.mask & ~determined
    for m in np.flatnonzero(np.any(open_entries, axis=1)):
        known = determined[m]
        if np.sum(known) < 3:
            continue
        predicted = _band_limited_prediction(rp.inc, rp.modulus[m] * np.exp(1j * delta[m]), known)
        columns = np.flatnonzero(open_entries[m])
        modulus = rp.modulus[m, columns]
        plus = np.abs(modulus * np.exp(1j * magnitude[m, columns]) - predicted[columns])
        minus = np.abs(modulus * np.exp(-1j * magnitude[m, columns]) - predicted[columns])
        delta[m, columns] = np.where(plus <= minus, 1.0, -1.0) * magnitude[m, columns]
        confidence[m, columns] = np.minimum(np.abs(plus - minus) / (2 * modulus), 1.0)
        determined[m, columns] = True


def _reciprocity_signs(rp: RelativePhaseField):
    """
    Row phases psi(m) = delta(m*, pn[m]) with m* = pm[d0] are known up to a
    sign per row. Each reciprocal pair of entries gives

        psi(m) + delta(m, pn[m2]) = psi(m2) + delta(m2, pn[m])

    which first decides the relative row signs and then the entry signs.
    Entries the pairs leave open (self-reciprocal entries, rows with a
    masked reference entry) take the sign that continues the band-limited
    fit through the resolved entries of their row.
    """
    pm, pn = pairing_indices(rp.obs, rp.inc, rp.aperture)
    magnitude = rp.magnitude
    mask = rp.mask
    root = pm[rp.d0_index]
    star = magnitude[root, pn]
    star_valid = mask[root, pn]

    first = magnitude[:, pn]
    pair_valid = mask[:, pn]
    edges = pair_valid & pair_valid.T & star_valid[:, None] & star_valid[None, :]
    np.fill_diagonal(edges, False)
    same = _pair_cost(star[:, None] - star[None, :], first, first.T)
    flipped = _pair_cost(star[:, None] + star[None, :], first, first.T)
    weights = np.where(edges, flipped - same, 0.0)

    rows = np.flatnonzero(star_valid)
    if len(rows) > 1:
        n_components, labels = connected_components(
            sparse.csr_matrix(edges[np.ix_(rows, rows)].astype(float)), directed=False
        )
        if n_components > 1:
            raise FragmentationError([rows[labels == label] for label in range(n_components)])

    sigma, row_confidence = _synchronize_rows(weights, edges, star_valid)
    row_confidence[star_valid & (np.abs(np.sin(star)) < DEGENERATE_SINE)] = 1.0
    psi = sigma * star

    partner = magnitude[pm[None, :], pn[:, None]]
    partner_valid = mask[pm[None, :], pn[:, None]]
    base = psi[:, None] - psi[pm][None, :]
    plus = _pair_cost(base + magnitude, 0.0, partner)
    minus = _pair_cost(base - magnitude, 0.0, partner)
    entry_margin = np.abs(plus - minus) / np.pi
    degenerate = np.abs(np.sin(magnitude)) < DEGENERATE_SINE
    determined = (
        mask & partner_valid & star_valid[:, None] & star_valid[pm][None, :]
        & ((entry_margin > MARGIN_TOLERANCE) | degenerate)
    )
    delta = np.where(plus <= minus, magnitude, -magnitude)
    delta = np.where(determined, delta, magnitude)
    confidence = np.where(
        determined,
        np.minimum(np.minimum(row_confidence[:, None], row_confidence[pm][None, :]),
                   np.minimum(entry_margin, 1.0)),
        0.0,
    )
    open_entries = int(np.sum(mask & ~determined))
    logger.debug(f"Reciprocity fixed {int(np.sum(determined))} signs, {open_entries} left open")
    if open_entries:
        determined = determined.copy()
        _fill_from_rows(rp, delta, determined, confidence)
        left = int(np.sum(mask & ~determined))
        if left:
            logger.warning(f"{left} entries in rows without resolved signs keep delta >= 0")
    return delta, confidence


def resolve_signs(rp: RelativePhaseField, method: str = "auto") -> RelativePhaseField:
    """
    Chooses the sign of every delta. One global flip of all signs stays
    open: it is the conjugation branch.

    Args:
        rp(RelativePhaseField): output of relative_phase
        method(str): "reciprocity" synchronizes signs through reciprocal \
            pairs, "smoothness" continues every row of \
            Im(F conj F0) through its zeros and orients the rows against \
            their neighbours, "auto" uses reciprocity whenever the grids \
            are paired

    Returns:
        RelativePhaseField: with signed delta in (-pi, pi] and sign_confidence
    """
    if method not in SIGN_METHODS:
        raise ValueError(f"Unknown sign method {method}, choose one of {SIGN_METHODS}")
    if method == "auto":
        try:
            pairing_indices(rp.obs, rp.inc, rp.aperture)
            method = "reciprocity"
        except GridMisalignmentError:
            method = "smoothness"
    if method == "reciprocity":
        delta, confidence = _reciprocity_signs(rp)
    else:
        delta, confidence = _smoothness_signs(rp)
    low = int(np.sum(rp.mask & (confidence < 1e-6)))
    if low:
        logger.info(f"{low} unmasked entries have no sign information")
    return replace(rp, delta=wrap(delta), sign_confidence=confidence, method=method)


def _row_equations(delta, mask, pn):
    """
    Right-hand sides b[m, m2] = phi(m) - phi(m2) = delta(m2, pn[m]) - delta(m, pn[m2])
    and their validity
    """
    paired = delta[:, pn]
    valid = mask[:, pn] & mask[:, pn].T
    np.fill_diagonal(valid, False)
    return paired.T - paired, valid


def _lift(delta, mask, pn, root):
    """Row phases phi with phi[root] = 0, chained over a breadth-first tree then least-squares refined"""
    count = len(pn)
    rhs, valid = _row_equations(delta, mask, pn)
    graph = sparse.csr_matrix(valid.astype(float))
    order, predecessors = breadth_first_order(
        graph, root, directed=False, return_predecessors=True
    )
    if len(order) < count:
        _, labels = connected_components(graph, directed=False)
        raise FragmentationError([np.flatnonzero(labels == label) for label in np.unique(labels)])
    phi = np.zeros(count)
    for m in order[1:]:
        parent = predecessors[m]
        phi[m] = phi[parent] - rhs[parent, m]

    first, second = np.nonzero(np.triu(valid))
    residual = wrap(rhs[first, second] - (phi[first] - phi[second]))
    equations = len(first)
    matrix = sparse.coo_matrix(
        (
            np.concatenate([np.ones(equations), -np.ones(equations), [1.0]]),
            (
                np.concatenate([np.arange(equations), np.arange(equations), [equations]]),
                np.concatenate([first, second, [root]]),
            ),
        ),
        shape=(equations + 1, count),
    ).tocsr()
    correction = lsqr(matrix, np.append(residual, 0.0), atol=1e-14, btol=1e-14)[0]
    phi = phi + correction
    consistency = float(np.max(np.abs(
        wrap(rhs[first, second] - (phi[first] - phi[second]))
    ))) if equations else 0.0
    return phi, consistency


def absolute_phase(rp: RelativePhaseField, dataset: xr.Dataset) -> PhaseCandidates:
    """
    Lifts the row phases phi(x) = arg F(x, d0) from reciprocity

    Args:
        rp(RelativePhaseField): signed relative phases from resolve_signs
        dataset(xr.Dataset): the phaseless dataset rp was computed from

    Returns:
        PhaseCandidates: |F| exp(i(phi + delta)) for the resolved signs and \
            for the opposite global sign, each up to a unimodular constant
    """
    pm, pn = pairing_indices(rp.obs, rp.inc, rp.aperture)
    root = pm[rp.d0_index]
    modulus = dataset["mod_single"].values
    k = dataset.attrs["k"]
    warnings = []
    candidates = {}
    consistencies = []
    for name, signed in (("direct", rp.delta), ("conjugate", -rp.delta)):
        phi, consistency = _lift(signed, rp.mask, pn, root)
        consistencies.append(consistency)
        values = modulus * np.exp(1j * (phi[:, None] + signed))
        candidates[name] = far_field_matrix(
            values, rp.obs, rp.inc, k, rp.aperture, name=f"recovered_{name}"
        )
    consistency = max(consistencies)
    logger.info(f"Row phases lifted, consistency residual {consistency:.3e}")
    if consistency > CONSISTENCY_WARNING:
        message = (
            f"Reciprocity equations are inconsistent, largest residual "
            f"{consistency:.3e} rad"
        )
        logger.warning(message)
        warnings.append(message)
    return PhaseCandidates(
        candidates["direct"], candidates["conjugate"], consistency, tuple(warnings)
    )


def disambiguate_branch(
    candidates: PhaseCandidates, ball: ReferenceBall, noise_level: float = 0.0
) -> RecoveredField:
    """
    Picks the candidate whose sampling indicator localizes the reference
    ball at its known center b rather than at -b

    Args:
        candidates(PhaseCandidates): output of absolute_phase
        ball(ReferenceBall): the known reference ball
        noise_level(float): noise level passed to the sampling method

    Returns:
        RecoveredField: the selected branch, global phase unfixed
    """
    center = np.asarray(ball.center, dtype=float)
    scores = {
        "direct": probe_ratio(candidates.direct, center, noise_level),
        "conjugate": probe_ratio(candidates.conjugate, center, noise_level),
    }
    branch = max(scores, key=scores.get)
    ratio = scores[branch]
    logger.info(
        f"Branch scores direct {scores['direct']:.4g}, conjugate "
        f"{scores['conjugate']:.4g}, selected {branch}"
    )
    if ratio < BRANCH_THRESHOLD:
        raise UnresolvedBranchError(ratio, candidates)
    chosen = candidates.direct if branch == "direct" else candidates.conjugate
    return RecoveredField(
        far_field=chosen.rename("far_field"),
        branch=branch,
        branch_score_ratio=float(ratio),
        report={
            "branch_scores": scores,
            "consistency": candidates.consistency,
            "warnings": list(candidates.warnings),
        },
    )


def expansion_orders(k: float, R: float, radius: float) -> Tuple[int, int]:
    return int(math.ceil(k * R)) + 10, int(math.ceil(k * radius)) + 7


def _outgoing_far_fields(k, obs_angles, orders, center):
    """Far fields -4i gamma_2 (-i)^n exp(in theta) exp(-ik x.c) of H_n(k|x - c|) exp(in theta_c)"""
    obs_angles = np.asarray(obs_angles, dtype=float)
    shift = np.exp(-1j * k * directions(obs_angles) @ np.asarray(center, dtype=float))
    return (
        -4j * far_field_constant(k) * (-1j) ** orders[None, :]
        * np.exp(1j * np.outer(obs_angles, orders)) * shift[:, None]
    )


def _outgoing_fields(k, points, orders, center):
    relative = points - np.asarray(center, dtype=float)
    r = np.hypot(relative[:, 0], relative[:, 1])
    theta = np.arctan2(relative[:, 1], relative[:, 0])
    return special.hankel1(orders[None, :], k * r[:, None]) * np.exp(1j * np.outer(theta, orders))


@dataclass(frozen=True, eq=False)
class BoundaryModel:
    """
    Far fields of a scene made of unknown sources in B_R and the sound-soft
    reference ball. With a the multipole coefficients about the origin, the
    correctly gauged far field is

        F = (E - A N) a - A u^i

    where E and N map a to far-field and boundary values, and A maps
    boundary values on the ball to the far field of the radiating field
    taking them. The ball carries no free coefficients.
    """

    points: np.ndarray
    modes: np.ndarray
    incident: np.ndarray
    origin_far: np.ndarray
    origin_near: np.ndarray
    ball_far: np.ndarray
    boundary_to_far: np.ndarray

    @property
    def coupled(self) -> np.ndarray:
        return self.origin_far - self.boundary_to_far @ self.origin_near

    @property
    def lone_ball(self) -> np.ndarray:
        """-A u^i, the far field of the ball without the unknown scatterer"""
        return -self.boundary_to_far @ self.incident


def boundary_model(
    F: xr.DataArray, ball: ReferenceBall, R: float, samples: int = BOUNDARY_SAMPLES,
    orders: Optional[Tuple[int, int]] = None,
) -> BoundaryModel:
    """
    Multipoles about the origin and the boundary-to-far-field map of the ball

    Args:
        F(xr.DataArray): full-aperture far-field matrix
        ball(ReferenceBall): the reference ball
        R(float): radius of the disk containing the unknown scatterer
        samples(int): number of boundary points
        orders(Tuple): origin and ball expansion orders

    Returns:
        BoundaryModel: the operators on the grids of F
    """
    k = F.attrs["k"]
    obs, inc = grids(F)
    center = np.asarray(ball.center, dtype=float)
    origin_order, ball_order = orders or expansion_orders(k, R, ball.radius)
    origin_terms = np.arange(-origin_order, origin_order + 1)
    ball_terms = np.arange(-ball_order, ball_order + 1)
    unknowns = len(origin_terms) + len(ball_terms)
    if unknowns > len(obs) - 4:
        raise ExpansionValidityError(
            f"{unknowns} multipole terms need at least {unknowns + 4} observation "
            f"directions, got {len(obs)}"
        )
    if len(ball_terms) > samples:
        raise ExpansionValidityError(
            f"{samples} boundary points cannot resolve {len(ball_terms)} ball modes"
        )
    t = 2 * np.pi * np.arange(samples) / samples
    points = center + ball.radius * np.stack([np.cos(t), np.sin(t)], axis=-1)
    # unit boundary amplitude per mode
    ball_far = (
        _outgoing_far_fields(k, obs, ball_terms, center)
        / special.hankel1(ball_terms, k * ball.radius)[None, :]
    )
    transform = np.exp(-1j * np.outer(ball_terms, t)) / samples
    return BoundaryModel(
        points=points,
        modes=np.exp(1j * np.outer(t, ball_terms)),
        incident=np.exp(1j * k * points @ directions(inc).T),
        origin_far=_outgoing_far_fields(k, obs, origin_terms, (0.0, 0.0)),
        origin_near=_outgoing_fields(k, points, origin_terms, (0.0, 0.0)),
        ball_far=ball_far,
        boundary_to_far=ball_far @ transform,
    )


def gauge_constant(
    F: xr.DataArray, ball: ReferenceBall, R: float, samples: int = BOUNDARY_SAMPLES,
    orders: Optional[Tuple[int, int]] = None,
) -> complex:
    """
    The constant c for which c F satisfies the boundary condition of the
    ball. Projecting out the range of E - A N leaves c P F = -P A u^i,
    solved in least squares over all incident directions.
    """
    model = boundary_model(F, ball, R, samples, orders)
    basis = linalg.orth(model.coupled, rcond=FIT_CUTOFF)
    data = F.values - basis @ (basis.conj().T @ F.values)
    lone = model.lone_ball
    target = lone - basis @ (basis.conj().T @ lone)
    norm = float(np.vdot(data, data).real)
    if norm == 0:
        return 0j
    return complex(np.vdot(data, target) / norm)


def boundary_scattered_field(
    F: xr.DataArray, ball: ReferenceBall, R: float, constant: complex = 1.0,
    samples: int = BOUNDARY_SAMPLES, orders: Optional[Tuple[int, int]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Scattered field of c F on the ball boundary. The origin coefficients
    come from the coupled model, the ball part is continued from what they
    leave of the far field, so data inconsistent with the boundary
    condition shows up on the boundary.

    Args:
        F(xr.DataArray): full-aperture far-field matrix
        ball(ReferenceBall): the reference ball
        R(float): radius of the disk containing the unknown scatterer
        constant(complex): gauge applied to F
        samples(int): number of boundary points
        orders(Tuple): origin and ball expansion orders

    Returns:
        Tuple: boundary points (samples, 2) and u^s (samples, N_inc)
    """
    model = boundary_model(F, ball, R, samples, orders)
    scaled = constant * F.values
    coefficients, _, rank, _ = linalg.lstsq(
        model.coupled, scaled - model.lone_ball, cond=FIT_CUTOFF
    )
    logger.debug(f"Origin multipole fit of numerical rank {rank}")
    remainder = scaled - model.origin_far @ coefficients
    amplitudes = linalg.lstsq(model.ball_far, remainder, cond=FIT_CUTOFF)[0]
    return model.points, model.origin_near @ coefficients + model.modes @ amplitudes


def fix_global_phase(
    rec: RecoveredField, ball: ReferenceBall, R: float,
    orders: Optional[Tuple[int, int]] = None,
) -> RecoveredField:
    """
    Pins the unimodular constant c with u^i + c u^s_rec = 0 on the boundary
    of the sound-soft reference ball. The ball field is tied to the origin
    multipoles through that condition, c is the least-squares factor over
    every incident direction

    Args:
        rec(RecoveredField): branch-resolved field
        ball(ReferenceBall): the reference ball, sound-soft
        R(float): radius of the disk containing the unknown scatterer
        orders(Tuple): origin and ball expansion orders

    Returns:
        RecoveredField: the field times c with global_phase_fixed set
    """
    F = rec.far_field
    if F.attrs["aperture"] != "full":
        raise ExpansionValidityError(
            "Boundary matching needs full-aperture data, half-plane fields are not expanded"
        )
    if ball.index is not None:
        raise ExpansionValidityError(
            "A penetrable reference ball carries no boundary condition to match"
        )
    center = np.asarray(ball.center, dtype=float)
    clearance = float(np.linalg.norm(center)) - ball.radius
    if clearance <= R:
        raise ExpansionValidityError(
            f"Reference ball comes within {clearance:.4f} of the origin, the "
            f"expansion about B_R needs more than R = {R}"
        )
    constant = gauge_constant(F, ball, R, orders=orders)
    logger.info(f"Gauge constant {constant:.6f} (|c| = {abs(constant):.6f})")
    if abs(abs(constant) - 1) > GAUGE_TOLERANCE:
        raise GaugeInconsistencyError(constant)
    k = F.attrs["k"]
    _, inc = grids(F)
    points, scattered = boundary_scattered_field(F, ball, R, constant, orders=orders)
    incident = np.exp(1j * k * points @ directions(inc).T)
    residual = float(np.max(np.abs(incident + scattered)))
    logger.info(f"Boundary residual {residual:.3e}")
    report = dict(rec.report, gauge_constant=constant, boundary_residual=residual)
    return replace(
        rec,
        far_field=F.copy(data=F.values * constant),
        global_phase_fixed=True,
        report=report,
    )


def recover_far_field(
    dataset: xr.Dataset,
    ball: ReferenceBall,
    R: float,
    fix_phase: bool = True,
    sign_method: str = "auto",
    noise_level: float = 0.0,
) -> RecoveredField:
    """
    Full recovery: relative phases, signs, row phases, branch and, when the
    geometry allows, the global phase

    Args:
        dataset(xr.Dataset): phaseless dataset
        ball(ReferenceBall): the known reference ball
        R(float): radius of the disk containing the unknown scatterer
        fix_phase(bool): run the boundary matching step
        sign_method(str): see resolve_signs
        noise_level(float): noise level passed to the sampling method

    Returns:
        RecoveredField: the recovered far field with its diagnostics
    """
    rp = resolve_signs(relative_phase(dataset), sign_method)
    candidates = absolute_phase(rp, dataset)
    rec = disambiguate_branch(candidates, ball, noise_level)
    rec.report.update(
        masked_entries=int(rp.mask.size - np.sum(rp.mask)),
        sign_method=rp.method,
        min_sign_confidence=float(np.min(rp.sign_confidence[rp.mask]))
        if np.any(rp.mask) else 0.0,
    )
    if not fix_phase:
        return rec
    try:
        return fix_global_phase(rec, ball, R)
    except ExpansionValidityError as e:
        logger.warning(f"Global phase left unfixed: {e}")
        rec.report["global_phase"] = str(e)
        return rec


def gauge_aligned_error(recovered: xr.DataArray, truth: xr.DataArray) -> Tuple[float, complex]:
    """
    max |c F_rec - F_true| / max |F_true| for the best unimodular c

    Returns:
        Tuple: the relative error and c
    """
    product = np.sum(np.conj(recovered.values) * truth.values)
    constant = product / abs(product) if abs(product) > 0 else 1.0 + 0j
    error = np.max(np.abs(constant * recovered.values - truth.values))
    return float(error / np.max(np.abs(truth.values))), complex(constant)
