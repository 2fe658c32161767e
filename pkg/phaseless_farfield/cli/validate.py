"""
Validation suites. Every check computes one quantity and compares it with a
frozen threshold; the suite writes validate_report.json and logs a summary.
The fast suite covers the cheap invariants, the full suite adds the
end-to-end experiments.
"""
import json
import logging
import os
import time
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List

import numpy as np
from scipy import special

from ..data_container.far_field import far_field_matrix, reciprocity_gap, with_values
from ..data_container.phaseless import (
    dataset_gap,
    invariance_gap,
    synthesize_dataset,
    triangle_violation,
)
from ..forward.analytic import penetrable_disk_far_field, sound_soft_disk_far_field
from ..forward.incident import full_aperture_angles
from ..forward.medium import multistatic_medium
from ..forward.obstacle import multistatic
from ..forward.solver_factory import scattering_factory
from ..geometry.curves import make_curve
from ..geometry.scene import (
    MediumInclusion,
    MediumSpec,
    ReferenceBall,
    Scene,
    transmission_radius_bound,
    validate_scene,
)
from ..geometry.scenes import BUILTIN_SCENES, GOLDEN_WAVENUMBERS, builtin_scene
from ..inversion.lsm import indicator_map, lsm_solve, probe_ratio, superlevel_contains
from ..recovery.phase_recovery import (
    RecoveredField,
    absolute_phase,
    disambiguate_branch,
    fix_global_phase,
    gauge_aligned_error,
    recover_far_field,
    relative_phase,
    resolve_signs,
)

logger = logging.getLogger(__name__)

SUITES = ("fast", "full")
REPORT_FILE = "validate_report.json"


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    comparison: str
    seconds: float
    detail: str = ""


_CHECKS: Dict[str, List] = {suite: [] for suite in SUITES}


def check(name: str, threshold: float, comparison: str = "<=", suite: str = "fast"):
    """Registers a check in `suite` and in every larger suite"""

    def decorate(func: Callable[[int], float]):
        for registered in SUITES[SUITES.index(suite):]:
            _CHECKS[registered].append((name, threshold, comparison, func))
        return func

    return decorate


def _cached(func):
    results = {}

    def wrapper(threads):
        if "value" not in results:
            results["value"] = func(threads)
        return results["value"]

    return wrapper


@_cached
def _kite_ball_far_field(threads):
    return multistatic(builtin_scene("kite_ball"), 5.0, full_aperture_angles(64),
                       full_aperture_angles(64), 128, threads)


@_cached
def _kite_ball_recovery(threads):
    F = _kite_ball_far_field(threads)
    dataset = synthesize_dataset(F, 0.0)
    scene = builtin_scene("kite_ball")
    return F, recover_far_field(dataset, scene.ball, scene.R)


@check("wronskian", 1e-12)
def wronskian(threads):
    x = np.linspace(0.5, 20.0, 40)
    worst = 0.0
    for n in range(11):
        value = special.jv(n, x) * special.yvp(n, x) - special.jvp(n, x) * special.yv(n, x)
        worst = max(worst, float(np.max(np.abs(value * np.pi * x / 2 - 1))))
    return worst


@check("bessel_recurrence", 1e-12)
def bessel_recurrence(threads):
    x = np.linspace(0.5, 20.0, 40)
    worst = 0.0
    for n in range(1, 11):
        gap = special.jv(n - 1, x) + special.jv(n + 1, x) - 2 * n / x * special.jv(n, x)
        worst = max(worst, float(np.max(np.abs(gap))))
    return worst


@check("quadrature_spectral_convergence", 1e-10)
def quadrature_convergence(threads):
    kite = make_curve("kite")
    return abs(kite.length(128) - kite.length(256))


@check("disk_series_k1", 1e-8)
def disk_series_k1(threads):
    angles = full_aperture_angles(32)
    F = multistatic(builtin_scene("disk"), 1.0, angles, angles, 128, threads)
    exact = sound_soft_disk_far_field(1.0, 1.0, angles, angles)
    return float(np.max(np.abs(F.values - exact)) / np.max(np.abs(exact)))


@check("disk_series_k5", 1e-8, suite="full")
def disk_series_k5(threads):
    angles = full_aperture_angles(64)
    F = multistatic(builtin_scene("disk"), 5.0, angles, angles, 128, threads)
    exact = sound_soft_disk_far_field(5.0, 1.0, angles, angles)
    return float(np.max(np.abs(F.values - exact)) / np.max(np.abs(exact)))


@check("obstacle_reciprocity", 1e-7)
def obstacle_reciprocity(threads):
    angles = full_aperture_angles(32)
    F = multistatic(builtin_scene("kite_ball"), 5.0, angles, angles, 128, threads)
    return reciprocity_gap(F, relative=False)


@check("rough_surface_reciprocity", 1e-6, suite="full")
def rough_reciprocity(threads):
    factory = scattering_factory("rough_surface")
    F = factory.create_far_field(builtin_scene("bump_ball"), 5.0, 32, threads=threads)
    return reciprocity_gap(F, relative=False)


@check("nontriviality", 1e-6, comparison=">=")
def nontriviality(threads):
    smallest = np.inf
    for name in ("kite_ball", "circle_ball", "ball_only"):
        scene = builtin_scene(name)
        angles = full_aperture_angles(32)
        F = multistatic(scene, GOLDEN_WAVENUMBERS["obstacle"], angles, angles[:1], 96, threads)
        smallest = min(smallest, float(np.max(np.abs(F.values[:, 0]))))
    return smallest


@check("translation_invariance_single", 1e-13)
def translation_single(threads):
    angles = full_aperture_angles(64)
    F = far_field_matrix(sound_soft_disk_far_field(5.0, 1.0, angles, angles), angles, angles, 5.0)
    return invariance_gap(F, (0.1, 0.0), 0.0, superposition=False)


@check("translation_breaking_superposition", 1e-2, comparison=">=")
def translation_superposition(threads):
    angles = full_aperture_angles(64)
    F = far_field_matrix(sound_soft_disk_far_field(5.0, 1.0, angles, angles), angles, angles, 5.0)
    return invariance_gap(F, (0.1, 0.0), 0.0, superposition=True)


@check("triangle_inequalities", 1e-12)
def triangle_inequalities(threads):
    angles = full_aperture_angles(32)
    F = far_field_matrix(sound_soft_disk_far_field(5.0, 1.0, angles, angles, (0.3, -0.2)),
                         angles, angles, 5.0)
    return triangle_violation(synthesize_dataset(F, angles[3]))


@check("lsm_gauge_invariance", 1e-10)
def lsm_gauge(threads):
    angles = full_aperture_angles(32)
    F = far_field_matrix(sound_soft_disk_far_field(5.0, 0.5, angles, angles), angles, angles, 5.0)
    rotated = with_values(F, F.values * np.exp(1j * 0.7))
    norm, _, _ = lsm_solve(F, (0.1, 0.2))
    rotated_norm, _, _ = lsm_solve(rotated, (0.1, 0.2))
    return abs(norm - rotated_norm) / norm


@check("empty_medium_far_field", 1e-14)
def empty_medium(threads):
    angles = full_aperture_angles(16)
    F = multistatic_medium(Scene("medium", 1.0, medium=MediumSpec()), 2.0, angles, angles)
    return float(np.max(np.abs(F.values)))


@check("transmission_radius_validator", 0.5, comparison=">=")
def transmission_validator(threads):
    k, n0 = 2.0, 2.0
    bound = transmission_radius_bound(k, n0)

    def flagged(radius):
        scene = Scene("medium", 0.5, ball=ReferenceBall((1.5, 0.0), radius, n0),
                      medium=MediumSpec())
        return "transmission_radius" in validate_scene(scene, k).codes

    return float(flagged(bound) and not flagged(0.9 * bound))


@check("medium_disk_series", 1e-4, suite="full")
def medium_series(threads):
    k, radius, index = 2.0, 0.6, 1.5
    angles = full_aperture_angles(32)
    scene = Scene("medium", 1.0, medium=MediumSpec(
        (MediumInclusion("disk", (0.0, 0.0), (radius,), index),)
    ))
    F = multistatic_medium(scene, k, angles, angles, 64, threads)
    exact = penetrable_disk_far_field(k, radius, index, angles, angles)
    return float(np.max(np.abs(F.values - exact)) / np.max(np.abs(exact)))


@check("phase_recovery_error", 1e-4, suite="full")
def recovery_error(threads):
    F, rec = _kite_ball_recovery(threads)
    return gauge_aligned_error(rec.far_field, F)[0]


@check("branch_score_ratio", 10.0, comparison=">=", suite="full")
def branch_ratio(threads):
    return _kite_ball_recovery(threads)[1].branch_score_ratio


@check("conjugate_branch_localizes_reflection", 0.1, suite="full")
def conjugate_branch(threads):
    F = _kite_ball_far_field(threads)
    scene = builtin_scene("kite_ball")
    return probe_ratio(with_values(F, np.conj(F.values)), scene.ball.center)


@check("mirrored_prior_flips_branch", 0.5, comparison=">=", suite="full")
def mirrored_prior(threads):
    F = _kite_ball_far_field(threads)
    dataset = synthesize_dataset(F, 0.0)
    rp = resolve_signs(relative_phase(dataset))
    candidates = absolute_phase(rp, dataset)
    ball = builtin_scene("kite_ball").ball
    chosen = disambiguate_branch(candidates, ball).branch
    flipped = disambiguate_branch(candidates, ball.reflected()).branch
    return float(chosen != flipped)


@check("gauge_injection", 1e-6, suite="full")
def gauge_injection(threads):
    F = _kite_ball_far_field(threads)
    scene = builtin_scene("kite_ball")
    gauge = np.exp(1j * np.pi / 3)
    injected = fix_global_phase(
        RecoveredField(with_values(F, F.values * gauge), "direct", 10.0),
        scene.ball, scene.R,
    )
    return abs(injected.report["gauge_constant"] - np.conj(gauge))


@check("gauge_boundary_residual", 1e-4, suite="full")
def gauge_residual(threads):
    F, rec = _kite_ball_recovery(threads)
    return rec.report.get("boundary_residual", np.inf)


@check("lsm_support_localization", 1.0, comparison=">=", suite="full")
def lsm_localization(threads):
    _, rec = _kite_ball_recovery(threads)
    ball = builtin_scene("kite_ball").ball
    extent = 3.0
    indicator = indicator_map(rec.far_field, (-extent, extent), (-extent, extent), (61, 61),
                              threads=threads)
    kite_centroid = make_curve("kite", {"scale": 0.5}).samples().mean(axis=0)
    inside = (superlevel_contains(indicator, kite_centroid)
              and superlevel_contains(indicator, ball.center))
    outside = not superlevel_contains(indicator, ball.reflected().center)
    return float(inside and outside)


def _distinctness(first: str, second: str, threads: int) -> float:
    datasets = []
    for name in (first, second):
        scene = builtin_scene(name)
        factory = scattering_factory(scene.variant)
        F = factory.create_far_field(scene, GOLDEN_WAVENUMBERS[scene.variant], 32, threads=threads)
        datasets.append(synthesize_dataset(F, float(F["incidence"].values[0])))
    return dataset_gap(*datasets)


@check("distinctness_kite_circle", 1e-2, comparison=">=", suite="full")
def distinct_kite_circle(threads):
    return _distinctness("kite_ball", "circle_ball", threads)


@check("distinctness_kite_bump", 1e-5, comparison=">=", suite="full")
def distinct_kite_bump(threads):
    return _distinctness("kite_ball", "kite_bump_ball", threads)


@check("distinctness_medium", 1e-3, comparison=">=", suite="full")
def distinct_medium(threads):
    return _distinctness("medium_disk_ball", "medium_square_ball", threads)


@check("distinctness_rough_surface", 1e-3, comparison=">=", suite="full")
def distinct_rough(threads):
    return _distinctness("bump_ball", "double_bump_ball", threads)


def _run_check(name, threshold, comparison, func, threads) -> CheckResult:
    start = time.perf_counter()
    try:
        value = float(func(threads))
        passed = value <= threshold if comparison == "<=" else value >= threshold
        detail = ""
    except Exception as e:
        logger.exception(f"Check {name} raised")
        value, passed, detail = float("nan"), False, f"{type(e).__name__}: {e}"
    return CheckResult(name, bool(passed), value, threshold, comparison,
                       time.perf_counter() - start, detail)


def run_suite(suite: str = "fast", output: str = ".", threads: int = 1) -> List[CheckResult]:
    """
    Runs a suite and writes its report

    Args:
        suite(str): "fast" or "full"
        output(str): directory of validate_report.json
        threads(int): worker threads handed to the solvers

    Returns:
        List[CheckResult]: one result per check
    """
    if suite not in SUITES:
        raise ValueError(f"Unknown suite {suite}, choose one of {SUITES}")
    results = [
        _run_check(name, threshold, comparison, func, threads)
        for name, threshold, comparison, func in _CHECKS[suite]
    ]
    os.makedirs(output, exist_ok=True)
    with open(os.path.join(output, REPORT_FILE), "w") as handle:
        json.dump(
            {"suite": suite, "passed": all(r.passed for r in results),
             "scenes": sorted(BUILTIN_SCENES), "checks": [asdict(r) for r in results]},
            handle, indent=2,
        )
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        logger.info(
            f"{status} {result.name}: {result.value:.3e} {result.comparison} "
            f"{result.threshold:.1e} ({result.seconds:.1f} s) {result.detail}"
        )
    return results


def summary(results: List[CheckResult]) -> str:
    failed = [r.name for r in results if not r.passed]
    line = f"{len(results) - len(failed)}/{len(results)} checks passed"
    return line if not failed else f"{line}; failed: {', '.join(failed)}"
