"""
File-based experiment stages. Each stage reads the files of its upstream
stage and writes its own, and records in manifest.json the hash of the
config fields it depends on chained with its upstream hash. A stage whose
hash and files are current is skipped; a stage whose upstream is missing or
was produced from a different config refuses to run.
"""
import json
import logging
import os
from typing import Callable, Dict, List

import numpy as np

from ..data_container.csv_io import (
    read_far_field,
    read_phaseless_dataset,
    write_far_field,
    write_indicator_map,
    write_phaseless_dataset,
    write_recovered_field,
)
from ..data_container.phaseless import synthesize_dataset
from ..forward.solver_factory import scattering_factory
from ..inversion.lsm import indicator_map
from ..inversion.reporting import write_indicator_svg, write_phase_error_svg
from ..recovery.phase_recovery import gauge_aligned_error, recover_far_field
from ..utilities.exceptions import ConfigError, StaleUpstreamError
from ..utilities.general_utilities import config_hash
from ..version import __version__
from .config import ExperimentConfig, checked_scene

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
FAR_FIELD_FILE = "far_field.csv"
RECOVERED_FILE = "recovered_field.csv"
INDICATOR_FILE = "indicator_map.csv"

UPSTREAM = {"forward": None, "phaseless": "forward", "recover": "phaseless", "invert": "recover"}
STAGE_KEYS = {
    "forward": ("k", "n_obs", "n_inc", "quadrature_nodes", "medium_cells_per_wavelength"),
    "phaseless": ("d0_index", "noise_level", "seed"),
    "recover": ("sign_method", "fix_global_phase"),
    "invert": ("lsm_grid", "lsm_extent"),
}
STAGE_FILES = {
    "forward": [FAR_FIELD_FILE],
    "phaseless": ["phaseless_single.csv", "phaseless_ref.csv", "phaseless_super.csv"],
    "recover": [RECOVERED_FILE, "recovered_field.json"],
    "invert": [INDICATOR_FILE, "indicator_map.svg"],
}


def read_manifest(directory: str) -> Dict:
    path = os.path.join(directory, MANIFEST)
    if not os.path.exists(path):
        return {"stages": {}}
    with open(path) as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Corrupt manifest {path}: {e}") from e


def write_manifest(directory: str, manifest: Dict):
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, MANIFEST), "w") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)


class Pipeline:
    """
    Runs the configured stages in order

    Args:
        config(ExperimentConfig): the experiment
        threads(int): worker threads handed to the solvers
    """

    def __init__(self, config: ExperimentConfig, threads: int = 1):
        self.config = config
        self.threads = threads
        self.directory = config.output
        self.scene, self.scene_document, self.k = checked_scene(config)
        self.hashes = self._stage_hashes()
        self.stages: Dict[str, Callable[[], Dict]] = {
            "forward": self.forward,
            "phaseless": self.phaseless,
            "recover": self.recover,
            "invert": self.invert,
        }

    def _stage_hashes(self) -> Dict[str, str]:
        document = self.config.to_dict()
        document["k"] = self.k
        hashes = {}
        upstream = config_hash(self.scene_document)
        for stage, keys in STAGE_KEYS.items():
            upstream = config_hash(
                {"stage": stage, "upstream": upstream},
                {key: document[key] for key in keys},
            )
            hashes[stage] = upstream
        return hashes

    def path(self, filename: str) -> str:
        return os.path.join(self.directory, filename)

    def provenance(self, stage: str) -> Dict:
        return {
            "config_hash": self.hashes[stage],
            "stage": stage,
            "scene": self.scene.name,
            "version": __version__,
        }

    def is_current(self, stage: str, manifest: Dict) -> bool:
        entry = manifest["stages"].get(stage)
        return (
            entry is not None
            and entry.get("hash") == self.hashes[stage]
            and all(os.path.exists(self.path(name)) for name in STAGE_FILES[stage])
        )

    def check_upstream(self, stage: str, manifest: Dict):
        upstream = UPSTREAM[stage]
        if upstream is None:
            return
        entry = manifest["stages"].get(upstream)
        if entry is None:
            raise StaleUpstreamError(
                f"Stage {stage} needs the outputs of {upstream} in {self.directory}, "
                f"run {upstream} first"
            )
        if not self.is_current(upstream, manifest):
            raise StaleUpstreamError(
                f"Outputs of {upstream} in {self.directory} were produced with hash "
                f"{entry.get('hash', '')[:12]}, the current config expects "
                f"{self.hashes[upstream][:12]}; rerun {upstream}"
            )

    def run(self, stages: List[str] = None) -> Dict[str, Dict]:
        """
        Runs stages, skipping those whose outputs are current

        Returns:
            Dict: per stage, its summary or {"skipped": True}
        """
        summaries = {}
        for stage in stages or self.config.ordered_stages():
            manifest = read_manifest(self.directory)
            if self.is_current(stage, manifest):
                logger.info(f"Stage {stage} is up to date, skipping")
                summaries[stage] = {"skipped": True}
                continue
            self.check_upstream(stage, manifest)
            logger.info(f"Running stage {stage}")
            summary = self.stages[stage]()
            manifest = read_manifest(self.directory)
            manifest["stages"][stage] = {
                "hash": self.hashes[stage],
                "files": STAGE_FILES[stage],
                "summary": summary,
            }
            manifest["config_hash"] = self.hashes[stage]
            write_manifest(self.directory, manifest)
            summaries[stage] = summary
        return summaries

    def forward(self) -> Dict:
        factory = scattering_factory(self.scene.variant)
        resolution = (
            self.config.medium_cells_per_wavelength
            if self.scene.variant == "medium" else self.config.quadrature_nodes
        )
        F = factory.create_far_field(
            self.scene, self.k, self.config.n_obs, self.config.n_inc,
            resolution=resolution, threads=self.threads,
        )
        write_far_field(self.path(FAR_FIELD_FILE), F, self.provenance("forward"))
        summary = {"max_modulus": float(np.max(np.abs(F.values)))}
        if self.scene.variant == "medium":
            # piecewise-constant indices lie outside the class uniqueness is known for
            summary["medium_class"] = "illustrative"
        return summary

    def phaseless(self) -> Dict:
        F = read_far_field(self.path(FAR_FIELD_FILE))
        d0 = float(F["incidence"].values[self.config.d0_index])
        dataset = synthesize_dataset(F, d0, self.config.noise_level, self.config.seed)
        write_phaseless_dataset(self.directory, dataset, self.provenance("phaseless"))
        return {"d0": d0, "noise_level": self.config.noise_level}

    def recover(self) -> Dict:
        if self.scene.ball is None:
            raise ConfigError("Phase recovery needs a reference ball in the scene")
        dataset = read_phaseless_dataset(self.directory)
        rec = recover_far_field(
            dataset, self.scene.ball, self.scene.R,
            fix_phase=self.config.fix_global_phase,
            sign_method=self.config.sign_method,
            noise_level=self.config.noise_level,
        )
        report = dict(
            rec.report,
            branch=rec.branch,
            branch_score_ratio=rec.branch_score_ratio,
            global_phase_fixed=rec.global_phase_fixed,
        )
        truth = read_far_field(self.path(FAR_FIELD_FILE))
        error, constant = gauge_aligned_error(rec.far_field, truth)
        report.update(gauge_aligned_error=error, alignment_constant=constant)
        write_recovered_field(
            self.path(RECOVERED_FILE), rec.far_field, report, self.provenance("recover")
        )
        write_phase_error_svg(self.path("phase_error.svg"), rec.far_field * constant, truth)
        return {
            "branch": rec.branch,
            "branch_score_ratio": rec.branch_score_ratio,
            "gauge_aligned_error": error,
        }

    def probe_extent(self) -> float:
        if self.config.lsm_extent is not None:
            return self.config.lsm_extent
        extent = self.scene.R
        if self.scene.ball is not None:
            extent = max(extent, float(np.max(np.abs(self.scene.ball.center))) + self.scene.ball.radius)
        return extent + 0.5

    def invert(self) -> Dict:
        F = read_far_field(self.path(RECOVERED_FILE))
        extent = self.probe_extent()
        indicator = indicator_map(
            F, (-extent, extent), (-extent, extent),
            (self.config.lsm_grid, self.config.lsm_grid),
            noise_level=self.config.noise_level, threads=self.threads,
        )
        write_indicator_map(self.path(INDICATOR_FILE), indicator, self.provenance("invert"))
        write_indicator_svg(self.path("indicator_map.svg"), indicator)
        return {"extent": extent, "max_indicator": float(indicator["indicator"].max())}
