"""
Experiment configuration. A config is a JSON document whose keys are the
fields of ExperimentConfig; the scene is either a path to a scene document
(relative to the config file) or "builtin:<name>".
"""
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

from ..geometry.scene import Scene, validate_scene
from ..geometry.scenes import GOLDEN_WAVENUMBERS, builtin_scene
from ..geometry.serialization import scene_from_dict, scene_to_dict
from ..utilities.exceptions import ConfigError
from ..utilities.general_utilities import dataclass_from_dict

logger = logging.getLogger(__name__)

STAGES = ("forward", "phaseless", "recover", "invert")
BUILTIN_PREFIX = "builtin:"


@dataclass
class ExperimentConfig:
    scene: str
    k: Optional[float] = None
    n_obs: int = 64
    n_inc: int = 64
    quadrature_nodes: Optional[int] = None
    medium_cells_per_wavelength: Optional[int] = None
    lsm_grid: int = 41
    lsm_extent: Optional[float] = None
    d0_index: int = 0
    noise_level: float = 0.0
    seed: Optional[int] = None
    output: str = "output"
    stages: List[str] = field(default_factory=lambda: list(STAGES))
    sign_method: str = "auto"
    fix_global_phase: bool = True
    base_dir: str = ""

    def __post_init__(self):
        unknown = set(self.stages) - set(STAGES)
        if unknown:
            raise ConfigError(f"Unknown stages {sorted(unknown)}, choose from {STAGES}")
        if self.k is not None and self.k <= 0:
            raise ConfigError(f"Wave number must be positive, got {self.k}")
        if "recover" in self.stages and self.n_obs != self.n_inc:
            raise ConfigError(
                f"Phase recovery pairs observation and incident directions, "
                f"n_obs = {self.n_obs} and n_inc = {self.n_inc} must agree"
            )
        if not 0 <= self.d0_index < self.n_inc:
            raise ConfigError(f"d0_index {self.d0_index} outside the {self.n_inc} incident directions")
        if not 0 <= self.noise_level < 1:
            raise ConfigError(f"noise_level must lie in [0, 1), got {self.noise_level}")
        if self.lsm_grid < 2:
            raise ConfigError("lsm_grid needs at least 2 probes per axis")
        if not self.scene.startswith(BUILTIN_PREFIX) and not os.path.exists(self.scene_path):
            raise ConfigError(f"Scene file {self.scene_path} does not exist")

    @property
    def scene_path(self) -> str:
        return os.path.join(self.base_dir, self.scene)

    def ordered_stages(self) -> List[str]:
        return [stage for stage in STAGES if stage in self.stages]

    def to_dict(self) -> Dict:
        document = asdict(self)
        document.pop("base_dir")
        return document


def config_from_dict(document: Dict, base_dir: str = "") -> ExperimentConfig:
    document = dict(document)
    document.setdefault("base_dir", base_dir)
    return dataclass_from_dict(ExperimentConfig, document)


def load_config(path: str, overrides: Optional[Dict] = None) -> ExperimentConfig:
    """
    Reads a config file

    Args:
        path(str): JSON config path
        overrides(Dict): values taken over the file's, None values are skipped

    Returns:
        ExperimentConfig: validated config
    """
    if not os.path.exists(path):
        raise ConfigError(f"Config file {path} does not exist")
    try:
        with open(path) as handle:
            document = json.load(handle)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}") from e
    document.update({key: value for key, value in (overrides or {}).items() if value is not None})
    return config_from_dict(document, os.path.dirname(os.path.abspath(path)))


def load_scene(config: ExperimentConfig) -> Tuple[Scene, Dict]:
    """The scene and the document it was built from, for hashing"""
    if config.scene.startswith(BUILTIN_PREFIX):
        try:
            scene = builtin_scene(config.scene[len(BUILTIN_PREFIX):])
        except KeyError as e:
            raise ConfigError(str(e)) from e
        return scene, scene_to_dict(scene)
    try:
        with open(config.scene_path) as handle:
            document = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read scene file {config.scene_path}: {e}") from e
    return scene_from_dict(document, os.path.dirname(config.scene_path)), document


def wavenumber(config: ExperimentConfig, scene: Scene) -> float:
    return config.k if config.k is not None else GOLDEN_WAVENUMBERS[scene.variant]


def checked_scene(config: ExperimentConfig) -> Tuple[Scene, Dict, float]:
    """Loads the scene and rejects it if inadmissible at the configured wave number"""
    scene, document = load_scene(config)
    k = wavenumber(config, scene)
    validate_scene(scene, k).raise_for_errors()
    return scene, document, k
