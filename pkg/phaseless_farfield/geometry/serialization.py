"""Scene documents: JSON trees mirroring the Scene dataclasses"""
import logging
import os
from typing import Dict, Optional

import numpy as np

from ..utilities.exceptions import ConfigError, InvalidGeometryError
from .curves import make_curve
from .scene import (
    MediumInclusion,
    MediumSpec,
    ObstacleComponent,
    ReferenceBall,
    Scene,
)
from .surface import SurfaceProfile

logger = logging.getLogger(__name__)


def _complex_to_list(value) -> list:
    value = complex(value)
    return [value.real, value.imag]


def _complex_from(value) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def scene_to_dict(scene: Scene) -> Dict:
    """
    Serializes a scene

    Args:
        scene(Scene): scene to serialize, rasters are not embedded

    Returns:
        Dict: JSON-serializable document
    """
    document = {"variant": scene.variant, "R": scene.R, "name": scene.name}
    if scene.ball is not None:
        document["ball"] = {
            "center": list(scene.ball.center),
            "radius": scene.ball.radius,
        }
        if scene.ball.index is not None:
            document["ball"]["index"] = scene.ball.index
    if scene.obstacles:
        document["obstacles"] = []
        for component in scene.obstacles:
            entry = {
                "curve": component.curve.to_dict(),
                "boundary_condition": component.boundary_condition,
            }
            if component.impedance is not None:
                entry["impedance"] = [_complex_to_list(v) for v in component.impedance]
            document["obstacles"].append(entry)
    if scene.medium is not None:
        document["medium"] = {
            "inclusions": [
                {
                    "kind": inclusion.kind,
                    "center": list(inclusion.center),
                    "size": list(inclusion.size),
                    "index": _complex_to_list(inclusion.index),
                }
                for inclusion in scene.medium.inclusions
            ]
        }
        if scene.medium.raster is not None:
            logger.warning("Medium raster is not embedded in the scene document")
    if scene.surface is not None:
        document["surface"] = scene.surface.to_dict()
    return document


def scene_from_dict(document: Dict, base_dir: Optional[str] = None) -> Scene:
    """
    Builds a scene from its document

    Args:
        document(Dict): scene document
        base_dir(str): directory that relative raster paths refer to

    Returns:
        Scene: the scene, curves validated
    """
    try:
        ball = None
        if "ball" in document:
            ball_document = document["ball"]
            ball = ReferenceBall(
                tuple(ball_document["center"]),
                float(ball_document["radius"]),
                ball_document.get("index"),
            )
        obstacles = []
        for entry in document.get("obstacles", ()):
            curve_document = dict(entry["curve"])
            kind = curve_document.pop("kind")
            impedance = entry.get("impedance")
            if impedance is not None:
                impedance = tuple(_complex_from(v) for v in impedance)
            obstacles.append(
                ObstacleComponent(
                    make_curve(kind, curve_document),
                    entry.get("boundary_condition", "dirichlet"),
                    impedance,
                )
            )
        medium = None
        if "medium" in document:
            medium_document = document["medium"]
            inclusions = tuple(
                MediumInclusion(
                    inclusion["kind"],
                    tuple(inclusion["center"]),
                    tuple(float(s) for s in np.atleast_1d(inclusion["size"])),
                    _complex_from(inclusion["index"]),
                )
                for inclusion in medium_document.get("inclusions", ())
            )
            raster = None
            if "raster" in medium_document:
                from ..data_container.csv_io import read_medium_raster

                path = medium_document["raster"]
                if base_dir is not None and not os.path.isabs(path):
                    path = os.path.join(base_dir, path)
                raster = read_medium_raster(path)
            medium = MediumSpec(inclusions, raster)
        surface = None
        if "surface" in document:
            surface_document = dict(document["surface"])
            kind = surface_document.pop("kind", "flat")
            surface = SurfaceProfile(kind, surface_document)
        return Scene(
            variant=document["variant"],
            R=float(document["R"]),
            ball=ball,
            obstacles=tuple(obstacles),
            medium=medium,
            surface=surface,
            name=document.get("name", ""),
        )
    except InvalidGeometryError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"Malformed scene document: {e!r}") from e
