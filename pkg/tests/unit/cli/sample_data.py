import json

import pytest
from phaseless_farfield.data_container.far_field import far_field_matrix
from phaseless_farfield.forward.analytic import sound_soft_disk_far_field
from phaseless_farfield.forward.incident import full_aperture_angles
from phaseless_farfield.geometry.scenes import builtin_scene


@pytest.fixture
def config_writer(tmp_path):
    """Writes a config next to an output directory and returns its path"""

    def write(**values):
        document = {"scene": "builtin:ball_only", "k": 5.0, "n_obs": 32, "n_inc": 32,
                    "lsm_grid": 5, "output": str(tmp_path / "output")}
        document.update(values)
        path = tmp_path / "experiment.json"
        path.write_text(json.dumps(document))
        return str(path)

    return write


@pytest.fixture
def ball_only_factory():
    """Stands in for the obstacle solver with the series far field of the reference ball"""
    ball = builtin_scene("ball_only").ball

    class SeriesFactory:
        aperture = "full"
        calls = 0

        def create_far_field(self, scene, k, obs_count, inc_count=None, resolution=None,
                             threads=1):
            SeriesFactory.calls += 1
            angles = full_aperture_angles(obs_count)
            values = sound_soft_disk_far_field(k, ball.radius, angles, angles, ball.center)
            return far_field_matrix(values, angles, angles, k)

    return SeriesFactory
