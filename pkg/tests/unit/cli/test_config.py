import json

import pytest
from phaseless_farfield.cli.config import (
    checked_scene,
    config_from_dict,
    load_config,
    load_scene,
    wavenumber,
)
from phaseless_farfield.geometry.scenes import builtin_scene
from phaseless_farfield.geometry.serialization import scene_to_dict
from phaseless_farfield.utilities.exceptions import ConfigError, InvalidGeometryError
from tests.unit.cli.sample_data import config_writer  # NOQA


@pytest.mark.parametrize(
    "values, exception",
    [
        ({}, None),
        ({"stages": ["forward", "phaseless"], "n_inc": 16}, None),
        ({"stages": ["forward", "render"]}, ConfigError),
        ({"k": -2.0}, ConfigError),
        ({"n_inc": 16}, ConfigError),
        ({"d0_index": 32}, ConfigError),
        ({"noise_level": 1.0}, ConfigError),
        ({"lsm_grid": 1}, ConfigError),
        ({"scene": "missing_scene.json"}, ConfigError),
        ({"colour": "blue"}, ConfigError),
    ],
)
def test_config_validation(values, exception):
    """Test to confirm invalid configs are rejected with a config error"""
    document = dict({"scene": "builtin:kite_ball", "n_obs": 32, "n_inc": 32}, **values)
    if exception is None:
        config = config_from_dict(document)
        assert config.ordered_stages()[0] == "forward"
    else:
        with pytest.raises(exception):
            config_from_dict(document)


def test_missing_scene_is_named():
    """Test to confirm the error for a missing scene file names the path"""
    with pytest.raises(ConfigError) as error:
        config_from_dict({"scene": "scenes/kite.json"}, "/experiments")
    assert "/experiments/scenes/kite.json" in str(error.value)


def test_overrides_and_relative_scene(tmp_path, config_writer):  # NOQA
    """Test to confirm command-line overrides win and scene paths are relative to the config"""
    (tmp_path / "kite.json").write_text(json.dumps(scene_to_dict(builtin_scene("kite_ball"))))
    path = config_writer(scene="kite.json", k=None)
    config = load_config(path, {"seed": 9, "output": None})
    assert config.seed == 9
    assert config.output.endswith("output")
    scene, document = load_scene(config)
    assert scene.name == "kite_ball"
    assert wavenumber(config, scene) == 5.0
    assert "base_dir" not in config.to_dict()


@pytest.mark.parametrize("content", [None, "{not json"])
def test_unreadable_config(tmp_path, content):
    """Test to confirm missing or malformed config files raise config errors"""
    path = tmp_path / "broken.json"
    if content is not None:
        path.write_text(content)
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_unknown_builtin_scene():
    """Test to confirm unknown built-in scenes are config errors"""
    with pytest.raises(ConfigError):
        load_scene(config_from_dict({"scene": "builtin:teapot"}))


def test_inadmissible_scene_file(tmp_path):
    """Test to confirm the loaded scene is validated before any stage runs"""
    document = scene_to_dict(builtin_scene("ball_only"))
    document["ball"]["center"] = [0.5, 0.0]
    (tmp_path / "overlap.json").write_text(json.dumps(document))
    config = config_from_dict({"scene": "overlap.json"}, str(tmp_path))
    with pytest.raises(InvalidGeometryError):
        checked_scene(config)
