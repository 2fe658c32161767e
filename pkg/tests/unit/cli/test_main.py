import os
from types import SimpleNamespace

import pytest
from mock import patch
from phaseless_farfield.cli.main import main
from tests.unit.cli.sample_data import ball_only_factory, config_writer  # NOQA


def test_missing_config_is_usage_error(tmp_path):
    """Test to confirm a missing config file exits with status 2"""
    assert main(["run", "--config", str(tmp_path / "absent.json")]) == 2


def test_no_verb_is_rejected():
    """Test to confirm argparse rejects a call without a verb"""
    with pytest.raises(SystemExit) as error:
        main([])
    assert error.value.code == 2


def test_stage_without_upstream_exits_with_data_error(config_writer):  # NOQA
    """Test to confirm invert on an empty output directory exits with status 3"""
    assert main(["invert", "--config", config_writer()]) == 3


def test_forward_verb_honours_out(tmp_path, config_writer, ball_only_factory):  # NOQA
    """Test to confirm --out overrides the configured output directory"""
    out = tmp_path / "elsewhere"
    with patch("phaseless_farfield.cli.pipeline.scattering_factory",
               return_value=ball_only_factory()):
        status = main(["forward", "--config", config_writer(), "--out", str(out)])
    assert status == 0
    assert os.path.exists(out / "far_field.csv")
    assert not os.path.exists(tmp_path / "output")


@pytest.mark.parametrize("passed, status", [((True, True), 0), ((True, False), 3)])
def test_validate_status(tmp_path, passed, status):
    """Test to confirm validate exits 3 when any check fails"""
    results = [SimpleNamespace(passed=value) for value in passed]
    with patch("phaseless_farfield.cli.main.run_suite", return_value=results) as suite, \
            patch("phaseless_farfield.cli.main.summary", return_value="summary"):
        assert main(["validate", "--suite", "fast", "--out", str(tmp_path)]) == status
    suite.assert_called_once_with("fast", str(tmp_path), 1)
