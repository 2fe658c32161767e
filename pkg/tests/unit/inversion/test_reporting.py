import os

import numpy as np
import xarray as xr
from phaseless_farfield.inversion.reporting import (
    normalized,
    write_indicator_svg,
    write_phase_error_svg,
)
from tests.unit.inversion.sample_data import small_disk  # NOQA


def test_normalized():
    """Test to confirm min-max normalization and the constant case"""
    np.testing.assert_allclose(normalized([2.0, 4.0, 3.0]), [0.0, 1.0, 0.5])
    np.testing.assert_array_equal(normalized(np.full(3, 7.0)), np.zeros(3))


def test_svg_files(tmp_path, small_disk):  # NOQA
    """Test to confirm both heatmaps are written as SVG documents"""
    indicator = xr.Dataset(
        {"indicator": (("y", "x"), np.arange(12.0).reshape(3, 4))},
        coords={"x": np.linspace(-1, 1, 4), "y": np.linspace(0, 1, 3)},
    )
    indicator_path = str(tmp_path / "plots" / "indicator_map.svg")
    error_path = str(tmp_path / "phase_error.svg")
    write_indicator_svg(indicator_path, indicator)
    write_phase_error_svg(error_path, small_disk * 1.01, small_disk)
    for path in (indicator_path, error_path):
        assert os.path.getsize(path) > 0
        with open(path) as handle:
            assert "<svg" in handle.read()
