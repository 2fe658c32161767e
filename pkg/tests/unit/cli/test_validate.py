import json
import math

import pytest
from mock import patch
from phaseless_farfield.cli.validate import (
    REPORT_FILE,
    _CHECKS,
    quadrature_convergence,
    run_suite,
    summary,
)


def _failing(threads):
    raise ValueError("no convergence")


STUB_CHECKS = {
    "fast": [("small", 1e-3, "<=", lambda threads: 1e-4),
             ("large", 10.0, ">=", lambda threads: 2.0),
             ("raising", 1.0, "<=", _failing)],
    "full": [],
}


def test_fast_checks_are_part_of_full():
    """Test to confirm every fast check also runs in the full suite"""
    fast = [name for name, *_ in _CHECKS["fast"]]
    full = [name for name, *_ in _CHECKS["full"]]
    assert set(fast) < set(full)
    assert "disk_series_k1" in fast
    assert "disk_series_k5" not in fast


def test_suite_report(tmp_path):
    """Test to confirm results, the report file and the summary of a suite"""
    with patch.dict("phaseless_farfield.cli.validate._CHECKS", STUB_CHECKS, clear=True):
        results = run_suite("fast", str(tmp_path))
    assert [r.passed for r in results] == [True, False, False]
    assert math.isnan(results[2].value)
    assert results[2].detail.startswith("ValueError")
    report = json.loads((tmp_path / REPORT_FILE).read_text())
    assert report["passed"] is False
    assert [entry["name"] for entry in report["checks"]] == ["small", "large", "raising"]
    assert summary(results) == "1/3 checks passed; failed: large, raising"


def test_unknown_suite(tmp_path):
    """Test to confirm unknown suite names are rejected"""
    with pytest.raises(ValueError):
        run_suite("nightly", str(tmp_path))


def test_quadrature_check_passes_in_the_fast_suite():
    """Test to confirm the kite length agrees between 128 and 256 nodes within the check threshold"""
    registered = {name: threshold for name, threshold, *_ in _CHECKS["fast"]}
    assert registered["quadrature_spectral_convergence"] == 1e-10
    assert quadrature_convergence(1) <= 1e-10
