"""SVG heatmaps of indicator maps and phase errors"""
import logging
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # NOQA: E402
import numpy as np  # NOQA: E402
import xarray as xr  # NOQA: E402

logger = logging.getLogger(__name__)


def normalized(values: np.ndarray) -> np.ndarray:
    """Min-max normalization to [0, 1], constant arrays map to 0"""
    values = np.asarray(values, dtype=float)
    span = np.max(values) - np.min(values)
    if span <= 0:
        return np.zeros_like(values)
    return (values - np.min(values)) / span


def _save_heatmap(path, values, extent, xlabel, ylabel, title):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    fig, ax = plt.subplots(figsize=(5, 5))
    # row 0 is the smallest y, drawn at the bottom
    ax.imshow(
        values, cmap="gray", origin="lower", extent=extent,
        vmin=0.0, vmax=1.0, interpolation="nearest", aspect="auto",
    )
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)
    logger.debug(f"Wrote heatmap {path}")


def _extent(first: np.ndarray, second: np.ndarray):
    return [float(first[0]), float(first[-1]), float(second[0]), float(second[-1])]


def write_indicator_svg(path: str, indicator: xr.Dataset, title: str = "LSM indicator"):
    """
    Grayscale heatmap of the normalized indicator, pixel (i, j) showing the
    probe (x[j], y[i]) with y increasing upwards
    """
    values = normalized(indicator["indicator"].transpose("y", "x").values)
    _save_heatmap(
        path, values, _extent(indicator["x"].values, indicator["y"].values),
        "x", "y", title,
    )


def write_phase_error_svg(path: str, recovered: xr.DataArray, truth: xr.DataArray):
    """Heatmap of |F_rec - F_true| over (incidence, observation) angles"""
    error = np.abs(recovered.values - truth.values)
    _save_heatmap(
        path, normalized(error),
        _extent(truth["incidence"].values, truth["observation"].values),
        "incidence angle", "observation angle",
        f"|F_rec - F_true|, max {float(np.max(error)):.3e}",
    )
