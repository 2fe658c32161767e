"""
CSV import and export. Every file starts with "# " lines holding JSON
metadata (wave number, grids, provenance) followed by a pandas table.
Floats are written with their shortest round-trip repr and read back with
float_precision="round_trip", so export followed by import is bit-exact.
"""
import json
import logging
import os
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd
import xarray as xr

from ..geometry.scene import MediumRaster
from ..utilities.exceptions import ConfigError
from ..version import __version__
from .far_field import far_field_matrix, grids

logger = logging.getLogger(__name__)

HEADER_PREFIX = "# "
PHASELESS_FILES = {
    "mod_single": "phaseless_single.csv",
    "mod_ref": "phaseless_ref.csv",
    "mod_super": "phaseless_super.csv",
}


def write_table(path: str, df: pd.DataFrame, metadata: Dict):
    """Writes the JSON header line followed by the table"""
    metadata = dict(metadata)
    metadata.setdefault("version", __version__)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as handle:
        handle.write(HEADER_PREFIX + json.dumps(metadata, sort_keys=True) + "\n")
        df.to_csv(handle, index=False)
    logger.debug(f"Wrote {len(df)} rows to {path}")


def read_table(path: str) -> Tuple[pd.DataFrame, Dict]:
    """
    Reads a table written by write_table

    Args:
        path(str): CSV path

    Returns:
        Tuple: the table and the merged header metadata
    """
    if not os.path.exists(path):
        raise ConfigError(f"File {path} does not exist")
    metadata = {}
    with open(path) as handle:
        for line in handle:
            if not line.startswith(HEADER_PREFIX.strip()):
                break
            try:
                metadata.update(json.loads(line[1:].strip()))
            except json.JSONDecodeError as e:
                raise ConfigError(f"Malformed header in {path}: {e}") from e
    df = pd.read_csv(path, comment="#", float_precision="round_trip")
    return df, metadata


def read_metadata(path: str) -> Dict:
    return read_table(path)[1]


def write_far_field(path: str, F: xr.DataArray, metadata: Optional[Dict] = None):
    """Rows (m, n, re, im) with the grids in the header"""
    obs, inc = grids(F)
    m, n = np.meshgrid(np.arange(len(obs)), np.arange(len(inc)), indexing="ij")
    df = pd.DataFrame({
        "m": m.ravel(),
        "n": n.ravel(),
        "re": F.values.real.ravel(),
        "im": F.values.imag.ravel(),
    })
    header = {
        "kind": "far_field",
        "k": F.attrs["k"],
        "aperture": F.attrs["aperture"],
        "obs_angles": obs.tolist(),
        "inc_angles": inc.tolist(),
    }
    header.update(metadata or {})
    write_table(path, df, header)


def read_far_field(path: str) -> xr.DataArray:
    df, header = read_table(path)
    try:
        obs = np.asarray(header["obs_angles"], dtype=float)
        inc = np.asarray(header["inc_angles"], dtype=float)
        values = np.zeros((len(obs), len(inc)), dtype=complex)
        values[df["m"].values, df["n"].values] = df["re"].values + 1j * df["im"].values
        return far_field_matrix(values, obs, inc, header["k"], header["aperture"])
    except (KeyError, IndexError) as e:
        raise ConfigError(f"Malformed far-field file {path}: {e!r}") from e


def write_phaseless_dataset(directory: str, dataset: xr.Dataset,
                            metadata: Optional[Dict] = None):
    """The three moduli as separate files sharing one header"""
    header = {
        "kind": "phaseless",
        "obs_angles": dataset["observation"].values.tolist(),
        "inc_angles": dataset["incidence"].values.tolist(),
    }
    header.update(dataset.attrs)
    header.update(metadata or {})
    for name, filename in PHASELESS_FILES.items():
        values = dataset[name].values
        if values.ndim == 1:
            df = pd.DataFrame({"m": np.arange(len(values)), "value": values})
        else:
            m, n = np.meshgrid(
                np.arange(values.shape[0]), np.arange(values.shape[1]), indexing="ij"
            )
            df = pd.DataFrame({"m": m.ravel(), "n": n.ravel(), "value": values.ravel()})
        write_table(os.path.join(directory, filename), df, dict(header, variable=name))


def read_phaseless_dataset(directory: str) -> xr.Dataset:
    variables = {}
    header = {}
    for name, filename in PHASELESS_FILES.items():
        df, header = read_table(os.path.join(directory, filename))
        obs = np.asarray(header["obs_angles"], dtype=float)
        inc = np.asarray(header["inc_angles"], dtype=float)
        if "n" in df.columns:
            values = np.zeros((len(obs), len(inc)))
            values[df["m"].values, df["n"].values] = df["value"].values
            variables[name] = (("observation", "incidence"), values)
        else:
            values = np.zeros(len(obs))
            values[df["m"].values] = df["value"].values
            variables[name] = (("observation",), values)
    attrs = {
        key: header[key]
        for key in ("k", "aperture", "d0", "d0_index", "noise_level", "seed")
    }
    return xr.Dataset(variables, coords={"observation": obs, "incidence": inc}, attrs=attrs)


def write_medium_raster(path: str, raster: MediumRaster):
    rows, columns = raster.index.shape
    row, column = np.meshgrid(np.arange(rows), np.arange(columns), indexing="ij")
    df = pd.DataFrame({
        "row": row.ravel(),
        "column": column.ravel(),
        "re": raster.index.real.ravel(),
        "im": raster.index.imag.ravel(),
    })
    write_table(path, df, {
        "kind": "medium_raster", "origin": list(raster.origin), "h": raster.h,
        "rows": rows, "columns": columns,
    })


def read_medium_raster(path: str) -> MediumRaster:
    """
    Refractive index raster, cell (row, column) covering
    origin + h [column, column + 1] x [row, row + 1]
    """
    df, header = read_table(path)
    try:
        index = np.ones((int(header["rows"]), int(header["columns"])), dtype=complex)
        index[df["row"].values, df["column"].values] = df["re"].values + 1j * df["im"].values
        return MediumRaster(tuple(header["origin"]), float(header["h"]), index)
    except (KeyError, IndexError) as e:
        raise ConfigError(f"Malformed medium raster {path}: {e!r}") from e


def write_indicator_map(path: str, indicator: xr.Dataset, metadata: Optional[Dict] = None):
    """Indicator raster in row-major order, y the slow axis"""
    df = indicator.transpose("y", "x").to_dataframe().reset_index()
    header = {"kind": "indicator_map"}
    header.update(indicator.attrs)
    header.update(metadata or {})
    write_table(path, df[["y", "x", "indicator", "regularization", "discrepancy"]], header)


def read_indicator_map(path: str) -> xr.Dataset:
    df, header = read_table(path)
    indicator = df.set_index(["y", "x"]).to_xarray().transpose("y", "x")
    indicator.attrs.update(
        {key: value for key, value in header.items() if key not in ("kind", "version")}
    )
    return indicator


def write_recovered_field(path: str, F: xr.DataArray, report: Dict,
                          metadata: Optional[Dict] = None):
    """Recovered far field plus a JSON sidecar with branch, scores and residuals"""
    write_far_field(path, F, dict(metadata or {}, kind="recovered_field"))
    sidecar = os.path.splitext(path)[0] + ".json"
    with open(sidecar, "w") as handle:
        json.dump(report, handle, indent=2, sort_keys=True, default=_json_default)


def _json_default(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")
