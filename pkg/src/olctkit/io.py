"""JSON (de)serialisation: sig-json signals, spectra, surfaces and reports."""

from __future__ import annotations

import json
import math

import numpy as np

from .core import Grid, SampledSignal


class FormatError(ValueError):
    pass


def _finite_list(name, values):
    out = [float(v) for v in values]
    if not all(math.isfinite(v) for v in out):
        raise FormatError(f"{name!r} contains NaN or Inf")
    return out


def _complex_from(obj, shape=None):
    if "re" not in obj or "im" not in obj:
        raise FormatError("missing 're'/'im' arrays")
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"sample arrays must be numeric: {exc}") from exc
    if re.shape != im.shape:
        raise FormatError(f"'re' and 'im' differ in shape: {re.shape} vs {im.shape}")
    if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
        raise FormatError("sample arrays contain NaN or Inf")
    return re + 1j * im


def signal_to_dict(x: SampledSignal) -> dict:
    return {
        "origin": x.origin,
        "step": x.step,
        "re": _finite_list("re", x.samples.real),
        "im": _finite_list("im", x.samples.imag),
    }


def signal_from_dict(obj: dict) -> SampledSignal:
    vals = _complex_from(obj)
    if vals.ndim != 1:
        raise FormatError("signal arrays must be one-dimensional")
    step = float(obj.get("step", 1.0))
    if not math.isfinite(step) or step <= 0:
        raise FormatError(f"invalid step {step!r}")
    return SampledSignal(vals, int(obj.get("origin", 0)), step)


def grid_from_dict(obj: dict) -> Grid:
    try:
        return Grid(float(obj["start"]), float(obj["step"]), int(obj["count"]))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad grid record {obj!r}") from exc


def spectrum_to_dict(spec) -> dict:
    return {
        "grid": spec.grid.to_dict(),
        "re": _finite_list("re", np.real(spec.values)),
        "im": _finite_list("im", np.imag(spec.values)),
    }


def spectrum_from_dict(obj: dict):
    from .transforms import Spectrum

    grid = grid_from_dict(obj["grid"])
    vals = _complex_from(obj)
    if vals.shape != (grid.count,):
        raise FormatError("spectrum length does not match its grid")
    return Spectrum(vals, grid)


def surface_to_dict(values, row_grid: Grid, col_grid: Grid, row_key: str, col_key: str) -> dict:
    values = np.asarray(values)
    return {
        row_key: row_grid.to_dict(),
        col_key: col_grid.to_dict(),
        "re": np.real(values).tolist(),
        "im": np.imag(values).tolist(),
    }


def surface_from_dict(obj: dict, row_key: str, col_key: str):
    rows, cols = grid_from_dict(obj[row_key]), grid_from_dict(obj[col_key])
    vals = _complex_from(obj)
    if vals.shape != (rows.count, cols.count):
        raise FormatError("surface shape does not match its grids")
    return vals, rows, cols


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, allow_nan=False)


def read_signal(path) -> SampledSignal:
    return signal_from_dict(read_json(path))


def write_signal(path, x: SampledSignal):
    write_json(path, signal_to_dict(x))
