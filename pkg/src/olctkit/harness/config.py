"""Experiment configuration: JSON schema checks and matrix rules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import OLCTError, ParameterMatrix
from .generators import InvalidSpec, SignalSpec

SOLVERS = ("multi-olct", "stolct", "nonseparable", "bandlimited")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BandSettings:
    mode: str = "olct"
    band: tuple = ()
    radius: int = 64
    gamma: float | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    solver: str
    signal: SignalSpec
    output_path: str
    matrices: tuple = ()
    window: SignalSpec | None = None
    noise_levels: tuple = (0.0,)
    matrix_counts: tuple = ()
    trials: int = 1
    seed: int = 0
    floor: float | None = None
    u_points: int | None = None
    bandlimited: BandSettings | None = None
    raw: dict = field(default_factory=dict, compare=False)

    @property
    def matrix(self) -> ParameterMatrix:
        return self.matrices[0]


def _matrix(entry, where):
    if not isinstance(entry, (list, tuple)) or len(entry) not in (4, 6):
        raise ConfigError(f"{where}: a matrix is a list a,b,c,d[,y0,w0]")
    try:
        return ParameterMatrix(*[float(v) for v in entry])
    except (TypeError, ValueError, OLCTError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def expand_matrix_rule(rule: dict) -> list[ParameterMatrix]:
    """``ratio_sweep``: a/b = k * ratio_step for k = 1..count, fixed b, c chosen for det 1."""
    kind = rule.get("rule")
    if kind != "ratio_sweep":
        raise ConfigError(f"unknown matrix rule {kind!r}")
    count = rule.get("count")
    if not isinstance(count, int) or count < 1:
        raise ConfigError("ratio_sweep needs a positive integer 'count'")
    b = float(rule.get("b", 1.0))
    if b <= 0:
        raise ConfigError("ratio_sweep needs b > 0")
    step = float(rule.get("ratio_step", 0.125))
    y0 = float(rule.get("y0", 0.0))
    w0 = float(rule.get("w0", 0.0))
    # a = k step b, d = 0, c = -1/b gives ad - bc = 1
    return [ParameterMatrix(k * step * b, b, -1.0 / b, 0.0, y0, w0) for k in range(1, count + 1)]


def _levels(value, name):
    vals = value if isinstance(value, list) else [value]
    out = []
    for v in vals:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v) or v < 0:
            raise ConfigError(f"{name} must be nonnegative numbers, got {v!r}")
        out.append(float(v))
    if not out:
        raise ConfigError(f"{name} is empty")
    return tuple(out)


def load_config(obj: dict) -> ExperimentConfig:
    """Validate a parsed JSON config; every problem raises ConfigError."""
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    known = {
        "experiment_id", "solver", "signal", "window", "matrices", "matrix", "noise_sigma",
        "matrix_counts", "trials", "seed", "floor", "grids", "bandlimited", "output_path",
    }
    extra = set(obj) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    for key in ("experiment_id", "solver", "signal", "output_path"):
        if key not in obj:
            raise ConfigError(f"missing required key '{key}'")
    solver = obj["solver"]
    if solver not in SOLVERS:
        raise ConfigError(f"solver must be one of {SOLVERS}, got {solver!r}")
    try:
        signal = SignalSpec.from_dict(obj["signal"])
        window = SignalSpec.from_dict(obj["window"]) if obj.get("window") is not None else None
    except InvalidSpec as exc:
        raise ConfigError(str(exc)) from exc
    if solver != "multi-olct" and window is None:
        raise ConfigError(f"solver {solver} needs a window")
    if window is not None and window.step != signal.step:
        raise ConfigError("window and signal must share a step")

    if "matrices" in obj and "matrix" in obj:
        raise ConfigError("give either 'matrices' or 'matrix', not both")
    if "matrix" in obj:
        mats = [_matrix(obj["matrix"], "matrix")]
    elif isinstance(obj.get("matrices"), dict):
        mats = expand_matrix_rule(obj["matrices"])
    elif isinstance(obj.get("matrices"), list) and obj["matrices"]:
        mats = [_matrix(m, f"matrices[{i}]") for i, m in enumerate(obj["matrices"])]
    else:
        raise ConfigError("need 'matrices' (list or rule) or 'matrix'")
    if any(A.is_degenerate for A in mats):
        raise ConfigError("matrices must have b != 0")

    counts = obj.get("matrix_counts", [])
    if not isinstance(counts, list) or any(isinstance(c, bool) or not isinstance(c, int) or c < 1 or c > len(mats) for c in counts):
        raise ConfigError(f"matrix_counts must be integers in [1, {len(mats)}]")
    trials = obj.get("trials", 1)
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 1:
        raise ConfigError("trials must be a positive integer")
    seed = obj.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    floor = obj.get("floor")
    if floor is not None and (not isinstance(floor, (int, float)) or not 0 <= floor < 1):
        raise ConfigError("floor must lie in [0, 1)")
    grids = obj.get("grids", {})
    if not isinstance(grids, dict):
        raise ConfigError("grids must be an object")
    u_points = grids.get("u_points")
    if u_points is not None and (not isinstance(u_points, int) or u_points < 2 * signal.length - 1):
        raise ConfigError(f"grids.u_points must be an integer >= 2N - 1 = {2 * signal.length - 1}")

    band = None
    if solver == "bandlimited":
        b = obj.get("bandlimited")
        if not isinstance(b, dict) or b.get("mode") not in ("ft", "olct") or "band" not in b:
            raise ConfigError("bandlimited solver needs {'mode': 'ft'|'olct', 'band': ...}")
        raw_band = b["band"]
        if b["mode"] == "ft":
            if not isinstance(raw_band, list) or len(raw_band) != 2 or min(raw_band) <= 0:
                raise ConfigError("ft mode band is [omega1, omega2], both positive")
            bval = tuple(float(x) for x in raw_band)
        else:
            if not isinstance(raw_band, (int, float)) or raw_band <= 0:
                raise ConfigError("olct mode band is a positive number")
            bval = (float(raw_band),)
        radius = b.get("radius", 64)
        if not isinstance(radius, int) or radius < 1:
            raise ConfigError("radius must be a positive integer")
        band = BandSettings(b["mode"], bval, radius, b.get("gamma"))

    return ExperimentConfig(
        experiment_id=str(obj["experiment_id"]),
        solver=solver,
        signal=signal,
        output_path=str(obj["output_path"]),
        matrices=tuple(mats),
        window=window,
        noise_levels=_levels(obj.get("noise_sigma", 0.0), "noise_sigma"),
        matrix_counts=tuple(counts),
        trials=trials,
        seed=seed,
        floor=None if floor is None else float(floor),
        u_points=u_points,
        bandlimited=band,
        raw=obj,
    )
