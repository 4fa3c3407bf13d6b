"""Batch execution of recovery experiments and artifact emission."""

from __future__ import annotations

import csv
import json
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ..ambiguity import spectral_grid
from ..core import OLCTError, SampledSignal
from ..io import signal_to_dict
from ..recovery import (
    recover_bandlimited_sampled,
    recover_from_multi_olct,
    recover_from_stolct,
    recover_nonseparable_real,
)
from ..stolct import MagnitudeSamples, full_magnitude_map, sample_stolct_magnitude, TimeFrequencyMap
from ..transforms import Spectrum, olct_fast
from .config import ExperimentConfig
from .generators import generate_signal

CSV_COLUMNS = ("experiment_id", "solver", "N", "num_matrices", "noise_sigma", "residual", "runtime_ms", "verdict")


def add_noise(mag2: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Additive Gaussian noise of standard deviation sigma * max(mag2), clamped at zero."""
    mag2 = np.asarray(mag2, dtype=float)
    if sigma == 0:
        return mag2.copy()
    scale = sigma * float(np.max(mag2, initial=0.0))
    return np.clip(mag2 + scale * rng.standard_normal(mag2.shape), 0.0, None)


@dataclass(frozen=True)
class RunSpec:
    index: int
    run_id: str
    noise: float
    count: int
    trial: int


def plan_runs(cfg: ExperimentConfig) -> list[RunSpec]:
    counts = cfg.matrix_counts or (len(cfg.matrices),)
    runs = []
    for count in counts:
        for noise in cfg.noise_levels:
            for trial in range(cfg.trials):
                i = len(runs)
                runs.append(RunSpec(i, f"{cfg.experiment_id}#{i}", noise, count, trial))
    return runs


def _trial_signal(cfg: ExperimentConfig, trial: int) -> SampledSignal:
    spec = cfg.signal
    if spec.seed is not None:
        spec = replace(spec, seed=spec.seed + trial)
    return generate_signal(spec)


def _sampled_magnitudes(f, phi, A, cfg, rng, noise):
    band = cfg.bandlimited
    n = cfg.u_points or 2 * len(f)
    ugrid = spectral_grid(f, A, length=n)
    bands = band.band if band.mode == "ft" else band.band[0]
    out = []
    for u in ugrid.points:
        s = sample_stolct_magnitude(f, phi, A, u, bands, mode=band.mode)
        noisy = np.sqrt(add_noise(s.values**2, noise, rng))
        out.append(MagnitudeSamples(s.u, s.spacing, s.n, noisy, s.omega_u))
    return out


def execute_run(cfg: ExperimentConfig, run: RunSpec):
    """One (matrix count, noise level, trial) cell; returns (row, report dict or None, truth, map)."""
    rng = np.random.default_rng([cfg.seed, run.index])
    f = _trial_signal(cfg, run.trial)
    phi = generate_signal(cfg.window) if cfg.window is not None else None
    mats = cfg.matrices[: run.count]
    tmap = None
    t0 = time.perf_counter()
    caught = []
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if cfg.solver == "multi-olct":
                mags = []
                for A in mats:
                    S = olct_fast(f, A)
                    mags.append((A, Spectrum(add_noise(np.abs(S.values) ** 2, run.noise, rng), S.grid)))
                rep = recover_from_multi_olct(mags, (f.origin, len(f), f.step), truth=f)
            elif cfg.solver in ("stolct", "nonseparable"):
                A = mats[0]
                clean = full_magnitude_map(f, phi, A, cfg.u_points)
                noisy = np.sqrt(add_noise(clean.values**2, run.noise, rng))
                tmap = TimeFrequencyMap(noisy, clean.shift_grid, clean.freq_grid, cfg.window.kind)
                kw = {} if cfg.floor is None else {"floor": cfg.floor}
                solve = recover_from_stolct if cfg.solver == "stolct" else recover_nonseparable_real
                rep = solve(tmap, phi, A, support=(f.origin, len(f)), truth=f, **kw)
            else:
                A = mats[0]
                band = cfg.bandlimited
                samples = _sampled_magnitudes(f, phi, A, cfg, rng, run.noise)
                kw = {} if cfg.floor is None else {"floor": cfg.floor}
                rep = recover_bandlimited_sampled(
                    samples, phi, A, band.band if band.mode == "ft" else band.band[0], mode=band.mode,
                    support=(f.origin, len(f)), gamma=band.gamma, radius=band.radius, truth=f, **kw,
                )
        verdict = rep.verdict or "ok"
        flagged = sorted({type(w.message).__name__ for w in caught if issubclass(w.category, UserWarning)})
        if flagged:
            verdict = f"{verdict};warn:{','.join(flagged)}"
        residual = rep.residual
        report = rep.to_dict()
    except (OLCTError, ValueError) as exc:
        verdict = f"error:{type(exc).__name__}"
        residual = float("nan")
        report = None
    runtime = (time.perf_counter() - t0) * 1e3
    row = {
        "experiment_id": run.run_id,
        "solver": cfg.solver,
        "N": len(f),
        "num_matrices": len(mats),
        "noise_sigma": run.noise,
        "residual": residual,
        "runtime_ms": round(runtime, 3),
        "verdict": verdict,
    }
    return row, report, f, tmap


@dataclass
class ExperimentResult:
    rows: list
    reports: dict
    status: int
    output_dir: str


def _summary(rows, key):
    groups = {}
    for r in rows:
        groups.setdefault(r[key], []).append(r["residual"])
    out = []
    for k in sorted(groups):
        vals = np.array(groups[k], dtype=float)
        ok = vals[np.isfinite(vals)]
        out.append({
            key: k,
            "runs": len(vals),
            "failures": int(np.sum(~np.isfinite(vals))),
            "median_residual": float(np.median(ok)) if ok.size else float("nan"),
            "max_residual": float(np.max(ok)) if ok.size else float("nan"),
        })
    return out


def _write_csv(path, rows, columns):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns))
        w.writeheader()
        for r in rows:
            w.writerow({k: r[k] for k in columns})


def run_experiment(cfg: ExperimentConfig, workers: int = 1, figures: bool = True) -> ExperimentResult:
    """Run every cell of the experiment and write its artifacts.

    Cells run concurrently (threads, each with its own seeded generator) and
    all files are written afterwards from this thread, in plan order.
    Failures are recorded as rows and make the status 1.
    """
    runs = plan_runs(cfg)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: execute_run(cfg, r), runs))
    else:
        results = [execute_run(cfg, r) for r in runs]

    out = cfg.output_path
    os.makedirs(os.path.join(out, "reports"), exist_ok=True)
    os.makedirs(os.path.join(out, "signals"), exist_ok=True)
    rows, reports = [], {}
    for run, (row, report, truth, _) in zip(runs, results):
        rows.append(row)
        safe = run.run_id.replace("#", "_")
        with open(os.path.join(out, "signals", f"{safe}_truth.json"), "w") as fh:
            json.dump(signal_to_dict(truth), fh)
        if report is not None:
            reports[run.run_id] = report
            with open(os.path.join(out, "reports", f"{safe}.json"), "w") as fh:
                json.dump(report, fh, sort_keys=True, allow_nan=False)
    _write_csv(os.path.join(out, "results.csv"), rows, CSV_COLUMNS)
    by_noise = _summary(rows, "noise_sigma")
    by_count = _summary(rows, "num_matrices")
    _write_csv(os.path.join(out, "residual_vs_noise.csv"), by_noise, list(by_noise[0]))
    _write_csv(os.path.join(out, "residual_vs_count.csv"), by_count, list(by_count[0]))
    with open(os.path.join(out, "config.json"), "w") as fh:
        json.dump(cfg.raw, fh, indent=2, sort_keys=True)

    if figures:
        from .plotting import magnitude_map_figure, residual_figure

        if len(by_noise) > 1:
            residual_figure(by_noise, "noise_sigma", os.path.join(out, "residual_vs_noise.png"))
        if len(by_count) > 1:
            residual_figure(by_count, "num_matrices", os.path.join(out, "residual_vs_count.png"))
        first_map = next((m for *_, m in results if m is not None), None)
        if first_map is not None:
            magnitude_map_figure(first_map, os.path.join(out, "magnitude_map.png"))

    status = 0 if all(np.isfinite(r["residual"]) for r in rows) else 1
    return ExperimentResult(rows, reports, status, out)
