import csv
import json
from dataclasses import replace

import numpy as np
import pytest

from olctkit.harness import generators
from olctkit.harness.config import ConfigError, expand_matrix_rule, load_config
from olctkit.harness.generators import InvalidSpec, SignalSpec, generate_signal, two_bump_parts
from olctkit.harness.runner import CSV_COLUMNS, add_noise, execute_run, plan_runs, run_experiment


def make(kind, length=64, step=1.0, seed=None, **params):
    return SignalSpec.from_dict({"kind": kind, "length": length, "step": step, "seed": seed, "params": params})


# -- generators --------------------------------------------------------------------


def test_gaussian_symmetric_with_peak_at_centre():
    x = generate_signal(make("gaussian", step=0.25, sigma=1.0))
    s = x.samples
    c = int(np.flatnonzero(x.indices == 0)[0])
    assert np.all(s.imag == 0)
    assert np.allclose(s[c + 1:], s[c - 1: c - len(s[c + 1:]) - 1: -1])
    assert np.argmax(s.real) == c


def test_random_compact_is_deterministic():
    a = generate_signal(make("random_compact", length=16, seed=7))
    b = generate_signal(make("random_compact", length=16, seed=7))
    c = generate_signal(make("random_compact", length=16, seed=8))
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)


@pytest.mark.parametrize("real", [False, True])
def test_random_bandlimited_energy_stays_in_band(real):
    spec = make("random_bandlimited", length=128, step=0.1, seed=3, omega=8.0, real=real)
    x = generate_signal(spec)
    X = np.fft.fft(x.samples)
    w = 2 * np.pi * np.fft.fftfreq(128, d=0.1)
    out = np.sum(np.abs(X[np.abs(w) > 8.0]) ** 2)
    assert out <= 1e-10 * np.sum(np.abs(X) ** 2)


def test_bump_is_compact_and_smooth():
    x = generate_signal(make("bump", step=0.1, width=1.5, center=0.2))
    t = x.times
    assert np.all(x.samples[np.abs(t - 0.2) >= 1.5] == 0)
    assert np.max(x.samples.real) == pytest.approx(generators.smooth_bump(0.2, 0.2, 1.5))


def test_two_bumps_have_disjoint_parts():
    spec = make("two_bumps", step=0.1, width=1.0, gap=0.8)
    f1, f2 = two_bump_parts(spec)
    x = generate_signal(spec)
    assert not np.any(f1.samples * f2.samples)
    assert np.allclose(x.samples, f1.samples + f2.samples)


def test_chirp_has_unit_modulus_envelope():
    x = generate_signal(make("chirp", step=0.1, rate=2.0, sigma=1e6))
    assert np.allclose(np.abs(x.samples), 1.0)


@pytest.mark.parametrize(
    "bad",
    [
        {"kind": "sawtooth", "length": 8},
        {"kind": "gaussian", "length": 0, "params": {"sigma": 1}},
        {"kind": "gaussian", "length": 8, "params": {"sigma": -1}},
        {"kind": "gaussian", "length": 8, "step": 0, "params": {"sigma": 1}},
        {"kind": "random_bandlimited", "length": 8, "params": {"omega": 100.0}},
        {"kind": "two_bumps", "length": 8, "params": {"width": 1.0}},
    ],
)
def test_invalid_specs_rejected(bad):
    with pytest.raises(InvalidSpec):
        generate_signal(SignalSpec.from_dict(bad))


def test_spec_round_trips_through_dict():
    spec = make("gaussian", length=10, step=0.5, sigma=2.0)
    assert SignalSpec.from_dict(spec.to_dict()) == spec


# -- config ------------------------------------------------------------------------


def base_config(tmp_path, **over):
    cfg = {
        "experiment_id": "t",
        "solver": "multi-olct",
        "signal": {"kind": "random_compact", "length": 8, "seed": 1},
        "matrices": {"rule": "ratio_sweep", "count": 12, "b": 1.0, "ratio_step": 0.125},
        "noise_sigma": [0.0, 1e-3],
        "trials": 2,
        "seed": 4,
        "output_path": str(tmp_path / "out"),
    }
    cfg.update(over)
    return cfg


def test_ratio_sweep_rule():
    mats = expand_matrix_rule({"rule": "ratio_sweep", "count": 3, "b": 2.0, "ratio_step": 0.5, "y0": 0.1})
    assert [A.ratio for A in mats] == [0.5, 1.0, 1.5]
    assert all(A.b == 2.0 and A.y0 == 0.1 for A in mats)


def test_valid_config_loads(tmp_path):
    cfg = load_config(base_config(tmp_path))
    assert len(cfg.matrices) == 12 and cfg.noise_levels == (0.0, 1e-3)


@pytest.mark.parametrize(
    "over",
    [
        {"noise_sigma": -1e-3},
        {"noise_sigma": [0.0, -1.0]},
        {"solver": "magic"},
        {"trials": 0},
        {"seed": -1},
        {"matrices": [[1, 1, 1, 1]]},
        {"matrix_counts": [100]},
        {"unexpected": 1},
        {"grids": {"u_points": 3}},
        {"floor": 2.0},
    ],
)
def test_invalid_configs_rejected(tmp_path, over):
    with pytest.raises(ConfigError):
        load_config(base_config(tmp_path, **over))


def test_window_required_for_stolct(tmp_path):
    with pytest.raises(ConfigError):
        load_config(base_config(tmp_path, solver="stolct", matrices=None, matrix=[0, 1, -1, 0]))


def test_bandlimited_needs_band(tmp_path):
    with pytest.raises(ConfigError):
        load_config(
            base_config(
                tmp_path,
                solver="bandlimited",
                window={"kind": "gaussian", "length": 8, "params": {"sigma": 1.0}},
                matrices=None,
                matrix=[0, 1, -1, 0],
            )
        )


# -- runner ------------------------------------------------------------------------


def test_noise_model_clamps_at_zero():
    rng = np.random.default_rng(0)
    m2 = np.array([0.0, 1e-6, 1.0])
    noisy = add_noise(m2, 0.5, rng)
    assert np.all(noisy >= 0)
    assert np.array_equal(add_noise(m2, 0.0, rng), m2)


def test_plan_covers_every_cell(tmp_path):
    cfg = load_config(base_config(tmp_path, matrix_counts=[8, 12]))
    runs = plan_runs(cfg)
    assert len(runs) == 2 * 2 * 2
    assert len({r.run_id for r in runs}) == len(runs)


def test_run_writes_artifacts(tmp_path):
    cfg = load_config(base_config(tmp_path, matrix_counts=[8, 12]))
    res = run_experiment(cfg, workers=2, figures=True)
    out = tmp_path / "out"
    with open(out / "results.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    assert len(rows) == 8
    clean = [r for r in rows if float(r["noise_sigma"]) == 0 and r["num_matrices"] == "12"]
    assert all(float(r["residual"]) <= 1e-6 for r in clean)
    for name in ("residual_vs_noise.csv", "residual_vs_count.csv", "config.json", "residual_vs_noise.png"):
        assert (out / name).exists()
    assert len(list((out / "reports").iterdir())) == 8
    assert len(list((out / "signals").iterdir())) == 8
    report = json.loads(next((out / "reports").iterdir()).read_text())
    assert set(report) >= {"residual", "diagnostics", "signal"}
    assert res.status == 0


def test_failures_are_recorded_without_aborting(tmp_path):
    # 8 ratios for a support of 8 is fine; 4 is not
    cfg = load_config(base_config(tmp_path, matrix_counts=[4, 12], noise_sigma=0.0, trials=1))
    res = run_experiment(cfg, figures=False)
    verdicts = [r["verdict"] for r in res.rows]
    assert verdicts[0] == "error:InsufficientDiversity"
    assert verdicts[1].startswith("ok")
    assert res.status == 1
    with open(tmp_path / "out" / "results.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["residual"] == "nan"


def test_noise_increases_residual(tmp_path):
    cfg = load_config(base_config(tmp_path, noise_sigma=[0.0, 1e-2], trials=3))
    res = run_experiment(cfg, figures=False)
    clean = [r["residual"] for r in res.rows if r["noise_sigma"] == 0]
    noisy = [r["residual"] for r in res.rows if r["noise_sigma"] > 0]
    assert np.median(noisy) >= np.median(clean)


def test_warnings_land_in_verdict(tmp_path):
    cfg = load_config(base_config(tmp_path, noise_sigma=0.05, trials=1))
    row, report, truth, _ = execute_run(cfg, plan_runs(cfg)[0])
    assert "warn:RankDeficiency" in row["verdict"]


def test_stolct_run_emits_map_figure(tmp_path):
    cfg = load_config(
        {
            "experiment_id": "st",
            "solver": "stolct",
            "signal": {"kind": "gaussian", "length": 64, "step": 0.1, "params": {"sigma": 0.5}},
            "window": {"kind": "gaussian", "length": 64, "step": 0.1, "params": {"sigma": 0.5}},
            "matrix": [0.7071067811865476, 0.7071067811865476, -0.7071067811865476, 0.7071067811865476],
            "noise_sigma": [0.0, 1e-6],
            "output_path": str(tmp_path / "st"),
        }
    )
    res = run_experiment(cfg, figures=True)
    assert res.status == 0
    assert res.rows[0]["residual"] <= 1e-6
    assert res.rows[1]["residual"] <= 1e-3
    assert (tmp_path / "st" / "magnitude_map.png").exists()


def test_same_seed_same_reports(tmp_path):
    cfg = load_config(base_config(tmp_path, noise_sigma=1e-3))
    run_experiment(replace(cfg, output_path=str(tmp_path / "a")), figures=False)
    run_experiment(replace(cfg, output_path=str(tmp_path / "b")), workers=3, figures=False)
    for p in (tmp_path / "a" / "reports").iterdir():
        assert p.read_bytes() == (tmp_path / "b" / "reports" / p.name).read_bytes()
