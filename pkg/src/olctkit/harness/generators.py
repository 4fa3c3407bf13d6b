"""Deterministic test-signal generators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import SampledSignal


class InvalidSpec(ValueError):
    pass


KINDS = ("gaussian", "chirp", "random_compact", "random_bandlimited", "bump", "two_bumps")


@dataclass(frozen=True)
class SignalSpec:
    """kind + lattice (length samples centred on t = 0, spacing ``step``) + kind parameters."""

    kind: str
    length: int
    step: float = 1.0
    params: dict = field(default_factory=dict)
    seed: int | None = None

    @classmethod
    def from_dict(cls, obj: dict) -> "SignalSpec":
        if not isinstance(obj, dict) or "kind" not in obj or "length" not in obj:
            raise InvalidSpec("signal spec needs at least 'kind' and 'length'")
        extra = set(obj) - {"kind", "length", "step", "params", "seed"}
        if extra:
            raise InvalidSpec(f"unknown signal spec keys: {sorted(extra)}")
        spec = cls(
            kind=obj["kind"],
            length=obj["length"],
            step=obj.get("step", 1.0),
            params=dict(obj.get("params", {})),
            seed=obj.get("seed"),
        )
        validate_spec(spec)
        return spec

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "length": self.length, "step": self.step, "params": dict(self.params)}
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def _positive(spec, name, default=None):
    v = spec.params.get(name, default)
    if v is None:
        raise InvalidSpec(f"{spec.kind} needs parameter '{name}'")
    if not isinstance(v, (int, float)) or not np.isfinite(v) or v <= 0:
        raise InvalidSpec(f"{spec.kind}: '{name}' must be a positive number, got {v!r}")
    return float(v)


def validate_spec(spec: SignalSpec) -> None:
    if spec.kind not in KINDS:
        raise InvalidSpec(f"unknown signal kind {spec.kind!r}; expected one of {KINDS}")
    if isinstance(spec.length, bool) or not isinstance(spec.length, int) or spec.length < 1:
        raise InvalidSpec(f"length must be a positive integer, got {spec.length!r}")
    if not isinstance(spec.step, (int, float)) or not np.isfinite(spec.step) or spec.step <= 0:
        raise InvalidSpec(f"step must be positive, got {spec.step!r}")
    if spec.kind in ("random_compact", "random_bandlimited"):
        if isinstance(spec.seed, bool) or not isinstance(spec.seed, int):
            raise InvalidSpec(f"{spec.kind} needs an integer seed")
    if spec.kind == "gaussian":
        _positive(spec, "sigma")
    elif spec.kind == "chirp":
        if not isinstance(spec.params.get("rate"), (int, float)):
            raise InvalidSpec("chirp needs a numeric 'rate'")
    elif spec.kind == "random_bandlimited":
        om = _positive(spec, "omega")
        if om > np.pi / spec.step:
            raise InvalidSpec(f"omega {om} exceeds the lattice Nyquist frequency {np.pi / spec.step:.4g}")
    elif spec.kind == "bump":
        _positive(spec, "width")
    elif spec.kind == "two_bumps":
        _positive(spec, "width")
        gap = spec.params.get("gap")
        if not isinstance(gap, (int, float)) or gap <= 0:
            raise InvalidSpec("two_bumps needs a positive 'gap'")


def lattice(spec: SignalSpec):
    origin = -(spec.length // 2)
    return origin, (origin + np.arange(spec.length)) * spec.step


def smooth_bump(t, center: float, width: float) -> np.ndarray:
    """exp(-1 / (1 - x^2)) on |x| < 1, x = (t - center) / width; zero elsewhere."""
    x = (np.asarray(t, dtype=float) - center) / width
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
    return out


def two_bump_parts(spec: SignalSpec):
    """The disjoint pieces (f1, f2) of a two_bumps signal."""
    validate_spec(spec)
    if spec.kind != "two_bumps":
        raise InvalidSpec("two_bump_parts needs a two_bumps spec")
    origin, t = lattice(spec)
    w = float(spec.params["width"])
    gap = float(spec.params["gap"])
    ratio = float(spec.params.get("ratio", 0.7))
    offset = gap / 2 + w
    f1 = smooth_bump(t, -offset, w)
    f2 = ratio * smooth_bump(t, offset, w)
    return SampledSignal(f1, origin, spec.step), SampledSignal(f2, origin, spec.step)


def generate_signal(spec: SignalSpec) -> SampledSignal:
    validate_spec(spec)
    origin, t = lattice(spec)
    p = spec.params
    if spec.kind == "gaussian":
        c = float(p.get("center", 0.0))
        vals = np.exp(-((t - c) ** 2) / (2 * float(p["sigma"]) ** 2))
    elif spec.kind == "chirp":
        c = float(p.get("center", 0.0))
        sigma = float(p.get("sigma", spec.length * spec.step / 8))
        vals = np.exp(-((t - c) ** 2) / (2 * sigma**2) + 0.5j * float(p["rate"]) * (t - c) ** 2)
    elif spec.kind == "random_compact":
        rng = np.random.default_rng(spec.seed)
        vals = rng.standard_normal(spec.length) + 1j * rng.standard_normal(spec.length)
        if p.get("real", False):
            vals = vals.real
    elif spec.kind == "random_bandlimited":
        # random DFT coefficients on the bins inside |omega| <= Omega
        rng = np.random.default_rng(spec.seed)
        n = spec.length
        w = 2 * np.pi * np.fft.fftfreq(n, d=spec.step)
        inband = np.abs(w) <= float(p["omega"])
        coef = np.zeros(n, dtype=complex)
        coef[inband] = rng.standard_normal(inband.sum()) + 1j * rng.standard_normal(inband.sum())
        vals = np.fft.ifft(coef) * np.sqrt(n)
        if p.get("real", False):
            vals = vals.real
    elif spec.kind == "bump":
        vals = smooth_bump(t, float(p.get("center", 0.0)), float(p["width"]))
    else:
        f1, f2 = two_bump_parts(spec)
        vals = f1.samples.real + f2.samples.real
    return SampledSignal(vals, origin, spec.step)
