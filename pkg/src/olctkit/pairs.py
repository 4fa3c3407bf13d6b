"""Trivial and nontrivial magnitude ambiguities of the discrete OLCT."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ambiguity import spectral_grid
from .core import (
    DegenerateParameterError,
    Grid,
    OLCTError,
    ParameterMatrix,
    SampledSignal,
    phase_invariant_error,
    union_support,
)
from .transforms import olct_magnitude


class ZeroFactor(OLCTError):
    pass


@dataclass(frozen=True)
class Rotate:
    beta: float


@dataclass(frozen=True)
class Shift:
    n0: int


@dataclass(frozen=True)
class ConjugateReflect:
    pass


def apply_trivial_ambiguity(x: SampledSignal, A: ParameterMatrix, kind) -> SampledSignal:
    """Rotation e^{j beta} x, chirped shift, or chirped conjugate reflection.

    Shift(n0):  e^{-j a t0 t / b} x(t - t0) with t0 = n0 * step.
    ConjugateReflect:  e^{-j a t^2 / b} conj(x(-t)).
    All three leave |O^A x| unchanged for this particular A.
    """
    if isinstance(kind, Rotate):
        return x * np.exp(1j * kind.beta)
    if A.is_degenerate:
        raise DegenerateParameterError("shift/reflection ambiguities need b != 0")
    r = A.ratio
    if isinstance(kind, Shift):
        n0 = int(kind.n0)
        t0 = n0 * x.step
        out = SampledSignal(x.samples, x.origin + n0, x.step)
        return out.with_samples(out.samples * np.exp(-1j * r * t0 * out.times))
    if isinstance(kind, ConjugateReflect):
        out = SampledSignal(np.conj(x.samples[::-1]), -(x.stop - 1), x.step)
        return out.with_samples(out.samples * np.exp(-1j * r * out.times**2))
    raise TypeError(f"unknown trivial ambiguity {kind!r}")


def convolve(g1: SampledSignal, g2: SampledSignal) -> SampledSignal:
    """Lattice convolution weighted by the step (plain sum for step 1)."""
    union_support(g1, g2)
    return SampledSignal(np.convolve(g1.samples, g2.samples) * g1.step, g1.origin + g2.origin, g1.step)


def conj_reflect(g: SampledSignal) -> SampledSignal:
    """conj(g(-t)), no chirp."""
    return SampledSignal(np.conj(g.samples[::-1]), -(g.stop - 1), g.step)


def autocorrelation(x: SampledSignal) -> SampledSignal:
    """a[n] = sum_k conj(x[k]) x[k + n], supported on n = -(N-1) .. N-1."""
    a = np.convolve(x.samples, np.conj(x.samples[::-1]))
    return SampledSignal(a, -(len(x) - 1), x.step)


@dataclass(frozen=True)
class PairReport:
    max_dev: float
    distinct: bool
    trivial_equivalent: bool
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_dev <= self.tol


@dataclass(frozen=True, eq=False)
class AmbiguityPair:
    x: SampledSignal
    y: SampledSignal
    provenance: dict = field(default_factory=dict)
    report: PairReport | None = None


def _dechirp(z: SampledSignal, ratio: float) -> SampledSignal:
    return z.with_samples(z.samples * np.exp(-0.5j * ratio * z.times**2))


def make_nontrivial_pair(
    g1: SampledSignal,
    g2: SampledSignal,
    A: ParameterMatrix,
    beta: float = 0.0,
    n0: int = 0,
    certify: bool = True,
) -> AmbiguityPair:
    """x = chirp * (g1 * g2),  y = e^{j beta} chirp * (g1[. - n0] * conj(g2[-.])).

    The chirp is e^{-j a t^2 / 2b}.  Both signals have identical |O^A .|.
    """
    if A.is_degenerate:
        raise DegenerateParameterError("pair construction needs b != 0")
    for name, g in (("g1", g1), ("g2", g2)):
        if not np.any(g.samples):
            raise ZeroFactor(f"{name} is identically zero")
    r = A.ratio
    x = _dechirp(convolve(g1, g2), r)
    g1s = SampledSignal(g1.samples, g1.origin + int(n0), g1.step)
    y = _dechirp(convolve(g1s, conj_reflect(g2)), r) * np.exp(1j * beta)
    prov = {
        "g1": g1,
        "g2": g2,
        "beta": float(beta),
        "n0": int(n0),
        "A": A.as_tuple(),
    }
    report = certify_pair(x, y, A) if certify else None
    return AmbiguityPair(x, y, prov, report)


def _trivial_orbit_residual(x: SampledSignal, y: SampledSignal, A: ParameterMatrix) -> float:
    best = np.inf
    ynorm = y.norm()
    if ynorm == 0:
        return 0.0 if x.norm() == 0 else np.inf
    for z in (x, apply_trivial_ambiguity(x, A, ConjugateReflect())):
        for n0 in range(y.origin - z.stop + 1, y.stop - z.origin):
            cand = apply_trivial_ambiguity(z, A, Shift(n0))
            best = min(best, phase_invariant_error(y, cand).residual)
    return best


def certify_pair(
    x: SampledSignal,
    y: SampledSignal,
    A: ParameterMatrix,
    ugrid: Grid | None = None,
    tol: float = 1e-8,
) -> PairReport:
    """Check |O^A x| == |O^A y| on ``ugrid`` and classify the relation.

    ``trivial_equivalent`` searches every integer shift that overlaps the
    supports, with and without conjugate reflection, phase solved in closed
    form; it is True when some member of that orbit matches y to 1e-8.
    """
    if ugrid is None:
        lo, n = union_support(x, y)
        ugrid = spectral_grid(SampledSignal(np.zeros(n), lo, x.step), A, oversample=4)
    dev = np.max(np.abs(olct_magnitude(x, A, ugrid) - olct_magnitude(y, A, ugrid)))
    try:
        distinct = phase_invariant_error(x, y).residual > 1e-3
    except OLCTError:
        distinct = bool(np.any(y.samples))
    trivial = A.is_degenerate is False and _trivial_orbit_residual(x, y, A) <= 1e-8
    return PairReport(float(dev), bool(distinct), bool(trivial), tol)
