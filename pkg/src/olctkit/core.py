"""Parameter matrices, grids, sampled signals and phase-invariant comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DET_TOL = 1e-12


class OLCTError(Exception):
    """Base class for all errors raised by olctkit."""


class DeterminantError(OLCTError):
    pass


class DegenerateParameterError(OLCTError):
    pass


class DegenerateGridError(OLCTError):
    pass


class GridMismatch(OLCTError):
    pass


class ZeroSignal(OLCTError):
    pass


@dataclass(frozen=True)
class ParameterMatrix:
    """The six OLCT parameters ``[[a, b | y0], [c, d | w0]]`` with ``ad - bc = 1``.

    Construct through :func:`make_parameter_matrix` (or directly; validation
    runs in ``__post_init__`` either way).
    """

    a: float
    b: float
    c: float
    d: float
    y0: float = 0.0
    w0: float = 0.0

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d, self.y0, self.w0)
        if not all(math.isfinite(v) for v in vals):
            raise DeterminantError(f"non-finite parameter in {vals}")
        det = self.a * self.d - self.b * self.c
        if abs(det - 1.0) > DET_TOL:
            raise DeterminantError(f"ad - bc = {det!r}, expected 1")

    @property
    def is_degenerate(self) -> bool:
        return self.b == 0

    @property
    def ratio(self) -> float:
        """a / b, the chirp rate that enters every magnitude identity."""
        if self.is_degenerate:
            raise DegenerateParameterError("a/b undefined for b = 0")
        return self.a / self.b

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d, self.y0, self.w0)

    def inverse_constant(self) -> complex:
        """Phase constant C multiplying the inverse transform."""
        a, b, c, d, y0, w0 = self.as_tuple()
        return complex(np.exp(0.5j * (c * d * y0**2 - 2 * a * d * y0 * w0 + a * b * w0**2)))


def make_parameter_matrix(a, b, c, d, y0=0.0, w0=0.0) -> ParameterMatrix:
    return ParameterMatrix(float(a), float(b), float(c), float(d), float(y0), float(w0))


def invert_parameters(A: ParameterMatrix) -> ParameterMatrix:
    a, b, c, d, y0, w0 = A.as_tuple()
    return ParameterMatrix(d, -b, -c, a, b * w0 - d * y0, c * y0 - a * w0)


def special_case(kind: str, *args) -> ParameterMatrix:
    """Preset matrices: ``"ft"``, ``"frft"`` (angle), ``"lct"`` (a, b, c, d), ``"fresnel"`` (z)."""
    kind = kind.lower()
    if kind == "ft":
        return ParameterMatrix(0.0, 1.0, -1.0, 0.0)
    if kind == "frft":
        (theta,) = args
        cs, sn = math.cos(theta), math.sin(theta)
        # cos(pi/2) is 6e-17, not 0; snap so the FT preset comes out exact
        cs = 0.0 if abs(cs) < 1e-15 else cs
        sn = 0.0 if abs(sn) < 1e-15 else sn
        return ParameterMatrix(cs, sn, -sn, cs)
    if kind == "lct":
        a, b, c, d = args
        return make_parameter_matrix(a, b, c, d)
    if kind == "fresnel":
        (z,) = args
        return ParameterMatrix(1.0, float(z), 0.0, 1.0)
    raise ValueError(f"unknown special case {kind!r}")


@dataclass(frozen=True)
class Grid:
    start: float
    step: float
    count: int

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"grid count must be a positive integer, got {self.count}")

    @property
    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @classmethod
    def symmetric(cls, half_count: int, step: float) -> "Grid":
        """Grid of ``2*half_count + 1`` points centred on zero."""
        return cls(-half_count * step, step, 2 * half_count + 1)

    def to_dict(self):
        return {"start": self.start, "step": self.step, "count": self.count}


@dataclass(frozen=True)
class BandLimit:
    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"band limit must be positive, got {self.omega}")


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Finitely supported samples ``x[n]`` for ``n = origin .. origin + N - 1``.

    Sample ``k`` sits at time ``(origin + k) * step``; everything outside the
    stored block is zero.  ``step = 1`` gives the discrete-native signal.
    """

    samples: np.ndarray
    origin: int = 0
    step: float = 1.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex).reshape(-1)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "origin", int(self.origin))
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        object.__setattr__(self, "step", float(self.step))

    def __len__(self):
        return self.samples.size

    @property
    def indices(self) -> np.ndarray:
        return self.origin + np.arange(len(self))

    @property
    def times(self) -> np.ndarray:
        return self.indices * self.step

    @property
    def stop(self) -> int:
        """One past the last lattice index."""
        return self.origin + len(self)

    def norm(self) -> float:
        return float(np.sqrt(self.step) * np.linalg.norm(self.samples))

    def at(self, idx) -> np.ndarray:
        """Values at integer lattice indices, zero outside the support."""
        idx = np.asarray(idx)
        k = idx - self.origin
        inside = (k >= 0) & (k < len(self))
        out = np.zeros(idx.shape, dtype=complex)
        out[inside] = self.samples[k[inside]]
        return out

    def padded(self, origin: int, length: int) -> np.ndarray:
        return self.at(np.arange(origin, origin + length))

    def with_samples(self, samples, origin=None) -> "SampledSignal":
        return SampledSignal(samples, self.origin if origin is None else origin, self.step)

    def trimmed(self, tol: float = 0.0) -> "SampledSignal":
        """Drop leading/trailing samples with modulus <= tol."""
        nz = np.flatnonzero(np.abs(self.samples) > tol)
        if nz.size == 0:
            return SampledSignal(np.zeros(1), self.origin, self.step)
        return SampledSignal(self.samples[nz[0]: nz[-1] + 1], self.origin + nz[0], self.step)

    def __mul__(self, scalar):
        return self.with_samples(self.samples * scalar)

    __rmul__ = __mul__


def union_support(*signals: SampledSignal):
    """(origin, length) of the smallest lattice block containing every support."""
    steps = {s.step for s in signals}
    if len(steps) != 1:
        raise GridMismatch(f"signals live on different lattices: steps {sorted(steps)}")
    lo = min(s.origin for s in signals)
    hi = max(s.stop for s in signals)
    return lo, hi - lo


@dataclass(frozen=True)
class PhaseAlignment:
    beta: float
    residual: float


def phase_invariant_error(f: SampledSignal, g: SampledSignal) -> PhaseAlignment:
    """min over beta of ||f - e^{j beta} g|| / ||f||, with the minimiser.

    The minimiser is ``beta = arg <f, g>`` (inner product conjugate-linear in
    the second slot).
    """
    lo, n = union_support(f, g)
    fv, gv = f.padded(lo, n), g.padded(lo, n)
    fn = np.linalg.norm(fv)
    if fn == 0:
        raise ZeroSignal("reference signal has zero norm")
    inner = np.vdot(gv, fv)
    beta = float(np.angle(inner)) if inner != 0 else 0.0
    if beta >= np.pi:
        beta -= 2 * np.pi
    res = np.linalg.norm(fv - np.exp(1j * beta) * gv) / fn
    return PhaseAlignment(beta, float(res))


def fractional_shift(x: SampledSignal, delta: float, pad: int = 4) -> SampledSignal:
    """Band-limited (FFT phase-ramp) shift: returns samples of ``x(t - delta)``.

    Exact for periodic trigonometric interpolants; for smooth signals decayed
    at the support edges it is spectrally accurate.  Integer multiples of the
    step reduce to a pure re-indexing.
    """
    k = delta / x.step
    whole = int(np.floor(k))
    frac = k - whole
    if abs(frac) < 1e-14 or abs(frac - 1) < 1e-14:
        return SampledSignal(x.samples, x.origin + int(round(k)), x.step)
    n = len(x)
    L = int(2 ** np.ceil(np.log2(max(pad * n, 8))))
    margin = (L - n) // 2
    buf = np.zeros(L, dtype=complex)
    buf[margin: margin + n] = x.samples
    freqs = np.fft.fftfreq(L)
    shifted = np.fft.ifft(np.fft.fft(buf) * np.exp(-2j * np.pi * freqs * frac))
    return SampledSignal(shifted, x.origin - margin + whole, x.step)
