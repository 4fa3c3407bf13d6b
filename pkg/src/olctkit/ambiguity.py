"""(Cross-)ambiguity functions and their OLCT-domain relations.

Lags are restricted to the sample lattice, using the integer-lag form

    A(f, g)(tau, eta) = e^{j tau eta / 2} * sum_t f(t) conj(g(t - tau)) e^{-j eta t} * step

which is the half-shift definition after the substitution t -> t + tau/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    Grid,
    GridMismatch,
    ParameterMatrix,
    SampledSignal,
    fractional_shift,
    union_support,
)
from .transforms import Spectrum, olct_forward


@dataclass(frozen=True, eq=False)
class AmbiguitySurface:
    """values[i, k] = A(f, g)(lag_grid[i], mod_grid[k])."""

    values: np.ndarray
    lag_grid: Grid
    mod_grid: Grid

    def __post_init__(self):
        if self.values.shape != (self.lag_grid.count, self.mod_grid.count):
            raise ValueError("surface shape does not match its grids")

    @property
    def lags(self):
        return self.lag_grid.points

    @property
    def mods(self):
        return self.mod_grid.points


def lattice_lags(lags, step: float) -> np.ndarray:
    """Integer lattice offsets for physical lags; GridMismatch if any is off-lattice."""
    k = np.asarray(lags, dtype=float) / step
    ki = np.rint(k)
    if np.max(np.abs(k - ki), initial=0.0) > 1e-9:
        raise GridMismatch(f"lags are not integer multiples of the sample step {step}")
    return ki.astype(int)


def lag_products(f: SampledSignal, g: SampledSignal, lags_idx) -> tuple[np.ndarray, np.ndarray]:
    """Rows ``f[n] * conj(g[n - k])`` for each integer lag ``k``, on a common index block.

    Returns (indices, products) with products of shape (len(lags_idx), len(indices)).
    """
    lo, n = union_support(f, g)
    kmax = int(np.max(np.abs(lags_idx), initial=0))
    idx = np.arange(lo, lo + n)
    fv = f.at(idx)
    gblock = g.at(np.arange(lo - kmax, lo + n + kmax))
    rows = np.empty((len(lags_idx), n), dtype=complex)
    for i, k in enumerate(lags_idx):
        rows[i] = fv * np.conj(gblock[kmax - k: kmax - k + n])
    return idx, rows


def cross_ambiguity(f: SampledSignal, g: SampledSignal, lag_grid: Grid, mod_grid: Grid) -> AmbiguitySurface:
    """A(f, g) on ``lag_grid x mod_grid``; g occupies the conjugated slot."""
    union_support(f, g)
    step = f.step
    k = lattice_lags(lag_grid.points, step)
    idx, rows = lag_products(f, g, k)
    eta = mod_grid.points
    t = idx * step
    E = np.exp(-1j * np.outer(t, eta))
    tau = k * step
    vals = (rows @ E) * step * np.exp(0.5j * np.outer(tau, eta))
    return AmbiguitySurface(vals, lag_grid, mod_grid)


def ambiguity(f: SampledSignal, lag_grid: Grid, mod_grid: Grid) -> AmbiguitySurface:
    return cross_ambiguity(f, f, lag_grid, mod_grid)


def _shift_linear(g: SampledSignal, delta: float) -> SampledSignal:
    """Samples of g(t - delta) on g's lattice by linear interpolation."""
    k = delta / g.step
    whole = int(np.floor(k))
    frac = k - whole
    n = np.arange(g.origin + whole, g.stop + whole + 1)
    vals = (1 - frac) * g.at(n - whole) + frac * g.at(n - whole - 1)
    return SampledSignal(vals, n[0], g.step)


def ambiguity_point(f: SampledSignal, g: SampledSignal, tau: float, eta: float, method: str = "sinc") -> complex:
    """A(f, g)(tau, eta) for an arbitrary lag.

    Off-lattice lags shift ``g`` by ``tau`` either band-limitedly (``"sinc"``,
    FFT phase ramp) or by ``"linear"`` interpolation.
    """
    union_support(f, g)
    if method == "sinc":
        gs = fractional_shift(g, tau)
    elif method == "linear":
        gs = _shift_linear(g, tau)
    else:
        raise ValueError(f"unknown interpolation method {method!r}")
    lo, n = union_support(f, gs)
    idx = np.arange(lo, lo + n)
    t = idx * f.step
    s = np.sum(f.at(idx) * np.conj(gs.at(idx)) * np.exp(-1j * eta * t)) * f.step
    return complex(np.exp(0.5j * tau * eta) * s)


def spectral_grid(f: SampledSignal, A: ParameterMatrix, oversample: int = 4, length: int | None = None) -> Grid:
    """One spectral period centred on y0, with ``oversample * N`` points by default."""
    n = length if length is not None else max(oversample * len(f), 8)
    du = 2 * np.pi * abs(A.b) / (n * f.step)
    return Grid(A.y0 - (n // 2) * du, du, n)


@dataclass(frozen=True)
class PushforwardCheck:
    lhs: complex
    rhs: complex
    method: str
    mapped_point: tuple

    @property
    def relative_error(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return abs(self.lhs - self.rhs) / scale if scale else 0.0


def olct_ambiguity_pushforward(
    f: SampledSignal,
    g: SampledSignal,
    A: ParameterMatrix,
    tau: float,
    eta: float,
    method: str = "sinc",
    ugrid: Grid | None = None,
) -> PushforwardCheck:
    """Both sides of the OLCT ambiguity relation at one (tau, eta).

    lhs: A(O^A f, O^A g)(tau, eta) by the half-shift quadrature over the
    spectral variable, with the spectra evaluated directly at ``u +- tau/2``.
    rhs: e^{j(tau w0 - eta y0)} * A(f, g)(d tau - b eta, a eta - c tau) from
    the original signals (``method`` controls the off-lattice shift).

    With the symmetric (half-shift) ambiguity the only phase factor is
    ``e^{j(tau w0 - eta y0)}``; the extra ``(d tau - b eta)(a eta - c tau)/2``
    term belongs to the one-sided correlation ``e^{-j lag mod / 2} A``.
    """
    a, b, c, d, y0, w0 = A.as_tuple()
    if ugrid is None:
        ugrid = spectral_grid(f, A)
    plus = Grid(ugrid.start + tau / 2, ugrid.step, ugrid.count)
    minus = Grid(ugrid.start - tau / 2, ugrid.step, ugrid.count)
    Fp = olct_forward(f, A, plus).values
    Gm = olct_forward(g, A, minus).values
    u = ugrid.points
    lhs = np.sum(Fp * np.conj(Gm) * np.exp(-1j * u * eta)) * ugrid.step

    lag = d * tau - b * eta
    mod = a * eta - c * tau
    phase = tau * w0 - eta * y0
    rhs = np.exp(1j * phase) * ambiguity_point(f, g, lag, mod, method)
    return PushforwardCheck(complex(lhs), complex(rhs), method, (lag, mod))


@dataclass(frozen=True, eq=False)
class AmbiguitySlice:
    """Values of Af along the line (lag, mod) = (-b eta, a eta)."""

    etas: np.ndarray
    points: np.ndarray  # shape (K, 2): (lag, modulation)
    values: np.ndarray


def magnitude_to_ambiguity_slice(mag2, ugrid: Grid, A: ParameterMatrix, etas=None) -> AmbiguitySlice:
    """Recover Af(-b eta, a eta) = e^{j eta y0} * F[|O^A f|^2](eta).

    ``mag2`` holds |O^A f|^2 sampled on ``ugrid``; the Fourier transform is the
    Riemann sum over that grid.  Default ``etas`` are the DFT-dual frequencies
    of the grid.
    """
    a, b = A.a, A.b
    mag2 = np.asarray(mag2, dtype=float)
    if mag2.shape != (ugrid.count,):
        raise ValueError("mag2 length does not match the u-grid")
    if etas is None:
        M = ugrid.count
        etas = 2 * np.pi * (np.arange(M) - M // 2) / (M * ugrid.step)
    etas = np.asarray(etas, dtype=float)
    u = ugrid.points
    F = np.exp(-1j * np.outer(etas, u)) @ mag2 * ugrid.step
    vals = np.exp(1j * etas * A.y0) * F
    pts = np.column_stack([-b * etas, a * etas])
    return AmbiguitySlice(etas, pts, vals)
