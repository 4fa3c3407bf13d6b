"""Short-time OLCT, its ambiguity identity, and sampled-magnitude interpolation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ambiguity import cross_ambiguity, lattice_lags, spectral_grid
from .core import (
    DegenerateParameterError,
    Grid,
    GridMismatch,
    OLCTError,
    ParameterMatrix,
    SampledSignal,
)
from .transforms import chirped, norm_factor


class NyquistViolation(OLCTError):
    pass


@dataclass(frozen=True, eq=False)
class TimeFrequencyMap:
    """values[i, k] = V(shift_grid[i], freq_grid[k]) (complex, or real for magnitude maps)."""

    values: np.ndarray
    shift_grid: Grid
    freq_grid: Grid
    window_id: str = ""

    def __post_init__(self):
        if self.values.shape != (self.shift_grid.count, self.freq_grid.count):
            raise ValueError("map shape does not match its grids")

    def magnitude(self) -> "TimeFrequencyMap":
        return TimeFrequencyMap(np.abs(self.values), self.shift_grid, self.freq_grid, self.window_id)


def _check(A: ParameterMatrix, f: SampledSignal, phi: SampledSignal):
    if A.is_degenerate:
        raise DegenerateParameterError("STOLCT needs b != 0")
    if f.step != phi.step:
        raise GridMismatch("signal and window live on different lattices")


def _postfactor(A: ParameterMatrix, u):
    a, b, c, d, y0, w0 = A.as_tuple()
    return norm_factor(b) * np.exp(1j * (d / (2 * b) * (u - y0) ** 2 + u * w0))


def _windowed_rows(f: SampledSignal, phi: SampledSignal, shifts_idx) -> np.ndarray:
    """Rows f[n] conj(phi[n - k]) on f's support, one per integer shift k."""
    n = f.indices
    return np.stack([f.samples * np.conj(phi.at(n - k)) for k in shifts_idx]) if len(shifts_idx) else (
        np.zeros((0, len(f)), dtype=complex)
    )


def stolct(
    f: SampledSignal,
    phi: SampledSignal,
    A: ParameterMatrix,
    shift_grid: Grid,
    freq_grid: Grid,
    window_id: str = "",
) -> TimeFrequencyMap:
    """V(v, u) = sum_t f(t) conj(phi(t - v)) K_A(t, u) * step, shifts on the lattice.

    Evaluated as the chirped short-time Fourier transform at xi = (u - y0)/b.
    """
    _check(A, f, phi)
    k = lattice_lags(shift_grid.points, f.step)
    fc = chirped(f, A.ratio)
    rows = _windowed_rows(fc, phi, k)
    u = freq_grid.points
    xi = (u - A.y0) / A.b
    E = np.exp(-1j * np.outer(fc.times, xi))
    vals = (rows @ E) * f.step * _postfactor(A, u)[None, :]
    return TimeFrequencyMap(vals, shift_grid, freq_grid, window_id)


def stolct_offgrid(f: SampledSignal, phi: SampledSignal, A: ParameterMatrix, shifts, u: float, pad: int = 4) -> np.ndarray:
    """V(v, u) at one frequency ``u`` for arbitrary real shifts ``v``.

    The window is translated band-limitedly (FFT phase ramp over a padded
    buffer), which is spectrally accurate for smooth windows that have
    decayed at the ends of their support.
    """
    _check(A, f, phi)
    shifts = np.asarray(shifts, dtype=float)
    step = f.step
    # window buffer wide enough to hold every translate that can touch f
    kmin = int(np.floor(shifts.min() / step)) if shifts.size else 0
    kmax = int(np.ceil(shifts.max() / step)) if shifts.size else 0
    lo = min(f.origin - (phi.stop - 1) - kmax, phi.origin) - 2 * len(phi)
    hi = max(f.stop - phi.origin - kmin, phi.stop) + 2 * len(phi)
    L = 1 << int(np.ceil(np.log2(max(hi - lo + len(phi) * pad, 8))))
    buf = np.zeros(L, dtype=complex)
    buf[phi.origin - lo: phi.stop - lo] = phi.samples
    spec = np.fft.fft(buf)
    freqs = np.fft.fftfreq(L)
    fc = chirped(f, A.ratio)
    xi = (u - A.y0) / A.b
    h = np.zeros(L, dtype=complex)
    h[fc.indices - lo] = fc.samples * np.exp(-1j * xi * fc.times)
    # <h, phi(. - v)> = (1/L) sum_k H_k conj(Phi_k) e^{2 pi j k v / (L step)}
    coef = np.fft.fft(h) * np.conj(spec) / L
    out = np.empty(shifts.size, dtype=complex)
    for s0 in range(0, shifts.size, 512):
        v = shifts[s0:s0 + 512]
        out[s0:s0 + 512] = np.exp(2j * np.pi * np.outer(v / step, freqs)) @ coef
    return out * step * _postfactor(A, np.array([u]))[0]


def stolct_magnitude_identity_residual(
    f: SampledSignal,
    phi: SampledSignal,
    A: ParameterMatrix,
    vgrid: Grid,
    ugrid: Grid,
    lags=None,
    mods: Grid | None = None,
    form: str = "chirped",
) -> float:
    """Max relative deviation between both sides of the STOLCT-ambiguity identity.

    left:  2-D Fourier transform of |V(v, u)|^2, evaluated at (u', -v') with
           v' = k * step / b so that b v' lies on the lag lattice;
    right: e^{j y0 v'} * Af~(b v', u') * conj(A phi(b v', u')), f~ = f e^{j a t^2 / 2b}
           (``form="plain"`` uses the equivalent Af(b v', u' - a v')).

    Compared where |right| > 1e-8 max|right|.  The left side is exact when
    ``vgrid`` covers every overlapping shift and ``ugrid`` spans one full
    spectral period with at least 2N - 1 points.
    """
    _check(A, f, phi)
    a, b = A.a, A.b
    if lags is None:
        K = len(f) - 1
        lags = np.arange(-K, K + 1)
    lags = np.asarray(lags, dtype=int)
    if mods is None:
        V = vgrid.count
        mods = Grid(-np.pi / f.step, 2 * np.pi / (V * f.step), V)

    Vmap = stolct(f, phi, A, vgrid, ugrid)
    m2 = np.abs(Vmap.values) ** 2
    if not np.any(m2):
        return 0.0
    vprime = lags * f.step / b
    u = ugrid.points
    S = m2 @ np.exp(1j * np.outer(u, vprime)) * ugrid.step  # (shifts, lags)
    v = vgrid.points
    lhs = (np.exp(-1j * np.outer(mods.points, v)) @ S).T * vgrid.step  # (lags, mods)

    stride = np.diff(lags)
    if stride.size and (np.any(stride <= 0) or not np.all(stride == stride[0])):
        raise ValueError("lags must be increasing with a constant stride")
    lg = Grid(lags[0] * f.step, (stride[0] if stride.size else 1) * f.step, len(lags))
    Aphi = cross_ambiguity(phi, phi, lg, mods).values
    if form == "chirped":
        ft = chirped(f, a / b)
        Af = cross_ambiguity(ft, ft, lg, mods).values
    elif form == "plain":
        Af = np.empty_like(Aphi)
        for i, k in enumerate(lags):
            row_mods = Grid(mods.start - a * vprime[i], mods.step, mods.count)
            Af[i] = cross_ambiguity(f, f, Grid(k * f.step, 1.0, 1), row_mods).values[0]
    else:
        raise ValueError(f"unknown form {form!r}")
    rhs = np.exp(1j * A.y0 * vprime)[:, None] * Af * np.conj(Aphi)
    scale = np.max(np.abs(rhs))
    if scale == 0:
        return float(np.max(np.abs(lhs)))
    mask = np.abs(rhs) > 1e-8 * scale
    return float(np.max(np.abs(lhs[mask] - rhs[mask]) / np.abs(rhs[mask])))


def ft_band_omega(A: ParameterMatrix, u: float, omega1: float) -> float:
    """max{|omega1 + (u - y0)/b|, |-omega1 + (u - y0)/b|}."""
    xi = (u - A.y0) / A.b
    return max(abs(omega1 + xi), abs(-omega1 + xi))


def olct_band_omega(A: ParameterMatrix, omega: float) -> float:
    """Omega' = max{|omega - y0|, |omega + y0|}."""
    return max(abs(omega - A.y0), abs(omega + A.y0))


@dataclass(frozen=True, eq=False)
class MagnitudeSamples:
    """|V(n * spacing, u)| for integer n, one frequency u."""

    u: float
    spacing: float
    n: np.ndarray
    values: np.ndarray
    omega_u: float

    @property
    def shifts(self):
        return self.n * self.spacing

    @property
    def rate(self):
        return 1.0 / self.spacing


def sample_stolct_magnitude(
    f: SampledSignal,
    phi: SampledSignal,
    A: ParameterMatrix,
    u: float,
    bands,
    n_range=None,
    mode: str = "ft",
    spacing: float | None = None,
) -> MagnitudeSamples:
    """Samples of |V(., u)| at the band-limited sampling spacing.

    ``mode="ft"``: ``bands = (omega1, omega2)`` (window, signal band) and the
    spacing is 1 / (4 Omega^u) with Omega^u from :func:`ft_band_omega`.
    ``mode="olct"``: ``bands = omega`` (OLCT-domain band) and the spacing is
    b / (4 Omega') with Omega' from :func:`olct_band_omega`.
    ``spacing`` overrides that value (used to probe rate violations).
    ``n_range`` defaults to every n whose shift lets the window touch f.
    """
    if mode == "ft":
        omega1, _ = bands
        om = ft_band_omega(A, u, omega1)
        h = 1.0 / (4 * om)
    elif mode == "olct":
        om = olct_band_omega(A, float(bands))
        h = abs(A.b) / (4 * om)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if spacing is not None:
        h = float(spacing)
    if n_range is None:
        vmin = (f.origin - phi.stop) * f.step
        vmax = (f.stop - phi.origin) * f.step
        n = np.arange(int(np.floor(vmin / h)), int(np.ceil(vmax / h)) + 1)
    else:
        n = np.arange(*n_range) if len(n_range) == 2 else np.asarray(n_range)
    vals = np.abs(stolct_offgrid(f, phi, A, n * h, u))
    return MagnitudeSamples(float(u), h, n, vals, float(om))


def interpolate_bandlimited(samples, rate: float, tgrid, band: float | None = None, radius: int = 64, first: int = 0):
    """Truncated Shannon series sum_n s_n sinc(rate * t - n).

    ``samples[i]`` sits at t = (first + i) / rate.  Each output point uses
    the 2 * radius + 1 samples nearest to it; the truncation error is O(1/radius)
    unless the samples have decayed inside that window.  ``band`` is in the
    same units as ``rate`` (critical rate is 2 * band).
    """
    if band is not None and rate < 2 * band * (1 - 1e-12):
        raise NyquistViolation(f"rate {rate:.6g} is below the Nyquist rate {2 * band:.6g}")
    s = np.asarray(samples)
    t = tgrid.points if isinstance(tgrid, Grid) else np.asarray(tgrid, dtype=float)
    x = rate * t - first  # position in sample units
    centre = np.rint(x).astype(int)
    offs = np.arange(-radius, radius + 1)
    idx = centre[:, None] + offs[None, :]
    valid = (idx >= 0) & (idx < s.size)
    w = np.sinc(x[:, None] - idx)
    vals = np.where(valid, s[np.clip(idx, 0, s.size - 1)], 0)
    return np.sum(w * vals, axis=1)


def overlap_shift_grid(f: SampledSignal, phi: SampledSignal) -> Grid:
    """Every lattice shift at which the window touches f's support."""
    lo = f.origin - (phi.stop - 1)
    hi = f.stop - 1 - phi.origin
    return Grid(lo * f.step, f.step, hi - lo + 1)


def full_magnitude_map(f: SampledSignal, phi: SampledSignal, A: ParameterMatrix, u_points: int | None = None) -> TimeFrequencyMap:
    """|V| on all overlapping shifts x one spectral period (2N points by default).

    This is the measurement layout the STOLCT solvers invert exactly.
    """
    n = u_points if u_points is not None else 2 * len(f)
    ugrid = spectral_grid(f, A, length=n)
    return stolct(f, phi, A, overlap_shift_grid(f, phi), ugrid).magnitude()
