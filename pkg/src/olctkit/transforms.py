"""Forward/inverse discrete OLCT, the chirp-FFT fast path and magnitudes."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    DegenerateGridError,
    DegenerateParameterError,
    GridMismatch,
    Grid,
    ParameterMatrix,
    SampledSignal,
    invert_parameters,
)


@dataclass(frozen=True, eq=False)
class Spectrum:
    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.count,):
            raise ValueError(f"{v.shape[0] if v.ndim else 0} values for a grid of {self.grid.count}")
        object.__setattr__(self, "values", v)

    @property
    def points(self):
        return self.grid.points


def norm_factor(b: float) -> complex:
    """1 / sqrt(j 2 pi b), principal branch."""
    return 1.0 / np.sqrt(2j * np.pi * b)


def kernel(A: ParameterMatrix, t, u) -> np.ndarray:
    """K_A(t, u) evaluated on the outer product of ``t`` and ``u`` (shape len(u) x len(t))."""
    a, b, c, d, y0, w0 = A.as_tuple()
    t = np.asarray(t, dtype=float)[None, :]
    u = np.asarray(u, dtype=float)[:, None]
    # expanded form of (j/2b)[du^2 + dy0^2 + at^2 + 2t(y0-u) - 2u(dy0 - bw0)]
    phase = (a * t**2 + d * (u - y0) ** 2 - 2 * t * (u - y0)) / (2 * b) + u * w0
    return norm_factor(b) * np.exp(1j * phase)


def _chirp_branch(x: SampledSignal, A: ParameterMatrix, u: np.ndarray, interpolate: bool):
    a, b, c, d, y0, w0 = A.as_tuple()
    pos = d * (u - y0) / x.step - x.origin
    if interpolate:
        k = np.arange(len(x))
        vals = np.interp(pos, k, x.samples.real, left=0.0, right=0.0) + 1j * np.interp(
            pos, k, x.samples.imag, left=0.0, right=0.0
        )
    else:
        ipos = np.rint(pos)
        if np.max(np.abs(pos - ipos), initial=0.0) > 1e-9:
            raise DegenerateGridError("d(u - y0) falls between samples and interpolation is disabled")
        vals = x.at(ipos.astype(int) + x.origin)
    return np.sqrt(complex(d)) * np.exp(1j * (c * d / 2 * (u - y0) ** 2 + u * w0)) * vals


def olct_forward(x: SampledSignal, A: ParameterMatrix, ugrid: Grid, interpolate: bool = True) -> Spectrum:
    """Direct O(N M) evaluation of sum_n x[n] K_A(t_n, u) * step on ``ugrid``.

    For ``b == 0`` the transform is the chirp-multiplied, rescaled signal;
    off-lattice arguments are linearly interpolated unless ``interpolate`` is
    false, in which case they raise :class:`DegenerateGridError`.
    """
    u = ugrid.points
    if A.is_degenerate:
        return Spectrum(_chirp_branch(x, A, u, interpolate), ugrid)
    vals = kernel(A, x.times, u) @ x.samples * x.step
    return Spectrum(vals, ugrid)


def fast_grid(x: SampledSignal, A: ParameterMatrix, pad: int | None = None) -> Grid:
    """Output grid of :func:`olct_fast`: one full period ``u = y0 + b xi``."""
    L = _fft_length(len(x), pad)
    du = abs(A.b) * 2 * np.pi / (L * x.step)
    return Grid(A.y0 - L // 2 * du, du, L)


def _fft_length(n: int, pad: int | None) -> int:
    if pad is not None:
        if pad < n:
            raise ValueError(f"FFT length {pad} shorter than the signal ({n})")
        return int(pad)
    return 1 << int(np.ceil(np.log2(max(2 * n, 2))))


def chirped(x: SampledSignal, ratio: float, sign: int = 1) -> SampledSignal:
    """x(t) * exp(sign * j ratio t^2 / 2)."""
    return x.with_samples(x.samples * np.exp(sign * 0.5j * ratio * x.times**2))


def olct_fast(x: SampledSignal, A: ParameterMatrix, pad: int | None = None) -> Spectrum:
    """Chirp multiply, FFT, chirp/offset post-multiply.

    The result lives on :func:`fast_grid`, i.e. ``u_m = y0 + b xi_m`` with
    ``xi_m`` the (shifted) FFT bin frequencies of the padded signal.
    """
    if A.is_degenerate:
        raise DegenerateParameterError("fast path needs b != 0")
    a, b, c, d, y0, w0 = A.as_tuple()
    L = _fft_length(len(x), pad)
    z = np.zeros(L, dtype=complex)
    z[: len(x)] = chirped(x, a / b).samples
    grid = fast_grid(x, A, L)
    u = grid.points
    xi = (u - y0) / b
    bins = np.rint(xi * L * x.step / (2 * np.pi)).astype(int) % L
    Z = np.fft.fft(z)[bins]
    # FFT indexes from the first sample; restore the absolute time origin
    Z = Z * np.exp(-1j * xi * x.origin * x.step) * x.step
    vals = norm_factor(b) * np.exp(1j * (d / (2 * b) * (u - y0) ** 2 + u * w0)) * Z
    return Spectrum(vals, grid)


def olct_inverse(S: Spectrum, A: ParameterMatrix, tgrid: Grid) -> SampledSignal:
    """Riemann discretisation of f(t) = C * integral O^A f(u) K_{A^-1}(u, t) du."""
    if A.is_degenerate:
        raise DegenerateParameterError("inverse needs b != 0")
    origin = tgrid.start / tgrid.step
    if abs(origin - round(origin)) > 1e-9:
        raise GridMismatch("tgrid start must be an integer multiple of its step")
    span = tgrid.step * tgrid.count
    if S.grid.step > 2 * np.pi * abs(A.b) / span * (1 + 1e-9):
        warnings.warn(
            f"u-grid step {S.grid.step:.3g} exceeds 2*pi*b/span = {2 * np.pi * abs(A.b) / span:.3g}; "
            "the inversion sum may alias",
            RuntimeWarning,
            stacklevel=2,
        )
    period = 2 * np.pi * abs(A.b) / tgrid.step
    if S.grid.step * S.grid.count > period * (1 + 1e-9):
        warnings.warn(
            f"u-grid spans {S.grid.step * S.grid.count:.4g} > one spectral period {period:.4g}; "
            "lattice replicas will be summed more than once",
            RuntimeWarning,
            stacklevel=2,
        )
    Ainv = invert_parameters(A)
    K = kernel(Ainv, S.points, tgrid.points)
    vals = A.inverse_constant() * (K @ S.values) * S.grid.step
    return SampledSignal(vals, int(round(origin)), tgrid.step)


def olct_magnitude(x: SampledSignal, A: ParameterMatrix, ugrid: Grid, **kw) -> np.ndarray:
    return np.abs(olct_forward(x, A, ugrid, **kw).values)
