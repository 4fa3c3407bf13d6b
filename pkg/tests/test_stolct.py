import numpy as np
import pytest

from conftest import gaussian, random_matrix, random_signal
from olctkit.ambiguity import spectral_grid
from olctkit.core import DegenerateParameterError, Grid, GridMismatch, ParameterMatrix, SampledSignal, special_case
from olctkit.stolct import (
    NyquistViolation,
    TimeFrequencyMap,
    ft_band_omega,
    full_magnitude_map,
    interpolate_bandlimited,
    olct_band_omega,
    overlap_shift_grid,
    sample_stolct_magnitude,
    stolct,
    stolct_magnitude_identity_residual,
    stolct_offgrid,
)
from olctkit.transforms import olct_forward
from test_transforms import literal_kernel


def direct_stolct(f, phi, A, shifts, u):
    out = np.empty((len(shifts), len(u)), dtype=complex)
    for i, v in enumerate(shifts):
        k = int(round(v / f.step))
        w = f.samples * np.conj(phi.at(f.indices - k))
        for j, uu in enumerate(u):
            out[i, j] = np.sum(w * literal_kernel(A, f.times, uu)) * f.step
    return out


def test_flat_window_gives_plain_transform(rng):
    f = random_signal(rng, 20, step=0.5)
    phi = SampledSignal(np.ones(len(f)), f.origin, f.step)
    A = random_matrix(rng)
    ug = Grid(-3, 0.1, 61)
    V = stolct(f, phi, A, Grid(0.0, 0.5, 1), ug)
    assert np.allclose(V.values[0], olct_forward(f, A, ug).values, atol=1e-12, rtol=0)


def test_impulse_signal_traces_the_window():
    f = SampledSignal([1.0], 3, 1.0)
    phi = gaussian(2.0, 1.0)
    A = ParameterMatrix(1.0, 0.8, -0.3, 0.76, 0.4, -0.7)
    shifts = Grid(-6.0, 1.0, 19)
    V = stolct(f, phi, A, shifts, Grid(-2, 0.25, 17))
    expected = np.abs(phi.at(3 - np.rint(shifts.points).astype(int))) / np.sqrt(2 * np.pi * 0.8)
    assert np.allclose(np.abs(V.values), expected[:, None], atol=1e-15)


def test_matches_direct_kernel_sum(rng):
    f = random_signal(rng, 14, step=0.5)
    phi = random_signal(rng, 6, step=0.5)
    A = random_matrix(rng)
    shifts = Grid(-4.0, 0.5, 17)
    ug = Grid(-2.0, 0.3, 15)
    got = stolct(f, phi, A, shifts, ug).values
    assert np.allclose(got, direct_stolct(f, phi, A, shifts.points, ug.points), atol=1e-10, rtol=0)


def test_magnitude_blind_to_global_phase(rng):
    f, phi = random_signal(rng, 14), random_signal(rng, 5)
    A = random_matrix(rng)
    m1 = full_magnitude_map(f, phi, A).values
    m2 = full_magnitude_map(f * np.exp(1.3j), phi, A).values
    assert np.max(np.abs(m1 - m2)) <= 1e-12 * m1.max()


def test_offgrid_agrees_on_lattice():
    f, phi = gaussian(0.6, 0.1), gaussian(0.3, 0.1)
    A = special_case("frft", 0.9)
    shifts = overlap_shift_grid(f, phi)
    lattice = stolct(f, phi, A, shifts, Grid(0.7, 1.0, 1)).values[:, 0]
    assert np.allclose(stolct_offgrid(f, phi, A, shifts.points, 0.7), lattice, atol=1e-13)


def test_preconditions():
    f = gaussian(0.6, 0.1)
    with pytest.raises(DegenerateParameterError):
        stolct(f, f, ParameterMatrix(1, 0, 0, 1), Grid(0, 0.1, 1), Grid(0, 1, 1))
    with pytest.raises(GridMismatch):
        stolct(f, gaussian(0.6, 0.2), special_case("ft"), Grid(0, 0.1, 1), Grid(0, 1, 1))
    with pytest.raises(GridMismatch):
        stolct(f, f, special_case("ft"), Grid(0.05, 0.1, 1), Grid(0, 1, 1))
    with pytest.raises(ValueError):
        TimeFrequencyMap(np.zeros((2, 3)), Grid(0, 1, 2), Grid(0, 1, 4))


def test_identity_residual_gaussians():
    f = gaussian(0.8, 0.05, length=256, origin=-128)
    phi = gaussian(0.5, 0.05, length=256, origin=-128)
    A = special_case("frft", np.pi / 3)
    res = stolct_magnitude_identity_residual(
        f, phi, A, overlap_shift_grid(f, phi), spectral_grid(f, A, length=512), lags=np.arange(-40, 41, 8)
    )
    assert res <= 1e-4


def test_identity_residual_zero_row_and_plain_form():
    f, phi = gaussian(0.5, 0.1), gaussian(0.4, 0.1)
    A = ParameterMatrix(1.0, 0.8, -0.3, 0.76, 0.4, -0.7)
    vg, ug = overlap_shift_grid(f, phi), spectral_grid(f, A, length=2 * len(f))
    assert stolct_magnitude_identity_residual(f, phi, A, vg, ug, lags=[0]) <= 1e-4
    assert stolct_magnitude_identity_residual(f, phi, A, vg, ug, lags=np.arange(-6, 7), form="plain") <= 1e-4


def test_identity_residual_zero_signal():
    f = SampledSignal(np.zeros(8), -4, 0.1)
    phi = gaussian(0.3, 0.1)
    A = special_case("frft", 1.0)
    assert stolct_magnitude_identity_residual(f, phi, A, overlap_shift_grid(f, phi), spectral_grid(f, A)) == 0.0


def test_identity_rejects_irregular_lags():
    f = gaussian(0.5, 0.1)
    A = special_case("frft", 1.0)
    with pytest.raises(ValueError):
        stolct_magnitude_identity_residual(f, f, A, overlap_shift_grid(f, f), spectral_grid(f, A), lags=[0, 1, 3])


def test_band_formulas():
    A = ParameterMatrix(0.0, 1.0, -1.0, 0.0)
    assert ft_band_omega(A, 0.0, 2.5) == 2.5
    B = ParameterMatrix(1.0, 0.8, -0.3, 0.76, 0.4, -0.7)
    assert ft_band_omega(B, B.y0, 1.7) == pytest.approx(1.7)
    C = ParameterMatrix(0.5, 2.0, 0.0, 2.0)
    assert ft_band_omega(C, 6.0, 1.0) == pytest.approx(4.0)
    assert olct_band_omega(B, 3.0) == pytest.approx(3.4)


def test_sample_spacing_matches_formula():
    f, phi = gaussian(0.5, 0.1), gaussian(0.4, 0.1)
    C = ParameterMatrix(0.5, 2.0, 0.0, 2.0)
    s = sample_stolct_magnitude(f, phi, C, 6.0, (1.0, 5.0))
    assert s.spacing == pytest.approx(1 / 16) and s.omega_u == pytest.approx(4.0)
    assert s.rate == pytest.approx(16)
    B = ParameterMatrix(1.0, 0.8, -0.3, 0.76, 0.4, -0.7)
    s = sample_stolct_magnitude(f, phi, B, 0.0, 3.0, mode="olct")
    assert s.spacing == pytest.approx(0.8 / (4 * 3.4))
    assert np.allclose(s.values, np.abs(stolct_offgrid(f, phi, B, s.shifts, 0.0)))
    with pytest.raises(ValueError):
        sample_stolct_magnitude(f, phi, B, 0.0, 3.0, mode="wavelet")


def test_interpolation_reproduces_samples():
    n = np.arange(40)
    s = np.sin(0.7 * n)
    assert np.allclose(interpolate_bandlimited(s, 2.0, n / 2.0), s, atol=1e-15)
    assert np.all(interpolate_bandlimited(np.zeros(10), 1.0, np.linspace(0, 9, 37)) == 0)


def test_interpolation_accuracy_radius_64():
    rate = 2.0  # samples per unit time
    t_s = np.arange(-200, 201) / rate
    sig = lambda t: np.exp(-t**2 / (2 * 3.0**2)) * np.cos(1.3 * t)  # noqa: E731
    fine = np.arange(-160, 161) / (4 * rate)
    got = interpolate_bandlimited(sig(t_s), rate, fine, radius=64, first=-200)
    assert np.max(np.abs(got - sig(fine))) <= 1e-4


def test_interpolation_rejects_slow_rate():
    with pytest.raises(NyquistViolation):
        interpolate_bandlimited(np.ones(5), 1.0, [0.5], band=0.6)


def test_full_map_layout():
    f, phi = random_signal(np.random.default_rng(0), 10), random_signal(np.random.default_rng(1), 4)
    m = full_magnitude_map(f, phi, special_case("frft", 0.5))
    assert m.values.shape == (10 + 4 - 1, 20)
    assert np.all(m.values >= 0)
