import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_matrix, random_signal
from olctkit.ambiguity import spectral_grid
from olctkit.core import DegenerateParameterError, Grid, ParameterMatrix, SampledSignal, phase_invariant_error, special_case
from olctkit.pairs import (
    ConjugateReflect,
    Rotate,
    Shift,
    ZeroFactor,
    apply_trivial_ambiguity,
    autocorrelation,
    certify_pair,
    convolve,
    make_nontrivial_pair,
)
from olctkit.transforms import olct_magnitude

U = Grid(-6.0, 0.05, 240)


def dtft(x, w):
    return np.array([np.sum(x.samples * np.exp(-1j * ww * x.indices)) for ww in w])


def test_rotate_zero_is_identity(rng):
    x = random_signal(rng, 7)
    y = apply_trivial_ambiguity(x, random_matrix(rng), Rotate(0.0))
    assert np.array_equal(y.samples, x.samples) and y.origin == x.origin


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["rotate", "shift", "reflect"]))
def test_trivial_operators_preserve_magnitude(seed, which):
    rng = np.random.default_rng(seed)
    x = random_signal(rng, int(rng.integers(1, 16)), step=float(rng.choice([0.5, 1.0])))
    A = random_matrix(rng)
    kind = {"rotate": Rotate(rng.uniform(-4, 4)), "shift": Shift(int(rng.integers(-8, 9))), "reflect": ConjugateReflect()}[which]
    y = apply_trivial_ambiguity(x, A, kind)
    mx, my = olct_magnitude(x, A, U), olct_magnitude(y, A, U)
    assert np.max(np.abs(mx - my)) <= 1e-10 * max(mx.max(), 1e-300)


def test_reflect_twice_keeps_magnitude(rng):
    x = random_signal(rng, 9)
    A = random_matrix(rng)
    y = apply_trivial_ambiguity(apply_trivial_ambiguity(x, A, ConjugateReflect()), A, ConjugateReflect())
    assert certify_pair(x, y, A, U, tol=1e-10).passed


def test_shift_and_reflect_need_b():
    x = SampledSignal([1, 2])
    with pytest.raises(DegenerateParameterError):
        apply_trivial_ambiguity(x, ParameterMatrix(1, 0, 0, 1), Shift(1))


def test_unknown_kind_rejected(rng):
    with pytest.raises(TypeError):
        apply_trivial_ambiguity(random_signal(rng, 3), random_matrix(rng), "flip")


def test_impulse_factor_gives_identical_pair(rng):
    g1 = random_signal(rng, 5, origin=0)
    pair = make_nontrivial_pair(g1, SampledSignal([1.0], 0), random_matrix(rng))
    assert phase_invariant_error(pair.x, pair.y).residual == 0


def test_hand_checked_pair_for_ft_preset():
    g1 = SampledSignal([1, 2], 0)
    g2 = SampledSignal([1, -1], 0)
    pair = make_nontrivial_pair(g1, g2, special_case("ft"))
    # [1,2]*[1,-1] = [1,1,-2] at 0..2 ; [1,2]*conj([-1,1] at -1..0) = [-1,-1,2] at -1..1
    assert pair.x.origin == 0 and np.allclose(pair.x.samples, [1, 1, -2])
    assert pair.y.origin == -1 and np.allclose(pair.y.samples, [-1, -1, 2])
    w = np.linspace(-np.pi, np.pi, 101)
    assert np.allclose(np.abs(dtft(pair.x, w)), np.abs(dtft(pair.y, w)), atol=1e-12)
    assert pair.report.passed


def test_random_pair_is_certified_and_distinct():
    rng = np.random.default_rng(8)
    g1, g2 = random_signal(rng, 5, origin=0), random_signal(rng, 4, origin=0)
    A = random_matrix(rng)
    pair = make_nontrivial_pair(g1, g2, A, beta=1.1, n0=3)
    assert pair.report.max_dev <= 1e-10
    assert phase_invariant_error(pair.x, pair.y).residual >= 0.05
    assert pair.report.distinct and not pair.report.trivial_equivalent
    assert pair.provenance["n0"] == 3 and pair.provenance["beta"] == 1.1


def test_zero_factor_rejected(rng):
    with pytest.raises(ZeroFactor):
        make_nontrivial_pair(SampledSignal([0, 0]), random_signal(rng, 3), random_matrix(rng))
    with pytest.raises(DegenerateParameterError):
        make_nontrivial_pair(random_signal(rng, 2), random_signal(rng, 3), ParameterMatrix(1, 0, 0, 1))


def test_convolution_matches_numpy():
    g1, g2 = SampledSignal([1, 2, 3], -1, 0.5), SampledSignal([1j, 1], 2, 0.5)
    c = convolve(g1, g2)
    assert c.origin == 1 and np.allclose(c.samples, np.convolve([1, 2, 3], [1j, 1]) * 0.5)


def test_autocorrelation_of_impulse():
    a = autocorrelation(SampledSignal([1.0], 0))
    assert a.origin == 0 and np.array_equal(a.samples, [1.0])


def test_autocorrelation_double_loop_oracle():
    x = SampledSignal([1, 1j], 0)
    a = autocorrelation(x)
    N = len(x)
    oracle = {n: sum(np.conj(x.samples[k]) * x.samples[k + n] for k in range(N) if 0 <= k + n < N) for n in range(-N + 1, N)}
    assert a.origin == -1
    assert np.allclose(a.samples, [oracle[n] for n in range(-1, 2)])
    L = 8
    A = np.fft.fft(np.roll(np.pad(a.samples, (0, L - 3)), -1))
    assert np.allclose(A, np.abs(np.fft.fft(x.samples, L)) ** 2, atol=1e-12)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1))
def test_autocorrelation_properties(seed):
    rng = np.random.default_rng(seed)
    x = random_signal(rng, int(rng.integers(1, 20)))
    a = autocorrelation(x)
    assert a.samples[len(x) - 1] == pytest.approx(np.sum(np.abs(x.samples) ** 2))
    assert np.allclose(a.samples[::-1], np.conj(a.samples), atol=1e-14)
    spec = np.fft.fft(np.roll(np.pad(a.samples, (0, 4)), -(len(x) - 1)))
    assert np.max(np.abs(spec.imag)) <= 1e-9 * np.max(np.abs(spec))
    assert np.min(spec.real) >= -1e-12 * np.max(np.abs(spec))


def test_certify_rotation_is_trivial(rng):
    x = random_signal(rng, 8)
    A = random_matrix(rng)
    rep = certify_pair(x, x * np.exp(0.7j), A)
    assert rep.max_dev <= 1e-12 and rep.trivial_equivalent and not rep.distinct


def test_certify_scaled_copy_fails(rng):
    x = random_signal(rng, 8)
    A = random_matrix(rng)
    rep = certify_pair(x, 2 * x, A, U)
    assert rep.max_dev == pytest.approx(olct_magnitude(x, A, U).max(), rel=1e-12)
    assert rep.distinct and not rep.trivial_equivalent and not rep.passed


def test_certify_recognises_shift(rng):
    x = random_signal(rng, 6)
    A = random_matrix(rng)
    y = apply_trivial_ambiguity(apply_trivial_ambiguity(x, A, ConjugateReflect()), A, Shift(4))
    assert certify_pair(x, y, A).trivial_equivalent


def test_unrelated_signals_rarely_share_magnitudes():
    rng = np.random.default_rng(99)
    big = 0
    for _ in range(20):
        x, y = random_signal(rng, 6), random_signal(rng, 6)
        y = y * (np.linalg.norm(x.samples) / np.linalg.norm(y.samples))
        A = random_matrix(rng)
        big += certify_pair(x, y, A, spectral_grid(x, A)).max_dev > 1e-2
    assert big >= 18
