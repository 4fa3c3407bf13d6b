import numpy as np
import pytest

from olctkit.core import ParameterMatrix, SampledSignal

_ACCEPTANCE = []


def record(criterion: str, passed: bool, detail: str):
    _ACCEPTANCE.append((criterion, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(_ACCEPTANCE, key=lambda r: (int(r[0].split("-")[1].split()[0]), r[0])):
        terminalreporter.write_line(f"{criterion}: {'PASS' if passed else 'FAIL'}  {detail}")


def gaussian(sigma, step, half_width=4.5, center=0.0, origin=None, length=None):
    """Real Gaussian on a lattice block covering +-half_width sigma (or a given block)."""
    if length is None:
        n = int(np.ceil(half_width * sigma / step))
        origin, length = -n, 2 * n + 1
    t = (origin + np.arange(length)) * step
    return SampledSignal(np.exp(-((t - center) ** 2) / (2 * sigma**2)), origin, step)


def random_matrix(rng, b_range=(0.3, 2.0), offsets=True):
    """Random valid parameter matrix with b > 0."""
    a, c = rng.uniform(-1.5, 1.5, 2)
    b = rng.uniform(*b_range)
    d = (1 + b * c) / a if abs(a) > 1e-3 else 1.0
    if abs(a) <= 1e-3:
        a = 0.0
        c = -1.0 / b
        d = rng.uniform(-1, 1)
    y0, w0 = rng.uniform(-1, 1, 2) if offsets else (0.0, 0.0)
    return ParameterMatrix(float(a), float(b), float(c), float(d), float(y0), float(w0))


def random_signal(rng, n, origin=None, step=1.0):
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return SampledSignal(x, -(n // 2) if origin is None else origin, step)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
