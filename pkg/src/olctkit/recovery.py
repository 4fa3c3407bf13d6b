"""Constructive phase retrieval from OLCT / STOLCT magnitudes.

Every solver funnels into the same object: the lag-product matrix
``M[t, s] = f~(t) conj(f~(s))`` on the signal lattice, whose leading
eigenvector returns ``f~`` up to a global phase.  The solvers differ only in
how they obtain the lag rows ``r_k[t] = f~(t) conj(f~(t - k))``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .ambiguity import cross_ambiguity
from .core import (
    BandLimit,
    DegenerateParameterError,
    Grid,
    GridMismatch,
    OLCTError,
    ParameterMatrix,
    SampledSignal,
    phase_invariant_error,
)
from .io import signal_to_dict
from .stolct import (
    MagnitudeSamples,
    NyquistViolation,
    TimeFrequencyMap,
    ft_band_omega,
    interpolate_bandlimited,
    olct_band_omega,
    stolct,
)
from .transforms import Spectrum, chirped, olct_forward


class InsufficientDiversity(OLCTError):
    pass


class MissingLag(OLCTError):
    pass


class WindowVanishes(OLCTError):
    pass


class NegativeEnergy(OLCTError):
    pass


class AnchorDegenerate(OLCTError):
    pass


class RankDeficiency(UserWarning):
    pass


UNIQUE = "unique_up_to_sign"
SEPARABLE = "separable_ambiguous"


@dataclass(frozen=True, eq=False)
class LagProductMatrix:
    entries: np.ndarray
    origin: int
    step: float

    @property
    def size(self):
        return self.entries.shape[0]


@dataclass(eq=False)
class RecoveryReport:
    signal: SampledSignal
    residual: float
    diagnostics: dict = field(default_factory=dict)
    verdict: str | None = None

    def __post_init__(self):
        if not self.residual >= 0:
            raise ValueError(f"residual must be nonnegative, got {self.residual}")

    def to_dict(self) -> dict:
        out = {
            "residual": float(self.residual),
            "diagnostics": {k: _plain(v) for k, v in self.diagnostics.items()},
            "signal": signal_to_dict(self.signal),
        }
        if self.verdict is not None:
            out["verdict"] = self.verdict
        return out


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    return v


# -- lag-product matrix --------------------------------------------------------


def assemble_lag_matrix(rows: dict, origin: int, length: int, step: float = 1.0) -> LagProductMatrix:
    """entries[t, t - k] = rows[k][t], Hermitian-symmetrised.

    ``rows[k]`` is indexed by position in the support block
    ``origin .. origin + length - 1``; positions where ``t - k`` leaves the
    block are ignored.
    """
    N = int(length)
    M = np.zeros((N, N), dtype=complex)
    for k in range(-(N - 1), N):
        if k not in rows:
            raise MissingLag(f"lag {k} missing (need every lag in [{-(N - 1)}, {N - 1}])")
        r = np.asarray(rows[k])
        t = np.arange(max(k, 0), min(N, N + k))
        M[t, t - k] = r[t]
    M = 0.5 * (M + M.conj().T)
    return LagProductMatrix(M, origin, step)


def leading_eigenpair(M: np.ndarray, max_iter: int = 200, tol: float = 1e-12, start=None):
    """Power iteration from the all-ones vector; returns (eigenvalue, unit vector)."""
    n = M.shape[0]
    x = np.ones(n, dtype=complex) if start is None else np.asarray(start, dtype=complex)
    x = x / np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = M @ x
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0, x
        lam_new = float(np.real(np.vdot(x, y)))
        x = y / ny
        if abs(lam_new - lam) <= tol * max(abs(lam_new), 1e-300):
            lam = lam_new
            break
        lam = lam_new
    lam = float(np.real(np.vdot(x, M @ x)))
    return lam, x


def rank_one_factor(L: LagProductMatrix):
    """Leading factor sqrt(lambda1) v and the ratio |lambda2| / lambda1."""
    M = L.entries
    lam1, v = leading_eigenpair(M)
    if lam1 <= 0:
        return np.zeros(L.size, dtype=complex), 1.0
    # deflate, then restart from a vector orthogonal to v
    D = M - lam1 * np.outer(v, v.conj())
    start = np.ones(L.size, dtype=complex)
    start -= np.vdot(v, start) * v
    if np.linalg.norm(start) < 1e-12:
        start = np.roll(v, 1)
    lam2 = 0.0
    if L.size > 1:
        lam2, _ = leading_eigenpair(D, start=start)
        # power iteration returns the dominant-magnitude eigenvalue
        lam2 = abs(lam2)
    return np.sqrt(lam1) * v, lam2 / lam1


def _finish(ftilde: np.ndarray, origin: int, step: float, A: ParameterMatrix | None) -> SampledSignal:
    sig = SampledSignal(ftilde, origin, step)
    if A is not None:
        sig = chirped(sig, A.ratio, sign=-1)
    return sig


# -- multi-OLCT ambiguity tomography -------------------------------------------


def _line_values(A: ParameterMatrix, spec: Spectrum, etas: np.ndarray) -> np.ndarray:
    """Af(-b eta, a eta) = e^{j eta y0} F[|O^A f|^2](eta)."""
    u = spec.points
    mag2 = np.real(spec.values)
    F = np.exp(-1j * np.outer(etas, u)) @ mag2 * spec.grid.step
    return np.exp(1j * etas * A.y0) * F


def _diagonal_from_offdiagonal(M: np.ndarray, energy: float, step: float) -> np.ndarray:
    """|f_t|^2 from |M_ts| = |f_t||f_s| by weighted least squares on logarithms."""
    N = M.shape[0]
    if N == 1:
        return np.array([energy / step])
    mag = np.abs(M)
    scale = mag.max()
    if scale == 0:
        return np.full(N, energy / step / N)
    ti, si = np.nonzero(np.triu(mag > 1e-12 * scale, k=1))
    w = mag[ti, si] / scale
    rows = np.zeros((ti.size, N))
    rows[np.arange(ti.size), ti] = 1.0
    rows[np.arange(ti.size), si] = 1.0
    rhs = np.log(mag[ti, si])
    connected = np.zeros(N, bool)
    connected[ti] = connected[si] = True
    sol, *_ = np.linalg.lstsq(rows[:, connected] * w[:, None], rhs * w, rcond=None)
    d = np.zeros(N)
    d[connected] = np.exp(2 * sol)
    return d


def recover_from_multi_olct(
    mags,
    support,
    truth: SampledSignal | None = None,
    rank_gap_min: float = 10.0,
    misfit_max: float = 1e-2,
) -> RecoveryReport:
    """Recover f (up to global phase) from |O^A f|^2 for many matrices A.

    ``mags`` is a sequence of (ParameterMatrix, Spectrum) with the spectrum
    holding |O^A f|^2 on a uniform u-grid (one spectral period with at least
    2N - 1 points makes every Fourier coefficient exact).  ``support`` is
    (origin, length, step) of the unknown signal.

    For each lattice lag k > 0 every matrix contributes one point of the
    ambiguity row Af(k step, .) through its line (-b eta, a eta); the row's
    N - k lag products are solved by least squares.  The diagonal, which no
    line through the origin reaches, follows from the rank-one structure.

    Warns :class:`RankDeficiency` when the leading eigenvalue dominates the
    next by less than ``rank_gap_min`` or when the recovered signal misses
    the input magnitudes by more than ``misfit_max`` (relative to their peak).
    """
    origin, N, step = support
    N = int(N)
    mats = [A for A, _ in mags]
    if any(A.is_degenerate or A.b <= 0 for A in mats):
        raise DegenerateParameterError("every matrix needs b > 0")
    ratios = np.array([A.ratio for A in mats])
    distinct = np.unique(np.round(ratios, 12)).size
    if distinct < N:
        raise InsufficientDiversity(f"{distinct} distinct a/b ratios for a support of length {N}")

    M = np.zeros((N, N), dtype=complex)
    worst_cond = 1.0
    n_all = np.arange(N)
    for k in range(1, N):
        lag = k * step
        etas = np.array([-lag / A.b for A in mats])
        mods = np.array([A.a * e for A, e in zip(mats, etas)])
        vals = np.array([_line_values(A, S, np.array([e]))[0] for (A, S), e in zip(mags, etas)])
        n = n_all[k:]  # positions where f(t) f*(t - k) can be nonzero
        t = (origin + n) * step
        V = np.exp(-1j * np.outer(mods, t)) * step * np.exp(0.5j * lag * mods)[:, None]
        r, *_ , sv = np.linalg.lstsq(V, vals, rcond=None)
        if sv.size and sv[-1] > 0:
            worst_cond = max(worst_cond, sv[0] / sv[-1])
        M[n, n - k] = r
        M[n - k, n] = np.conj(r)

    A0, S0 = mags[0]
    energy = float(np.sum(np.real(S0.values)) * S0.grid.step)
    d = _diagonal_from_offdiagonal(M, energy, step)
    M[n_all, n_all] = d
    L = LagProductMatrix(M, origin, step)
    fhat, ratio = rank_one_factor(L)
    sig = SampledSignal(fhat, origin, step)

    misfit = 0.0
    for A, S in mags:
        pred = np.abs(olct_forward(sig, A, S.grid).values) ** 2
        ref = np.real(S.values)
        misfit = max(misfit, float(np.max(np.abs(pred - ref)) / max(np.max(np.abs(ref)), 1e-300)))
    diag = {
        "sigma_ratio": float(ratio),
        "rank_gap": float(1 / ratio) if ratio > 0 else float("inf"),
        "data_misfit": misfit,
        "worst_condition": float(worst_cond),
        "distinct_ratios": int(distinct),
    }
    if ratio * rank_gap_min > 1 or misfit > misfit_max:
        warnings.warn(
            f"data are not explained by a rank-one lag-product matrix "
            f"(rank gap {1 / ratio if ratio else float('inf'):.3g}, misfit {misfit:.3g})",
            RankDeficiency,
            stacklevel=2,
        )
    residual = phase_invariant_error(truth, sig).residual if truth is not None else misfit
    return RecoveryReport(sig, float(residual), diag)


# -- STOLCT-based solvers --------------------------------------------------------


def infer_support(mag: TimeFrequencyMap, phi: SampledSignal, rel: float = 0.0):
    """Support block of f implied by the shifts at which the map carries energy.

    Any energy counts by default: smooth signals leave only tiny traces at
    the outermost overlapping shifts, and those still pin down the support.
    """
    step = phi.step
    phi = phi.trimmed()
    energy = np.sum(np.abs(mag.values) ** 2, axis=1)
    if not np.any(energy > 0):
        return None
    live = np.flatnonzero(energy > rel * energy.max())
    shifts = np.rint(mag.shift_grid.points / step).astype(int)
    lo = shifts[live[0]] + phi.stop - 1
    hi = shifts[live[-1]] + phi.origin
    if hi < lo:
        lo, hi = hi, lo
    return lo, hi - lo + 1


def _dual_mods(N: int, step: float) -> Grid:
    L = 1 << int(np.ceil(np.log2(max(N, 2))))
    return Grid(-np.pi / step, 2 * np.pi / (L * step), L)


def _measured_rows(m2: np.ndarray, vgrid: Grid, ugrid: Grid, A: ParameterMatrix, lags, mods: Grid) -> np.ndarray:
    """F(|V|^2)(u', -v') with v' = k step / b, shape (len(lags), len(mods))."""
    step = vgrid.step
    vprime = np.asarray(lags) * step / A.b
    S = m2 @ np.exp(1j * np.outer(ugrid.points, vprime)) * ugrid.step
    return (np.exp(-1j * np.outer(mods.points, vgrid.points)) @ S).T * vgrid.step


def _noise_floor(G, Aphi, min_points=16):
    """Floor matched to the relative noise level of G.

    Where the window ambiguity is nil G carries noise only; its median
    magnitude relative to max|G| estimates the noise level e.  Masking costs
    an error linear in the floor while the noise passed through the division
    grows like e / floor, so the balance sits near sqrt(e).  Returns 0 when
    too few quiet points exist or the data are clean.
    """
    mag = np.abs(Aphi)
    gmax = np.max(np.abs(G))
    quiet = mag < 1e-12 * mag.max()
    if gmax == 0 or np.sum(quiet) < min_points:
        return 0.0
    return float(np.sqrt(np.median(np.abs(G[quiet])) / gmax))


def _divide_window(G, phi, A, lags, mods, floor, limit=None):
    """Af~ = G / (e^{j y0 v'} conj A phi) where |A phi| clears the floor.

    ``limit`` confines the division to |u'| <= limit (band-limited signals
    have no ambiguity beyond it); everything outside is zero-filled.
    """
    step = phi.step
    lags = np.asarray(lags)
    lg = Grid(lags[0] * step, step, len(lags)) if len(lags) > 1 else Grid(lags[0] * step, 1.0, 1)
    Aphi = cross_ambiguity(phi, phi, lg, mods).values
    if len(lags) > 1 and not np.all(np.diff(lags) == 1):
        raise ValueError("lags must be consecutive")
    vprime = lags * step / A.b
    W = np.exp(1j * A.y0 * vprime)[:, None] * np.conj(Aphi)
    floor = max(floor, _noise_floor(G, Aphi))
    keep = np.abs(Aphi) > floor * np.max(np.abs(Aphi))
    inband = np.ones(mods.count, bool) if limit is None else np.abs(mods.points) <= limit
    keep &= inband[None, :]
    out = np.zeros_like(G)
    out[keep] = G[keep] / W[keep]

    # masked fraction inside the window's essential box: the lags and
    # modulations where its ambiguity marginals exceed sqrt(floor) * max
    mag = np.abs(Aphi)
    level = np.sqrt(floor) * mag.max() if mag.max() > 0 else 0.0
    rows = mag.max(axis=1) > level
    cols = (mag.max(axis=0) > level) & inband
    box = rows[:, None] & cols[None, :]
    masked = float(np.sum(box & ~keep) / max(np.sum(box), 1))
    return out, masked, int(np.sum(~keep))


def _invert_rows(Af, lags, mods: Grid, origin: int, N: int, step: float) -> dict:
    """r_k[n] for n = 0 .. N-1 from Af~(k step, u') on a full-period u' grid."""
    u = mods.points
    L = mods.count
    rows = {}
    n = np.arange(N)
    t = (origin + n) * step
    for i, k in enumerate(lags):
        y = Af[i] * np.exp(-0.5j * k * step * u) / step
        r = (np.exp(1j * np.outer(t, u)) @ y) / L
        valid = (n - k >= 0) & (n - k < N)
        rows[int(k)] = np.where(valid, r, 0)
    return rows


def _map_grids_ok(mag: TimeFrequencyMap, phi: SampledSignal):
    step = phi.step
    k = mag.shift_grid.points / step
    if np.max(np.abs(k - np.rint(k))) > 1e-9 or abs(mag.shift_grid.step - step) > 1e-12 * step:
        raise GridMismatch("magnitude map shifts must step along the window lattice")


def _stolct_misfit(sig, phi, A, mag):
    pred = np.abs(stolct(sig, phi, A, mag.shift_grid, mag.freq_grid).values)
    ref = np.abs(mag.values)
    return float(np.max(np.abs(pred**2 - ref**2)) / max(np.max(ref**2), 1e-300))


def _rank_one_from_map(m2, vgrid, ugrid, phi, A, origin, N, floor, limit=None, max_masked=0.2):
    """Lag rows from a |V|^2 map, window division, leading eigenvector (still chirped)."""
    step = phi.step
    lags = np.arange(-(N - 1), N)
    mods = _dual_mods(N, step)
    G = _measured_rows(m2, vgrid, ugrid, A, lags, mods)
    Af, masked, floor_hits = _divide_window(G, phi, A, lags, mods, floor, limit)
    if masked > max_masked:
        raise WindowVanishes(f"{masked:.1%} of the informative lattice falls below the window floor")
    rows = _invert_rows(Af, lags, mods, origin, N, step)
    ft, ratio = rank_one_factor(assemble_lag_matrix(rows, origin, N, step))
    return ft, ratio, masked, floor_hits


def recover_from_stolct(
    mag: TimeFrequencyMap,
    phi: SampledSignal,
    A: ParameterMatrix,
    floor: float = 1e-8,
    support=None,
    truth: SampledSignal | None = None,
    max_masked: float = 0.2,
) -> RecoveryReport:
    """Recover f up to global phase from |V_phi^A f| on lattice shifts x u.

    The u-grid should span one spectral period (2 pi b / step) with at least
    2N - 1 points, and the shifts should cover every window position that
    overlaps f; then the Fourier side of the identity is exact.
    """
    _map_grids_ok(mag, phi)
    step = phi.step
    if support is None:
        support = infer_support(mag, phi)
    if support is None:
        return RecoveryReport(SampledSignal(np.zeros(1), 0, step), 0.0, {"masked_fraction": 0.0})
    origin, N = int(support[0]), int(support[1])
    m2 = np.abs(mag.values) ** 2
    ft, ratio, masked, floor_hits = _rank_one_from_map(
        m2, mag.shift_grid, mag.freq_grid, phi, A, origin, N, floor, max_masked=max_masked
    )
    sig = _finish(ft, origin, step, A)
    diag = {"sigma_ratio": float(ratio), "masked_fraction": masked, "floor_hits": floor_hits}
    residual = phase_invariant_error(truth, sig).residual if truth is not None else _stolct_misfit(sig, phi, A, mag)
    return RecoveryReport(sig, float(residual), diag)


def _components(mask: np.ndarray):
    """(start, stop) runs of True in a boolean array."""
    edges = np.diff(np.concatenate([[0], mask.astype(int), [0]]))
    return list(zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)))


def _energy_from_lag0(G0, phi, A, mods, floor, origin, N, step, limit=None):
    Af, masked, hits = _divide_window(G0[None, :], phi, A, [0], mods, floor, limit)
    rows = _invert_rows(Af, [0], mods, origin, N, step)
    return np.real(rows[0]), masked


def _sign_pattern(energy: np.ndarray, amp_floor: float, neg_tol: float = 1e-6):
    peak = np.max(np.abs(energy)) if energy.size else 0.0
    if peak > 0 and np.min(energy) < -neg_tol * peak:
        raise NegativeEnergy(f"recovered |f|^2 dips to {np.min(energy):.3g} (peak {peak:.3g})")
    amp = np.sqrt(np.clip(energy, 0, None))
    if not np.any(amp > 0):
        return amp, UNIQUE, 0
    comps = _components(amp > amp_floor * amp.max())
    amp = np.where(amp > amp_floor * amp.max(), amp, 0.0)
    return amp, (UNIQUE if len(comps) <= 1 else SEPARABLE), len(comps)


def recover_nonseparable_real(
    mag: TimeFrequencyMap,
    phi: SampledSignal,
    A: ParameterMatrix,
    amp_floor: float = 1e-6,
    floor: float = 1e-8,
    support=None,
    truth: SampledSignal | None = None,
) -> RecoveryReport:
    """Real f up to sign from |V_phi^A f|, using only the zero-lag ambiguity row.

    |f|^2 comes from Af(0, .) = F(|f|^2); within one connected component of
    {|f| > amp_floor max|f|} a continuous real signal keeps its sign, so one
    component gives ``unique_up_to_sign`` and several give
    ``separable_ambiguous`` (each component's sign is then free).
    """
    _map_grids_ok(mag, phi)
    step = phi.step
    if support is None:
        support = infer_support(mag, phi)
    if support is None:
        return RecoveryReport(SampledSignal(np.zeros(1), 0, step), 0.0, {"components": 0}, UNIQUE)
    origin, N = int(support[0]), int(support[1])
    mods = _dual_mods(N, step)
    m2 = np.abs(mag.values) ** 2
    G0 = _measured_rows(m2, mag.shift_grid, mag.freq_grid, A, [0], mods)[0]
    energy, masked = _energy_from_lag0(G0, phi, A, mods, floor, origin, N, step)
    amp, verdict, ncomp = _sign_pattern(energy, amp_floor)
    sig = SampledSignal(amp, origin, step)
    diag = {"components": ncomp, "masked_fraction": masked}
    if truth is not None:
        residual = _sign_residual(truth, sig)
    else:
        residual = _stolct_misfit(sig, phi, A, mag)
    return RecoveryReport(sig, float(residual), diag, verdict)


def _sign_residual(truth: SampledSignal, sig: SampledSignal) -> float:
    if truth.norm() == 0:
        return sig.norm()
    return phase_invariant_error(truth, sig).residual


# -- sampled, band-limited solvers -------------------------------------------------


def _rebuild_map(samples, vgrid: Grid, band_of, radius: int):
    """|V|^2 on the lattice shifts from per-u sample sequences."""
    out = np.empty((vgrid.count, len(samples)))
    for j, s in enumerate(samples):
        band = band_of(s)
        vals = interpolate_bandlimited(
            np.asarray(s.values) ** 2, s.rate, vgrid, band=band, radius=radius, first=int(s.n[0])
        )
        out[:, j] = np.real(vals)
    tiny = (out < 0) & (out >= -1e-10 * max(out.max(), 1e-300))
    out[tiny] = 0.0
    return out


def recover_bandlimited_sampled(
    samples,
    phi: SampledSignal,
    A: ParameterMatrix,
    band,
    mode: str = "ft",
    support=None,
    gamma: float | None = None,
    radius: int = 64,
    floor: float = 1e-4,
    amp_floor: float = 1e-6,
    truth: SampledSignal | None = None,
) -> RecoveryReport:
    """Recover a band-limited f from sampled STOLCT magnitudes.

    ``samples``: one :class:`MagnitudeSamples` per u on a uniform one-period
    u-grid.  ``support``: (origin, length) of the lattice block to rebuild.

    ``mode="ft"``: ``band = (omega1, omega2)``; |V(., u)|^2 has band
    2 Omega^u, f is real and is recovered up to sign.
    ``mode="olct"``: ``band = omega`` (OLCT-domain), |V(., u)|^2 has band
    2 Omega'/b; f~ is propagated along t0 + gamma Z from lag-0 and lag-gamma
    rows and Shannon-interpolated back to the lattice.
    """
    step = phi.step
    origin, N = int(support[0]), int(support[1])
    us = np.array([s.u for s in samples])
    du = np.diff(us)
    if us.size > 1 and np.max(np.abs(du - du[0])) > 1e-9 * abs(du[0]):
        raise GridMismatch("sample families must sit on a uniform u-grid")
    ugrid = Grid(us[0], du[0] if us.size > 1 else 1.0, us.size)
    # shifts at which the window can overlap the support
    vlo = origin - (phi.stop - 1)
    vhi = origin + N - 1 - phi.origin
    vgrid = Grid(vlo * step, step, vhi - vlo + 1)

    if mode == "ft":
        omega1, omega2 = band
        band_of = lambda s: 2 * ft_band_omega(A, s.u, omega1)  # noqa: E731
    elif mode == "olct":
        omega_p = olct_band_omega(A, float(band))
        band_of = lambda s: 2 * omega_p / abs(A.b)  # noqa: E731
    else:
        raise ValueError(f"unknown mode {mode!r}")
    m2 = _rebuild_map(samples, vgrid, band_of, radius)
    mods = _dual_mods(N, step)

    if mode == "ft":
        # the rebuilt map is complete, so use every lag: the rank-one factor
        # avoids the square root of |f|^2, which amplifies errors near zeros
        ft, ratio, masked, _ = _rank_one_from_map(m2, vgrid, ugrid, phi, A, origin, N, floor, 2 * omega2)
        z = _finish(ft, origin, step, A).samples
        beta = 0.5 * np.angle(np.sum(z**2)) if np.any(z) else 0.0
        real = np.real(z * np.exp(-1j * beta))
        keep = np.abs(real) > amp_floor * np.max(np.abs(real), initial=0.0)
        ncomp = len(_components(keep))
        verdict = UNIQUE if ncomp <= 1 else SEPARABLE
        sig = SampledSignal(real, origin, step)
        diag = {"components": ncomp, "masked_fraction": masked, "sigma_ratio": float(ratio)}
        residual = _sign_residual(truth, sig) if truth is not None else 0.0
        return RecoveryReport(sig, float(residual), diag, verdict)

    if gamma is None:
        gamma = abs(A.b) / (2 * omega_p)
    if gamma > abs(A.b) / (2 * omega_p) * (1 + 1e-12):
        raise NyquistViolation(f"gamma {gamma:.4g} exceeds b / (2 Omega') = {abs(A.b) / (2 * omega_p):.4g}")
    kg = gamma / step
    if abs(kg - round(kg)) > 1e-9:
        raise GridMismatch(f"gamma {gamma} is not a multiple of the sample step {step}")
    kg = int(round(kg))
    G = _measured_rows(m2, vgrid, ugrid, A, [0, kg], mods)
    # window division on two non-consecutive lags: do each separately
    limit = 2 * omega_p / abs(A.b)
    Af0, masked0, _ = _divide_window(G[:1], phi, A, [0], mods, floor, limit)
    Afg, maskedg, _ = _divide_window(G[1:], phi, A, [kg], mods, floor, limit)
    masked = max(masked0, maskedg)
    if masked > 0.2:
        raise WindowVanishes(f"{masked:.1%} of the informative lattice falls below the window floor")
    rows = _invert_rows(np.vstack([Af0, Afg]), [0, kg], mods, origin, N, step)
    energy = np.clip(np.real(rows[0]), 0, None)
    amp = np.sqrt(energy)
    if amp.max() < 1e-10:
        raise AnchorDegenerate("no sample of |f~| exceeds 1e-10")
    prod = rows[kg]
    anchor = int(np.argmax(amp))  # argmax breaks ties at the smallest index
    coarse_pos = np.arange(anchor % kg, N, kg)
    phase = np.zeros(coarse_pos.size)
    ia = int(np.flatnonzero(coarse_pos == anchor)[0])
    for i in range(ia + 1, coarse_pos.size):
        phase[i] = phase[i - 1] + np.angle(prod[coarse_pos[i]])
    for i in range(ia - 1, -1, -1):
        phase[i] = phase[i + 1] - np.angle(prod[coarse_pos[i + 1]])
    coarse = amp[coarse_pos] * np.exp(1j * phase)
    coarse[amp[coarse_pos] < 1e-10 * amp.max()] = 0.0
    # f~ on t0 + gamma Z; Shannon series at rate 1/gamma back onto the lattice
    t = (origin + np.arange(N)) * step
    t0 = (origin + coarse_pos[0]) * step
    ft = interpolate_bandlimited(coarse, 1.0 / gamma, t - t0, radius=radius)
    sig = _finish(ft, origin, step, A)
    diag = {"masked_fraction": masked, "gamma": float(gamma), "anchor": int(origin + anchor)}
    residual = phase_invariant_error(truth, sig).residual if truth is not None else 0.0
    return RecoveryReport(sig, float(residual), diag)
