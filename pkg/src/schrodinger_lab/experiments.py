"""Desk-scale experiments: L4 blow-up, filtered and viscous uniform bounds, diagnostics.

Three reproductions plus two proven-inequality diagnostics:

* blow-up: all-ones data on a spectral window of width 2*N^alpha around N/4
  makes the mixed-norm/initial-norm ratio grow like a power of N under the
  conservative scheme;
* filter: random data supported on |n| <= lambda*N (lambda < 1/4) keeps the
  ratio bounded uniformly in N;
* viscous: with viscosity a = c*h the ratio stays bounded for full-spectrum
  random data, and stays flat on the blow-up data where the conservative
  ratio keeps growing;
* gap diagnostics: monotonicity and gap size of the pair-phase sequence,
  and the pairwise lower bound |mu(n,m)| >= 16*sqrt(2)*|n-m|*|r-n-m|.

Random trials draw independent standard complex Gaussian coefficients from a
counter-based stream keyed by (seed, N, trial), so the experiment grid is
reproducible regardless of execution order or parallelism.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .schemes import CONSERVATIVE, VISCOUS, SchemeConfig
from .spacetime_norms import (
    l4_mixed_analytic,
    l4_mixed_analytic_batch,
    max_resonant_mismatch,
    resonant_quadruple_count,
)
from .spectral_core import (
    GridSpec,
    SpectralVector,
    idft,
    lp_norm,
    make_grid,
    pair_phase_difference,
    pair_phase_sequence,
)

__all__ = [
    "PAIR_BOUND_FLOOR",
    "SpectralWindow",
    "spectral_window",
    "window_initial_data",
    "mixed_norm_ratio",
    "PowerLawFit",
    "fit_power_law",
    "BlowupRow",
    "BlowupReport",
    "run_blowup",
    "MechanismRow",
    "blowup_mechanism",
    "BlowupContrastRow",
    "blowup_contrast",
    "UniformityRow",
    "UniformityReport",
    "run_filter",
    "run_viscous",
    "GapReport",
    "gap_report",
    "pair_bound_report",
]

# explicit floor for the pairwise bound: cos(r*pi/(N+1)) >= sqrt(2)/2 for
# r <= N/4 and sin(x) >= (2/pi)*x on [0, pi/2] give 8 * (sqrt(2)/2) * 2 * 2
PAIR_BOUND_FLOOR = 16.0 * math.sqrt(2.0)


# ---------------------------------------------------------------------------
# spectral window and blow-up experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralWindow:
    """Modes within distance N^alpha of the convexity-change point N/4."""

    N: int
    alpha: float
    members: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.members)


def spectral_window(N: int, alpha: float) -> SpectralWindow:
    """Window {n : |n| <= N/2, |n - N/4| < N^alpha} with strict inequality."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if N < 8 or N % 2 != 0:
        raise ValueError(f"N must be even and >= 8, got {N}")
    width = float(N) ** alpha
    center = N / 4.0
    K = N // 2
    members = tuple(n for n in range(-K, K + 1) if abs(n - center) < width)
    return SpectralWindow(N=N, alpha=alpha, members=members)


def window_initial_data(window: SpectralWindow) -> SpectralVector:
    """Coefficient one on every window mode, zero elsewhere."""
    grid = make_grid(window.N)
    coeffs = np.zeros(grid.num_nodes, dtype=np.complex128)
    for n in window.members:
        coeffs[n + grid.max_mode] = 1.0
    return SpectralVector(grid, coeffs)


def mixed_norm_ratio(u0: SpectralVector, T: float, config: SchemeConfig) -> float:
    """||u||_{L4(0,T;L4)} / ||u(0)||_{L2}; scale-invariant in the data."""
    denom = lp_norm(idft(u0), 2)
    if denom == 0.0:
        raise ValueError("initial datum is identically zero")
    return l4_mixed_analytic(u0, T, config).value / denom


class PowerLawFit(NamedTuple):
    slope: float
    intercept: float
    residual: float  # max |log y - fit| over the points


def fit_power_law(pairs: Sequence[tuple[float, float]]) -> PowerLawFit:
    """Least-squares fit of log y against log x."""
    if len(pairs) < 3:
        raise ValueError(f"need at least 3 points to fit, got {len(pairs)}")
    xs = np.array([p[0] for p in pairs], dtype=float)
    ys = np.array([p[1] for p in pairs], dtype=float)
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("power-law fit requires strictly positive values")
    lx, ly = np.log(xs), np.log(ys)
    design = np.vstack([lx, np.ones_like(lx)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, ly, rcond=None)
    residual = float(np.max(np.abs(ly - (slope * lx + intercept))))
    return PowerLawFit(float(slope), float(intercept), residual)


@dataclass(frozen=True)
class BlowupRow:
    N: int
    window_size: int
    l2_initial: float
    l4_mixed: float
    ratio: float


@dataclass(frozen=True)
class BlowupReport:
    alpha: float
    T: float
    rows: tuple[BlowupRow, ...]
    fit: PowerLawFit

    def ratios(self) -> list[float]:
        return [row.ratio for row in self.rows]


def _check_blowup_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0 / 3.0:
        raise ValueError(
            f"alpha must lie in (0, 1/3), got {alpha}: for alpha >= 1/3 the "
            "resonant phase mismatches no longer shrink with N and the "
            "stationary-phase growth argument does not apply"
        )


def run_blowup(alpha: float, Ns: Sequence[int], T: float = 1.0) -> BlowupReport:
    """Mixed-norm ratio of the window datum under the conservative scheme, per N."""
    _check_blowup_alpha(alpha)
    if len(Ns) < 3:
        raise ValueError("need at least 3 grid sizes for the power-law fit")
    if list(Ns) != sorted(set(Ns)):
        raise ValueError("Ns must be strictly increasing")
    rows = []
    for N in Ns:
        window = spectral_window(N, alpha)
        u0 = window_initial_data(window)
        config = SchemeConfig.conservative(u0.grid)
        result = l4_mixed_analytic(u0, T, config)
        l2 = lp_norm(idft(u0), 2)
        rows.append(
            BlowupRow(
                N=N,
                window_size=len(window),
                l2_initial=l2,
                l4_mixed=result.value,
                ratio=result.value / l2,
            )
        )
    fit = fit_power_law([(row.N, row.ratio) for row in rows])
    return BlowupReport(alpha=alpha, T=T, rows=tuple(rows), fit=fit)


@dataclass(frozen=True)
class MechanismRow:
    """Lower-bound bookkeeping for one grid size of the blow-up construction."""

    N: int
    quadruple_count: int
    q_max: float  # exact max |phase mismatch| over resonant window quadruples
    lower_bound: float  # cos(T*q_max) * T * quadruple_count
    fourth_power: float
    satisfied: bool


def blowup_mechanism(alpha: float, Ns: Sequence[int], T: float = 1.0) -> tuple[MechanismRow, ...]:
    """Check fourth_power >= cos(T*q_max) * T * (#resonant quadruples) per N."""
    _check_blowup_alpha(alpha)
    rows = []
    for N in Ns:
        window = spectral_window(N, alpha)
        grid = make_grid(N)
        u0 = window_initial_data(window)
        fourth = l4_mixed_analytic(u0, T, SchemeConfig.conservative(grid)).fourth_power
        q_max = max_resonant_mismatch(grid, window.members)
        count = resonant_quadruple_count(window.members)
        bound = math.cos(T * q_max) * T * count
        ok = fourth - bound >= -1e-9 * max(abs(bound), abs(fourth))
        rows.append(
            MechanismRow(
                N=N,
                quadruple_count=count,
                q_max=q_max,
                lower_bound=bound,
                fourth_power=fourth,
                satisfied=ok,
            )
        )
    return tuple(rows)


@dataclass(frozen=True)
class BlowupContrastRow:
    N: int
    viscous_ratio: float
    conservative_ratio: float


def blowup_contrast(
    alpha: float,
    Ns: Sequence[int],
    T: float = 1.0,
    c: float = 1.0,
    beta: float | None = None,
) -> tuple[BlowupContrastRow, ...]:
    """Viscous vs conservative mixed-norm ratios on the same window datum."""
    _check_blowup_alpha(alpha)
    rows = []
    for N in Ns:
        u0 = window_initial_data(spectral_window(N, alpha))
        grid = u0.grid
        viscous = SchemeConfig.viscous(grid, _viscosity_value(grid, c, beta))
        rows.append(
            BlowupContrastRow(
                N=N,
                viscous_ratio=mixed_norm_ratio(u0, T, viscous),
                conservative_ratio=mixed_norm_ratio(u0, T, SchemeConfig.conservative(grid)),
            )
        )
    return tuple(rows)


# ---------------------------------------------------------------------------
# randomized uniformity experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniformityRow:
    N: int
    trial: int
    ratio: float


@dataclass(frozen=True)
class UniformityReport:
    descriptor: str
    rule: str
    T: float
    seed: int
    trials: int
    rows: tuple[UniformityRow, ...]
    blowup_rows: tuple[BlowupContrastRow, ...] = field(default=())

    def per_n_max(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for row in self.rows:
            out[row.N] = max(out.get(row.N, 0.0), row.ratio)
        return out

    def global_max(self) -> float:
        return max(row.ratio for row in self.rows)

    def spread(self) -> float:
        """max/min of the per-N maxima, minus one."""
        maxima = list(self.per_n_max().values())
        return max(maxima) / min(maxima) - 1.0

    def bounded_by_smallest(self, factor: float = 1.3) -> bool:
        """Global max <= factor * (max ratio over the two smallest N)."""
        per_n = self.per_n_max()
        smallest = sorted(per_n)[:2]
        return self.global_max() <= factor * max(per_n[N] for N in smallest)


def _viscosity_value(grid: GridSpec, c: float, beta: float | None) -> float:
    if beta is None:
        return c * grid.h
    return c * grid.h**beta


def _gaussian_unit_data(grid: GridSpec, modes: np.ndarray, key: tuple[int, ...]) -> SpectralVector:
    """Unit-L2 data with iid complex Gaussian coefficients on the given modes.

    The Philox stream is keyed by (seed, N, trial), so each grid point of the
    experiment draws from its own counter-based stream.
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(list(key))))
    draws = rng.standard_normal(2 * modes.size)
    coeffs = np.zeros(grid.num_nodes, dtype=np.complex128)
    coeffs[modes + grid.max_mode] = draws[: modes.size] + 1j * draws[modes.size :]
    norm = math.sqrt(float(np.sum(np.abs(coeffs) ** 2)))
    return SpectralVector(grid, coeffs / norm)


def _modes_for_rule(grid: GridSpec, rule: tuple) -> np.ndarray:
    kind = rule[0]
    ns = grid.modes()
    if kind == "low":
        return ns[np.abs(ns) <= rule[1]]
    if kind == "band":
        eps = rule[1]
        return ns[np.abs(np.abs(ns) - grid.N / 4.0) >= eps * grid.N]
    if kind == "full":
        return ns
    raise ValueError(f"unknown mode rule {rule!r}")


def _uniformity_group(job: tuple) -> list[tuple[int, int, float]]:
    """All trials for one grid size; one job of the experiment grid.

    Each trial's datum comes from its own (seed, N, trial)-keyed stream, and
    the batch evaluation is bit-identical to evaluating trials one at a time,
    so the grouping is purely a way to share the per-bucket integral matrices.
    """
    seed, N, trials, T, rule, kind, c, beta = job
    grid = make_grid(N)
    if kind == CONSERVATIVE:
        config = SchemeConfig.conservative(grid)
    else:
        config = SchemeConfig.viscous(grid, _viscosity_value(grid, c, beta))
    modes = _modes_for_rule(grid, rule)
    data = [_gaussian_unit_data(grid, modes, (seed, N, trial)) for trial in range(trials)]
    results = l4_mixed_analytic_batch(data, T, config)
    out = []
    for trial, (u0, res) in enumerate(zip(data, results)):
        out.append((N, trial, res.value / lp_norm(idft(u0), 2)))
    return out


def _run_trials(group_jobs: list[tuple], jobs: int) -> list[tuple[int, int, float]]:
    if jobs <= 1 or len(group_jobs) <= 1:
        groups = [_uniformity_group(job) for job in group_jobs]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            groups = list(pool.map(_uniformity_group, group_jobs, chunksize=1))
    return sorted(result for group in groups for result in group)


def _check_trial_grid(Ns: Sequence[int], trials: int, seed: int) -> None:
    if not Ns:
        raise ValueError("Ns must be nonempty")
    for N in Ns:
        if N < 8 or N % 2 != 0:
            raise ValueError(f"grid sizes must be even and >= 8, got {N}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")


def run_filter(
    lam: float,
    Ns: Sequence[int],
    T: float = 1.0,
    trials: int = 20,
    seed: int = 0,
    band_epsilon: float | None = None,
    jobs: int = 1,
) -> UniformityReport:
    """Mixed-norm ratios of random low-frequency data under the conservative scheme.

    Data is supported on |n| <= floor(lambda*N) with lambda < 1/4 (the
    hypothesis of the uniform filtered bound).  With band_epsilon set, the
    support is instead { n : ||n| - N/4| >= epsilon*N }, the band-exclusion
    variant; no constant is asserted for it.
    """
    _check_trial_grid(Ns, trials, seed)
    if band_epsilon is None:
        if not 0.0 < lam < 0.25:
            raise ValueError(
                f"lambda must lie in (0, 1/4), got {lam}: at lambda = 1/4 the data "
                "may touch the convexity-change modes and the uniform bound fails"
            )
        rules: dict[int, tuple] = {N: ("low", int(math.floor(lam * N))) for N in Ns}
        rule_desc = f"lambda={lam:g}"
    else:
        if not 0.0 < band_epsilon < 0.25:
            raise ValueError(f"band epsilon must lie in (0, 1/4), got {band_epsilon}")
        rules = {N: ("band", band_epsilon) for N in Ns}
        rule_desc = f"band_epsilon={band_epsilon:g}"

    group_jobs = [
        (seed, N, trials, T, rules[N], CONSERVATIVE, 0.0, None) for N in sorted(Ns)
    ]
    rows = tuple(UniformityRow(*res) for res in _run_trials(group_jobs, jobs))
    return UniformityReport(
        descriptor="conservative, filtered random data",
        rule=rule_desc,
        T=T,
        seed=seed,
        trials=trials,
        rows=rows,
    )


def run_viscous(
    Ns: Sequence[int],
    T: float = 1.0,
    trials: int = 20,
    seed: int = 0,
    c: float = 1.0,
    beta: float | None = None,
    include_blowup_data: bool = False,
    blowup_alpha: float = 0.3,
    jobs: int = 1,
) -> UniformityReport:
    """Mixed-norm ratios of full-spectrum random data under the viscous scheme.

    The viscosity rule is a = c*h, or a = c*h^beta with beta > 1 in the
    exploratory mode (reported, never asserted: whether any beta > 1 keeps the
    bound uniform is open).  With include_blowup_data, the window datum is also
    evaluated per N under both schemes for contrast.
    """
    _check_trial_grid(Ns, trials, seed)
    if not c > 0:
        raise ValueError(f"viscosity constant c must be positive, got {c}")
    if beta is not None and not beta > 1.0:
        raise ValueError(f"exploratory exponent beta must exceed 1, got {beta}")

    group_jobs = [(seed, N, trials, T, ("full",), VISCOUS, c, beta) for N in sorted(Ns)]
    rows = tuple(UniformityRow(*res) for res in _run_trials(group_jobs, jobs))
    blowup_rows: tuple[BlowupContrastRow, ...] = ()
    if include_blowup_data:
        blowup_rows = blowup_contrast(blowup_alpha, sorted(Ns), T, c=c, beta=beta)
    rule_desc = f"a={c:g}*h" if beta is None else f"a={c:g}*h^{beta:g}"
    return UniformityReport(
        descriptor="viscous, full-spectrum random data",
        rule=rule_desc,
        T=T,
        seed=seed,
        trials=trials,
        rows=rows,
        blowup_rows=blowup_rows,
    )


# ---------------------------------------------------------------------------
# proven-inequality diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GapReport:
    """Monotonicity profile of the pair-phase sequence for one (N, lambda, r).

    The sequence mu(n) = -symbol(n) - symbol(r-n) over n = r - floor(lambda*N)
    .. floor(lambda*N) rises until floor(r/2) and falls after floor(r/2)+1;
    on both monotone branches the consecutive gap is at least
    8*(N+1)^2 * cos(2*lambda*pi) * sin^2(pi/(N+1)) in absolute value.
    """

    N: int
    lam: float
    r: int
    reflected: bool
    split_index: int
    ns: tuple[int, ...]
    mu: tuple[float, ...]
    gaps: tuple[float, ...]
    min_increasing_gap: float
    max_decreasing_gap: float
    gap_bound: float

    def peak_index(self) -> int:
        return self.ns[int(np.argmax(self.mu))]

    def increasing_side_ok(self, rel_slack: float = 1e-9) -> bool:
        if math.isinf(self.min_increasing_gap):
            return True
        return self.min_increasing_gap >= self.gap_bound * (1.0 - rel_slack)

    def decreasing_side_ok(self, rel_slack: float = 1e-9) -> bool:
        if math.isinf(self.max_decreasing_gap):
            return True
        return self.max_decreasing_gap <= -self.gap_bound * (1.0 - rel_slack)


def gap_report(N: int, lam: float, r: int) -> GapReport:
    """Gap diagnostics for the pair-phase sequence of pair sum r.

    Negative r is handled by the reflection n -> -n, which mirrors the profile
    of |r|; the report flags this case.
    """
    if not 0.0 < lam < 0.25:
        raise ValueError(f"lambda must lie in (0, 1/4), got {lam}")
    grid = make_grid(N)
    cut = int(math.floor(lam * N))
    if cut < 1:
        raise ValueError(f"lambda*N must be at least 1, got {lam * N:g}")
    reflected = r < 0
    rp = abs(r)
    if rp > 2 * cut:
        raise ValueError(f"|r| must be at most 2*floor(lambda*N) = {2 * cut}, got {r}")

    seq = pair_phase_sequence(grid, rp, rp - cut, cut)
    split = rp // 2
    lo = rp - cut
    inc = seq.gaps[: max(0, split - lo)]  # gaps at n = lo .. split-1
    dec = seq.gaps[split + 1 - lo :]  # gaps at n = split+1 .. cut-1
    M = grid.num_nodes
    bound = 8.0 * M * M * math.cos(2.0 * lam * math.pi) * math.sin(math.pi / M) ** 2
    return GapReport(
        N=N,
        lam=lam,
        r=r,
        reflected=reflected,
        split_index=split,
        ns=tuple(int(n) for n in seq.ns),
        mu=tuple(float(v) for v in seq.values),
        gaps=tuple(float(g) for g in seq.gaps),
        min_increasing_gap=float(np.min(inc)) if inc.size else math.inf,
        max_decreasing_gap=float(np.max(dec)) if dec.size else -math.inf,
        gap_bound=bound,
    )


def pair_bound_report(N: int, r: int) -> float:
    """Min of |pair phase difference| / (|n-m| * |r-n-m|) over the low-frequency range.

    n and m run over r - floor(N/8) .. floor(r/2) with n != m and n + m != r
    (both sides vanish there).  The minimum stays above 16*sqrt(2).
    """
    grid = make_grid(N)
    if r < 0 or r > N // 4:
        raise ValueError(f"r must lie in [0, N/4] = [0, {N // 4}], got {r}")
    lo = r - N // 8
    hi = r // 2
    best = math.inf
    for n in range(lo, hi + 1):
        for m in range(lo, hi + 1):
            if m == n or n + m == r:
                continue
            ratio = abs(pair_phase_difference(grid, r, n, m)) / (abs(n - m) * abs(r - n - m))
            if ratio < best:
                best = ratio
    return best
