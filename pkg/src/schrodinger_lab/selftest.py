"""Built-in oracle-equivalence and proven-inequality checks for the CLI.

Small, fast versions of the cross-validation suite: every check compares two
independent computation routes or verifies an inequality that holds exactly,
so a pass is meaningful on any machine without reference data.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .experiments import PAIR_BOUND_FLOOR, gap_report, pair_bound_report
from .schemes import SchemeConfig, ode_integrate, propagate, solution_at_nodes
from .spacetime_norms import (
    l4_mixed_analytic,
    l4_mixed_quadrature,
    resonant_quadruple_count,
)
from .spectral_core import (
    GridVector,
    Quadruple,
    SpectralVector,
    dft,
    dft_direct,
    idft,
    laplacian_symbol,
    lp_norm,
    make_grid,
    phase_mismatch,
    phase_mismatch_factored,
)

__all__ = ["CheckResult", "run_selftest"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_grid_vector(grid, rng) -> GridVector:
    vals = rng.standard_normal(grid.num_nodes) + 1j * rng.standard_normal(grid.num_nodes)
    return GridVector(grid, vals)


def _random_unit_spectral(grid, rng) -> SpectralVector:
    c = rng.standard_normal(grid.num_nodes) + 1j * rng.standard_normal(grid.num_nodes)
    return SpectralVector(grid, c / np.sqrt(np.sum(np.abs(c) ** 2)))


def _check_transform_roundtrip(rng) -> CheckResult:
    grid = make_grid(64)
    v = _random_grid_vector(grid, rng)
    back = idft(dft(v))
    err = np.max(np.abs(back.values - v.values)) / np.max(np.abs(v.values))
    return CheckResult("transform_roundtrip", err <= 1e-12, f"rel_err={err:.3e}")


def _check_transform_direct(rng) -> CheckResult:
    grid = make_grid(16)
    v = _random_grid_vector(grid, rng)
    fast = dft(v).coeffs
    direct = dft_direct(v).coeffs
    err = np.max(np.abs(fast - direct)) / np.max(np.abs(direct))
    return CheckResult("transform_vs_direct_sum", err <= 1e-12, f"rel_err={err:.3e}")


def _check_parseval(rng) -> CheckResult:
    grid = make_grid(64)
    v = _random_grid_vector(grid, rng)
    lhs = lp_norm(v, 2) ** 2
    rhs = float(np.sum(np.abs(dft(v).coeffs) ** 2))
    err = abs(lhs - rhs) / rhs
    return CheckResult("parseval", err <= 1e-12, f"rel_err={err:.3e}")


def _check_symbol_values(rng) -> CheckResult:
    ok = abs(laplacian_symbol(make_grid(2), 1) - 27.0) <= 1e-12 * 27.0
    grid = make_grid(32)
    for n in range(0, 17):
        p = laplacian_symbol(grid, n)
        ok = ok and abs(p - laplacian_symbol(grid, -n)) <= 1e-12 * max(1.0, p)
        ok = ok and 0.0 <= p <= 4.0 * 33 * 33
    return CheckResult("laplacian_symbol", ok, "hand value, evenness, range")


def _check_factored_mismatch(rng) -> CheckResult:
    grid = make_grid(16)
    worst = 0.0
    ks = range(-8, 9)
    for n1, n2, n3 in product(ks, ks, ks):
        n4 = n1 + n2 - n3
        if n4 < -8 or n4 > 8:
            continue
        q = Quadruple(n1, n2, n3, n4)
        direct = phase_mismatch(grid, q)
        fact = phase_mismatch_factored(grid, q)
        worst = max(worst, abs(direct - fact) / max(1.0, abs(direct)))
    return CheckResult("factored_phase_mismatch", worst <= 1e-9, f"max_rel_err={worst:.3e}")


def _check_conservation(rng) -> CheckResult:
    grid = make_grid(64)
    u0 = _random_unit_spectral(grid, rng)
    config = SchemeConfig.conservative(grid)
    base = lp_norm(idft(u0), 2)
    worst = max(
        abs(lp_norm(solution_at_nodes(u0, t, config), 2) - base) / base
        for t in (0.0, 0.1, 1.0, 10.0)
    )
    return CheckResult("l2_conservation", worst <= 1e-12, f"max_rel_drift={worst:.3e}")


def _check_viscous_contraction(rng) -> CheckResult:
    grid = make_grid(64)
    u0 = _random_unit_spectral(grid, rng)
    config = SchemeConfig.viscous(grid)
    norms = [lp_norm(solution_at_nodes(u0, t, config), 2) for t in (0.0, 0.01, 0.1, 1.0)]
    ok = all(b < a for a, b in zip(norms, norms[1:]))
    return CheckResult("viscous_contraction", ok, f"norms={['%.3e' % x for x in norms]}")


def _check_propagator_vs_ode(rng) -> CheckResult:
    grid = make_grid(32)
    u0 = _random_unit_spectral(grid, rng)
    worst = 0.0
    for config in (SchemeConfig.conservative(grid), SchemeConfig.viscous(grid)):
        exact = solution_at_nodes(u0, 0.01, config)
        stepped = ode_integrate(idft(u0), 0.01, config, dt=5e-6)
        worst = max(worst, float(np.max(np.abs(exact.values - stepped.values))))
    return CheckResult("propagator_vs_ode", worst <= 1e-6, f"sup_err={worst:.3e}")


def _check_analytic_vs_quadrature(rng) -> CheckResult:
    grid = make_grid(16)
    u0 = _random_unit_spectral(grid, rng)
    worst = 0.0
    for config in (SchemeConfig.conservative(grid), SchemeConfig.viscous(grid)):
        analytic = l4_mixed_analytic(u0, 1.0, config).fourth_power
        quad = l4_mixed_quadrature(u0, 1.0, config).fourth_power
        worst = max(worst, abs(analytic - quad) / quad)
    return CheckResult("analytic_vs_quadrature", worst <= 1e-6, f"max_rel_err={worst:.3e}")


def _check_l4_identity(rng) -> CheckResult:
    grid = make_grid(12)
    u0 = _random_unit_spectral(grid, rng)
    spatial = lp_norm(idft(u0), 4) ** 4
    K, M = grid.max_mode, grid.num_nodes
    c = u0.coeffs
    total = 0.0 + 0.0j
    ks = range(-K, K + 1)
    for n1, n2, n3, n4 in product(ks, ks, ks, ks):
        if (n1 + n2 - n3 - n4) % M == 0:
            total += c[n1 + K] * c[n2 + K] * np.conj(c[n3 + K]) * np.conj(c[n4 + K])
    err = abs(spatial - total.real) / spatial
    return CheckResult("l4_quadruple_identity", err <= 1e-10, f"rel_err={err:.3e}")


def _check_gap_inequality(rng) -> CheckResult:
    lam, N = 0.2, 64
    cut = int(lam * N)
    ok = True
    for r in range(0, 2 * cut + 1):
        rep = gap_report(N, lam, r)
        ok = ok and rep.increasing_side_ok() and rep.decreasing_side_ok()
    return CheckResult("pair_phase_gap_inequality", ok, f"N={N} lambda={lam} all r")


def _check_pair_bound(rng) -> CheckResult:
    N = 64
    worst = min(pair_bound_report(N, r) for r in range(0, N // 4 + 1))
    return CheckResult(
        "pair_phase_lower_bound",
        worst >= PAIR_BOUND_FLOOR - 1e-6,
        f"min_ratio={worst:.6f} floor={PAIR_BOUND_FLOOR:.6f}",
    )


def _check_resonant_count(rng) -> CheckResult:
    ok = resonant_quadruple_count({5}) == 1
    ok = ok and resonant_quadruple_count({0, 1}) == 6
    M = 16
    block = range(M)
    ok = ok and resonant_quadruple_count(block) == (2 * M**3 + M) // 3
    return CheckResult("resonant_quadruple_count", ok, "singleton, pair, block formula")


_CHECKS = [
    _check_transform_roundtrip,
    _check_transform_direct,
    _check_parseval,
    _check_symbol_values,
    _check_factored_mismatch,
    _check_conservation,
    _check_viscous_contraction,
    _check_propagator_vs_ode,
    _check_analytic_vs_quadrature,
    _check_l4_identity,
    _check_gap_inequality,
    _check_pair_bound,
    _check_resonant_count,
]


def run_selftest(seed: int = 0) -> list[CheckResult]:
    """Run every check with a fixed random seed; returns one result per check."""
    results = []
    for check in _CHECKS:
        rng = np.random.default_rng(seed)
        results.append(check(rng))
    return results
