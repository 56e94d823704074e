"""Mixed-norm engine: scalar integrals, analytic sums, quadrature oracle, counting."""

import cmath
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

import schrodinger_lab as sl
from schrodinger_lab.spacetime_norms import l4_mixed_analytic_batch
from conftest import random_unit_spectral


class TestDampedPhaseIntegral:
    def test_constant_integrand(self):
        assert sl.damped_phase_integral(sl.PhaseIntegralParams(0.0, 0.0, 2.5)) == pytest.approx(
            2.5, rel=1e-15
        )

    def test_pure_oscillation_real_part(self):
        q, T = 7.3, 1.4
        val = sl.damped_phase_integral(sl.PhaseIntegralParams(q, 0.0, T))
        assert val.real == pytest.approx(np.sin(T * q) / q, rel=1e-13)
        assert val.imag == pytest.approx(-(1.0 - np.cos(T * q)) / q, rel=1e-13)

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            sl.PhaseIntegralParams(1.0, -0.1, 1.0)
        with pytest.raises(ValueError):
            sl.PhaseIntegralParams(1.0, 0.0, 0.0)

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_adaptive_quadrature(self, seed):
        rng = np.random.default_rng(seed)
        q = float(rng.uniform(-50, 50))
        s = float(rng.uniform(0, 30))
        T = float(rng.uniform(0.05, 3.0))
        got = sl.damped_phase_integral(sl.PhaseIntegralParams(q, s, T))
        re, _ = quad(lambda t: np.exp(-t * s) * np.cos(t * q), 0, T, epsabs=1e-13, limit=400)
        im, _ = quad(lambda t: -np.exp(-t * s) * np.sin(t * q), 0, T, epsabs=1e-13, limit=400)
        assert abs(got - complex(re, im)) <= 1e-10 * max(1.0, abs(got))

    def test_series_branch_is_smooth(self):
        # values straddling the cancellation guard agree to high accuracy
        T = 1.0
        below = sl.damped_phase_integral(sl.PhaseIntegralParams(0.9e-8, 0.0, T))
        above = sl.damped_phase_integral(sl.PhaseIntegralParams(1.1e-8, 0.0, T))
        assert abs(below - above) < 1e-8 * T


def brute_force_quadruple_sum(u0: sl.SpectralVector) -> complex:
    """Literal sum over quadruples resonant on the discrete torus (mod N+1)."""
    K, M = u0.grid.max_mode, u0.grid.num_nodes
    c = u0.coeffs
    total = 0.0 + 0.0j
    ks = range(-K, K + 1)
    for n1, n2, n3, n4 in product(ks, ks, ks, ks):
        if (n1 + n2 - n3 - n4) % M == 0:
            total += c[n1 + K] * c[n2 + K] * c[n3 + K].conjugate() * c[n4 + K].conjugate()
    return total


class TestL4Identity:
    @pytest.mark.parametrize("N", [2, 8, 12])
    def test_spatial_fourth_power_equals_quadruple_sum(self, N):
        u0 = random_unit_spectral(N, seed=20 + N)
        spatial = sl.lp_norm(sl.idft(u0), 4) ** 4
        quad_sum = brute_force_quadruple_sum(u0)
        assert abs(quad_sum.imag) <= 1e-12
        assert abs(spatial - quad_sum.real) <= 1e-10 * spatial

    def test_wrapped_resonances_are_required_on_the_grid(self):
        # with all-ones coefficients at N=2 the strictly-resonant sum gives 19
        # while the grid norm is 27; the pair sums wrapping by N+1 supply the rest
        g = sl.make_grid(2)
        u0 = sl.SpectralVector(g, np.ones(3))
        spatial = sl.lp_norm(sl.idft(u0), 4) ** 4
        strict = 0.0
        for n1, n2, n3, n4 in product((-1, 0, 1), repeat=4):
            if n1 + n2 == n3 + n4:
                strict += 1.0
        assert spatial == pytest.approx(27.0, rel=1e-13)
        assert strict == pytest.approx(19.0, rel=1e-13)

    def test_identity_holds_for_filtered_data_without_wrapping(self):
        # low-pass data cannot reach wrapped pair sums, so the strict sum suffices
        g = sl.make_grid(16)
        rng = np.random.default_rng(4)
        u0 = sl.SpectralVector.from_modes(
            g, {k: complex(rng.standard_normal(), rng.standard_normal()) for k in range(-3, 4)}
        )
        K = g.max_mode
        strict = 0.0 + 0.0j
        ks = range(-K, K + 1)
        for n1, n2, n3, n4 in product(ks, ks, ks, ks):
            if n1 + n2 == n3 + n4:
                strict += (
                    u0.coeffs[n1 + K]
                    * u0.coeffs[n2 + K]
                    * u0.coeffs[n3 + K].conjugate()
                    * u0.coeffs[n4 + K].conjugate()
                )
        spatial = sl.lp_norm(sl.idft(u0), 4) ** 4
        assert abs(spatial - strict.real) <= 1e-10 * spatial


class TestMixedNormAnalytic:
    def test_single_mode_value(self):
        g = sl.make_grid(16)
        A, T = 0.8, 2.3
        u0 = sl.SpectralVector.from_modes(g, {5: A})
        res = sl.l4_mixed_analytic(u0, T, sl.SchemeConfig.conservative(g))
        assert res.fourth_power == pytest.approx(T * A**4, rel=1e-12)
        assert res.value == pytest.approx((T * A**4) ** 0.25, rel=1e-12)

    def test_rejects_bad_arguments(self):
        u0 = random_unit_spectral(8, seed=0)
        cfg16 = sl.SchemeConfig.conservative(sl.make_grid(16))
        with pytest.raises(ValueError):
            sl.l4_mixed_analytic(u0, 1.0, cfg16)
        with pytest.raises(ValueError):
            sl.l4_mixed_analytic(u0, 0.0, sl.SchemeConfig.conservative(u0.grid))

    @given(st.floats(0.05, 8.0), st.floats(-np.pi, np.pi))
    def test_scaling_homogeneity(self, mag, angle):
        u0 = random_unit_spectral(12, seed=31)
        g = u0.grid
        cfg = sl.SchemeConfig.conservative(g)
        c = mag * cmath.exp(1j * angle)
        scaled = sl.SpectralVector(g, c * u0.coeffs)
        base = sl.l4_mixed_analytic(u0, 0.7, cfg).fourth_power
        got = sl.l4_mixed_analytic(scaled, 0.7, cfg).fourth_power
        assert got == pytest.approx(abs(c) ** 4 * base, rel=1e-10)

    def test_monotone_in_horizon(self):
        u0 = random_unit_spectral(16, seed=32)
        cfg = sl.SchemeConfig.conservative(u0.grid)
        values = [sl.l4_mixed_analytic(u0, T, cfg).fourth_power for T in (0.1, 0.5, 1.0, 2.0)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_imaginary_residual_is_tiny(self):
        u0 = random_unit_spectral(32, seed=33)
        for cfg in (
            sl.SchemeConfig.conservative(u0.grid),
            sl.SchemeConfig.viscous(u0.grid),
        ):
            res = sl.l4_mixed_analytic(u0, 1.0, cfg)
            assert res.imag_residual <= 1e-10 * max(1.0, res.fourth_power)

    @pytest.mark.parametrize("modes", [{3: 0.9}, {3: 0.9, -5: 0.4 + 0.2j}])
    def test_viscous_never_exceeds_conservative_on_sparse_data(self, modes):
        # for one- and two-mode data every bucket integrand is a fixed modulus
        # times a damping factor, so the comparison holds pointwise in time
        g = sl.make_grid(32)
        u0 = sl.SpectralVector.from_modes(g, modes)
        cons = sl.l4_mixed_analytic(u0, 1.0, sl.SchemeConfig.conservative(g)).fourth_power
        visc = sl.l4_mixed_analytic(u0, 1.0, sl.SchemeConfig.viscous(g)).fourth_power
        assert visc <= cons * (1.0 + 1e-12)

    def test_batch_matches_single_evaluations_bitwise(self):
        data = [random_unit_spectral(24, seed=40 + i) for i in range(5)]
        cfg = sl.SchemeConfig.viscous(data[0].grid)
        batch = l4_mixed_analytic_batch(data, 1.0, cfg)
        singles = [sl.l4_mixed_analytic(u, 1.0, cfg) for u in data]
        for b, s in zip(batch, singles):
            assert b.fourth_power == s.fourth_power
            assert b.imag_residual == s.imag_residual

    def test_deterministic_recomputation(self):
        u0 = random_unit_spectral(48, seed=41)
        cfg = sl.SchemeConfig.conservative(u0.grid)
        first = sl.l4_mixed_analytic(u0, 1.0, cfg).fourth_power
        second = sl.l4_mixed_analytic(u0, 1.0, cfg).fourth_power
        assert first == second


class TestMixedNormQuadrature:
    def test_single_mode_value(self):
        g = sl.make_grid(8)
        A, T = 1.3, 0.9
        u0 = sl.SpectralVector.from_modes(g, {2: A})
        res = sl.l4_mixed_quadrature(u0, T, sl.SchemeConfig.conservative(g))
        assert res.fourth_power == pytest.approx(T * A**4, rel=1e-10)

    def test_zero_data(self):
        g = sl.make_grid(8)
        u0 = sl.SpectralVector(g, np.zeros(9))
        res = sl.l4_mixed_quadrature(u0, 1.0, sl.SchemeConfig.conservative(g))
        assert res.fourth_power == 0.0

    def test_rejects_bad_panel_counts(self):
        u0 = random_unit_spectral(8, seed=50)
        cfg = sl.SchemeConfig.conservative(u0.grid)
        with pytest.raises(ValueError):
            sl.l4_mixed_quadrature(u0, 1.0, cfg, panels=63, refine=False)
        with pytest.raises(ValueError):
            sl.l4_mixed_quadrature(u0, 1.0, cfg, panels=0, refine=False)
        with pytest.raises(ValueError):
            sl.l4_mixed_quadrature(u0, 1.0, cfg, refine=False)

    def test_fixed_panels_without_refinement(self):
        g = sl.make_grid(8)
        u0 = sl.SpectralVector.from_modes(g, {1: 1.0})
        res = sl.l4_mixed_quadrature(u0, 1.0, sl.SchemeConfig.conservative(g), panels=64, refine=False)
        assert res.fourth_power == pytest.approx(1.0, rel=1e-10)


class TestOracleAgreement:
    @pytest.mark.parametrize("N", [8, 16, 32])
    @pytest.mark.parametrize("kind", ["conservative", "viscous"])
    @pytest.mark.parametrize("T", [0.1, 1.0])
    def test_analytic_vs_quadrature(self, N, kind, T):
        u0 = random_unit_spectral(N, seed=N * 7 + int(T * 10))
        g = u0.grid
        cfg = sl.SchemeConfig.conservative(g) if kind == "conservative" else sl.SchemeConfig.viscous(g)
        analytic = sl.l4_mixed_analytic(u0, T, cfg).fourth_power
        quadrature = sl.l4_mixed_quadrature(u0, T, cfg).fourth_power
        assert abs(analytic - quadrature) <= 1e-6 * quadrature


class TestResonantQuadrupleCount:
    def test_singleton(self):
        assert sl.resonant_quadruple_count({5}) == 1

    def test_two_modes(self):
        assert sl.resonant_quadruple_count({0, 1}) == 6

    @pytest.mark.parametrize("M", [8, 16, 32, 64])
    def test_contiguous_block_formula(self, M):
        count = sl.resonant_quadruple_count(range(M))
        assert count == (2 * M**3 + M) // 3
        assert count >= (2 * M**3) / 3.0

    def test_matches_enumeration(self):
        modes = [-3, -1, 0, 2, 5]
        expected = sum(
            1
            for n1, n2, n3, n4 in product(modes, repeat=4)
            if n1 + n2 == n3 + n4
        )
        assert sl.resonant_quadruple_count(modes) == expected


class TestMaxResonantMismatch:
    def test_matches_enumeration_on_window(self):
        g = sl.make_grid(64)
        modes = [14, 15, 16, 17, 18]
        expected = 0.0
        for n1, n2, n3, n4 in product(modes, repeat=4):
            if n1 + n2 == n3 + n4:
                expected = max(
                    expected, abs(sl.phase_mismatch(g, sl.Quadruple(n1, n2, n3, n4)))
                )
        got = sl.max_resonant_mismatch(g, modes)
        assert got == pytest.approx(expected, rel=1e-12)

    def test_single_mode_is_zero(self):
        assert sl.max_resonant_mismatch(sl.make_grid(16), [3]) == 0.0
