"""Window construction, experiment harnesses, and inequality diagnostics."""

import math

import numpy as np
import pytest

import schrodinger_lab as sl
from schrodinger_lab.experiments import (
    MechanismRow,
    blowup_contrast,
    blowup_mechanism,
    window_initial_data,
)


class TestSpectralWindow:
    def test_figure_example(self):
        # N=500, alpha=1/4: width 500^0.25 ~ 4.73 around 125
        w = sl.spectral_window(500, 0.25)
        assert w.members == tuple(range(121, 130))
        assert len(w) == 9

    def test_medium_example(self):
        w = sl.spectral_window(128, 0.3)
        assert len(w) == 9
        assert w.members == tuple(range(28, 37))

    def test_small_width_keeps_nearest_integers(self):
        # width just above 1: only integers within distance < width of N/4
        N, alpha = 64, 0.05  # 64^0.05 ~ 1.23
        w = sl.spectral_window(N, alpha)
        width = N**alpha
        expected = tuple(n for n in range(-32, 33) if abs(n - 16.0) < width)
        assert w.members == expected

    @pytest.mark.parametrize("N", [16, 64, 128, 500, 1024])
    def test_size_bounds(self, N):
        alpha = 0.3
        w = sl.spectral_window(N, alpha)
        width = N**alpha
        assert 2 * width - 2 <= len(w) <= 2 * width + 1

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            sl.spectral_window(128, 0.0)
        with pytest.raises(ValueError):
            sl.spectral_window(128, 1.0)
        with pytest.raises(ValueError):
            sl.spectral_window(6, 0.3)
        with pytest.raises(ValueError):
            sl.spectral_window(127, 0.3)


class TestWindowInitialData:
    def test_unit_coefficients_and_l2_norm(self):
        w = sl.spectral_window(500, 0.25)
        u0 = window_initial_data(w)
        for n in w.members:
            assert u0.coeff(n) == 1.0
        assert np.count_nonzero(u0.coeffs) == 9
        assert sl.lp_norm(sl.idft(u0), 2) == pytest.approx(3.0, rel=1e-10)

    def test_l2_squared_equals_window_size(self):
        for N in (64, 128, 256):
            w = sl.spectral_window(N, 0.3)
            u0 = window_initial_data(w)
            l2 = sl.lp_norm(sl.idft(u0), 2)
            assert l2 * l2 == pytest.approx(len(w), rel=1e-10)


class TestMixedNormRatio:
    def test_single_mode_gives_quarter_power_of_horizon(self):
        g = sl.make_grid(32)
        u0 = sl.SpectralVector.from_modes(g, {7: 2.0})
        for T in (0.3, 1.0, 2.7):
            ratio = sl.mixed_norm_ratio(u0, T, sl.SchemeConfig.conservative(g))
            assert ratio == pytest.approx(T**0.25, rel=1e-10)

    def test_scale_invariance(self):
        w = sl.spectral_window(64, 0.3)
        u0 = window_initial_data(w)
        g = u0.grid
        cfg = sl.SchemeConfig.conservative(g)
        base = sl.mixed_norm_ratio(u0, 1.0, cfg)
        scaled = sl.SpectralVector(g, (0.5 - 2.2j) * u0.coeffs)
        assert sl.mixed_norm_ratio(scaled, 1.0, cfg) == pytest.approx(base, rel=1e-12)

    def test_rejects_zero_data(self):
        g = sl.make_grid(8)
        with pytest.raises(ValueError):
            sl.mixed_norm_ratio(
                sl.SpectralVector(g, np.zeros(9)), 1.0, sl.SchemeConfig.conservative(g)
            )


class TestFitPowerLaw:
    def test_exact_power_data(self):
        pairs = [(x, 2.0 * x**0.5) for x in (1.0, 4.0, 10.0, 50.0)]
        fit = sl.fit_power_law(pairs)
        assert fit.slope == pytest.approx(0.5, abs=1e-12)
        assert fit.intercept == pytest.approx(math.log(2.0), abs=1e-12)
        assert fit.residual == pytest.approx(0.0, abs=1e-12)

    def test_constant_data_has_zero_slope(self):
        fit = sl.fit_power_law([(1.0, 3.0), (10.0, 3.0), (100.0, 3.0)])
        assert fit.slope == pytest.approx(0.0, abs=1e-12)

    def test_rejects_degenerate_input(self):
        with pytest.raises(ValueError):
            sl.fit_power_law([(1.0, 1.0), (2.0, 2.0)])
        with pytest.raises(ValueError):
            sl.fit_power_law([(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)])


class TestRunBlowup:
    def test_rejects_alpha_at_or_above_third(self):
        with pytest.raises(ValueError, match="1/3"):
            sl.run_blowup(1.0 / 3.0, [128, 256, 512])
        with pytest.raises(ValueError):
            sl.run_blowup(0.4, [128, 256, 512])

    def test_rejects_unsorted_grid(self):
        with pytest.raises(ValueError):
            sl.run_blowup(0.3, [256, 128, 512])

    def test_report_contents(self):
        report = sl.run_blowup(0.3, [128, 256, 512], T=1.0)
        assert [row.N for row in report.rows] == [128, 256, 512]
        for row in report.rows:
            assert row.l2_initial**2 == pytest.approx(row.window_size, rel=1e-10)
            assert row.ratio == pytest.approx(row.l4_mixed / row.l2_initial, rel=1e-14)
        assert report.fit.slope > 0.0

    def test_ratio_trend_on_growing_window_subsequence(self):
        report = sl.run_blowup(0.3, [128, 256, 512, 1024], T=1.0)
        rows = report.rows
        for prev, cur in zip(rows, rows[1:]):
            if cur.window_size > prev.window_size:
                assert cur.ratio > prev.ratio


class TestBlowupMechanism:
    def test_small_horizon_regime_saturates_the_count(self):
        # with T tiny every resonant phase is slow: each integral is nearly T,
        # so the fourth power approaches T * quadruple_count
        T = 1e-3
        for row in blowup_mechanism(0.3, [128, 256], T=T):
            assert isinstance(row, MechanismRow)
            assert row.satisfied
            assert row.fourth_power >= 0.9 * T * row.quadruple_count

    def test_mismatch_scale_is_stable_across_n(self):
        # max |mismatch| ~ K * N^(3 alpha - 1) with a stable K
        alpha = 0.3
        rows = blowup_mechanism(alpha, [128, 256, 512, 1024], T=1.0)
        scales = [row.q_max * row.N ** (1.0 - 3.0 * alpha) for row in rows]
        mid = sorted(scales)[len(scales) // 2]
        assert all(0.5 * mid <= s <= 2.0 * mid for s in scales)


class TestBlowupContrast:
    def test_viscous_sits_below_conservative_on_window_data(self):
        rows = blowup_contrast(0.3, [128, 512], T=1.0)
        for row in rows:
            assert row.viscous_ratio < row.conservative_ratio


class TestRunFilter:
    def test_rejects_lambda_at_quarter(self):
        with pytest.raises(ValueError, match="1/4"):
            sl.run_filter(0.25, [64], trials=1)

    def test_same_seed_reproduces_bitwise(self):
        a = sl.run_filter(0.2, [32, 64], trials=3, seed=11)
        b = sl.run_filter(0.2, [32, 64], trials=3, seed=11)
        assert a.rows == b.rows

    def test_different_seeds_differ(self):
        a = sl.run_filter(0.2, [32], trials=2, seed=1)
        b = sl.run_filter(0.2, [32], trials=2, seed=2)
        assert a.rows != b.rows

    def test_parallel_jobs_match_serial(self):
        serial = sl.run_filter(0.2, [32, 64], trials=2, seed=5, jobs=1)
        parallel = sl.run_filter(0.2, [32, 64], trials=2, seed=5, jobs=2)
        assert serial.rows == parallel.rows

    def test_grid_coverage_and_summary(self):
        rep = sl.run_filter(0.2, [32, 64], trials=4, seed=3)
        assert {(r.N, r.trial) for r in rep.rows} == {
            (N, t) for N in (32, 64) for t in range(4)
        }
        per_n = rep.per_n_max()
        assert set(per_n) == {32, 64}
        assert rep.global_max() == max(per_n.values())
        assert rep.spread() >= 0.0

    def test_band_exclusion_mode(self):
        rep = sl.run_filter(0.2, [64], trials=2, seed=7, band_epsilon=0.1)
        assert "band_epsilon" in rep.rule
        assert all(r.ratio > 0 for r in rep.rows)


class TestRunViscous:
    def test_rejects_bad_viscosity(self):
        with pytest.raises(ValueError):
            sl.run_viscous([64], trials=1, c=0.0)
        with pytest.raises(ValueError):
            sl.run_viscous([64], trials=1, beta=1.0)

    def test_same_seed_reproduces_bitwise(self):
        a = sl.run_viscous([32], trials=3, seed=9)
        b = sl.run_viscous([32], trials=3, seed=9)
        assert a.rows == b.rows

    def test_strong_damping_kills_meanless_data(self):
        # with no zero mode and an enormous damping rate the mixed norm is tiny
        g = sl.make_grid(32)
        u0 = sl.SpectralVector.from_modes(g, {5: 1.0, -9: 1.0})
        heavy = sl.SchemeConfig.viscous(g, 1000.0 * g.h)
        light = sl.SchemeConfig.viscous(g, g.h)
        heavy_ratio = sl.mixed_norm_ratio(u0, 1.0, heavy)
        assert heavy_ratio < 1e-2 * sl.mixed_norm_ratio(u0, 1.0, light)

    def test_include_blowup_data(self):
        rep = sl.run_viscous([64, 128], trials=1, seed=0, include_blowup_data=True, blowup_alpha=0.3)
        assert [r.N for r in rep.blowup_rows] == [64, 128]
        for row in rep.blowup_rows:
            assert row.viscous_ratio < row.conservative_ratio

    def test_beta_mode_reports_rule(self):
        rep = sl.run_viscous([32], trials=1, seed=0, beta=1.5)
        assert rep.rule == "a=1*h^1.5"


class TestGapReport:
    def test_figure_profile(self):
        rep = sl.gap_report(150, 0.2, 25)
        assert rep.split_index == 12
        assert rep.peak_index() == 12
        gaps = np.array(rep.gaps)
        lo = rep.ns[0]
        assert np.all(gaps[: 12 - lo] > 0)
        assert np.all(gaps[13 - lo :] < 0)
        assert rep.increasing_side_ok() and rep.decreasing_side_ok()

    def test_zero_pair_sum_peaks_at_zero(self):
        rep = sl.gap_report(64, 0.2, 0)
        assert rep.peak_index() == 0
        mus = np.array(rep.mu)
        ns = np.array(rep.ns)
        order = np.argsort(np.abs(ns), kind="stable")
        assert np.all(np.diff(mus[order]) <= 1e-9)

    @pytest.mark.parametrize("N", [64, 128])
    def test_gap_inequality_all_admissible_r(self, N):
        lam = 0.2
        cut = int(lam * N)
        for r in range(0, 2 * cut + 1):
            rep = sl.gap_report(N, lam, r)
            assert rep.increasing_side_ok(), (N, r)
            assert rep.decreasing_side_ok(), (N, r)

    def test_negative_r_is_reflection(self):
        plus = sl.gap_report(64, 0.2, 10)
        minus = sl.gap_report(64, 0.2, -10)
        assert minus.reflected and not plus.reflected
        assert minus.mu == plus.mu

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            sl.gap_report(64, 0.2, 100)
        with pytest.raises(ValueError):
            sl.gap_report(64, 0.3, 0)


class TestPairBound:
    def test_floor_holds_for_small_grid(self):
        N = 64
        worst = min(sl.pair_bound_report(N, r) for r in range(0, N // 4 + 1))
        assert worst >= sl.PAIR_BOUND_FLOOR - 1e-6

    def test_adjacent_pair_ratio_is_plain_difference(self):
        # |n-m| = 1 and n+m = r-1 make the denominator one, so the minimized
        # ratio is the phase difference itself; check it against the explicit
        # trigonometric product
        N, r = 64, 10
        g = sl.make_grid(N)
        n, m = 5, 4
        ratio = abs(sl.pair_phase_difference(g, r, n, m)) / (abs(n - m) * abs(r - n - m))
        M = N + 1
        explicit = abs(
            8.0 * M * M
            * math.cos(r * math.pi / M)
            * math.sin((n + m - r) * math.pi / M)
            * math.sin((n - m) * math.pi / M)
        )
        assert ratio == pytest.approx(explicit, rel=1e-13)
        assert ratio >= sl.PAIR_BOUND_FLOOR

    def test_symmetric_in_n_and_m(self):
        g = sl.make_grid(64)
        for r, n, m in [(10, 5, 3), (0, -2, -5), (16, 1, -3)]:
            a = abs(sl.pair_phase_difference(g, r, n, m))
            b = abs(sl.pair_phase_difference(g, r, m, n))
            assert a == pytest.approx(b, rel=1e-15)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            sl.pair_bound_report(64, -1)
        with pytest.raises(ValueError):
            sl.pair_bound_report(64, 17)
