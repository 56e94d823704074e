"""Command-line front end: runs experiments, writes CSV reports and summaries.

Every command writes one CSV per report type (17-significant-digit reals, so
doubles round-trip exactly) plus a line-oriented key=value summary with an
assertions block.  Identical configurations produce byte-identical files.
Exit codes: 0 all assertions passed, 1 an assertion failed, 2 bad usage or a
rejected parameter.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import experiments
from .schemes import CONSERVATIVE, VISCOUS, SchemeConfig, solution_at_nodes
from .spacetime_norms import l4_mixed_analytic
from .spectral_core import idft, laplacian_symbol_values, lp_norm, make_grid
from .selftest import run_selftest

__all__ = ["RunConfig", "parse_args", "run", "emit_csv", "main"]


@dataclass(frozen=True)
class Assertion:
    name: str
    status: str  # PASS | FAIL | SKIP
    detail: str


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters for one CLI invocation."""

    command: str
    Ns: tuple[int, ...]
    alpha: float
    lam: float
    visc_c: float
    visc_beta: float | None
    T: float
    trials: int
    seed: int
    r: int | None
    out: Path
    scheme: str
    band_epsilon: float | None
    include_blowup_data: bool
    jobs: int
    tol_factor: float
    tol_growth: float
    tol_slope_lo: float | None
    tol_slope_hi: float | None
    tol_rel: float

    def echo(self) -> list[tuple[str, str]]:
        items = [
            ("command", self.command),
            ("N_list", ",".join(str(n) for n in self.Ns)),
            ("alpha", _fmt(self.alpha)),
            ("lambda", _fmt(self.lam)),
            ("visc_c", _fmt(self.visc_c)),
            ("visc_beta", "" if self.visc_beta is None else _fmt(self.visc_beta)),
            ("T", _fmt(self.T)),
            ("trials", str(self.trials)),
            ("seed", str(self.seed)),
            ("r", "" if self.r is None else str(self.r)),
            ("scheme", self.scheme),
            ("band_epsilon", "" if self.band_epsilon is None else _fmt(self.band_epsilon)),
            ("include_blowup_data", str(self.include_blowup_data).lower()),
            ("jobs", str(self.jobs)),
            ("tol_factor", _fmt(self.tol_factor)),
            ("tol_growth", _fmt(self.tol_growth)),
            ("tol_rel", _fmt(self.tol_rel)),
        ]
        return items


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def emit_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write a UTF-8 CSV with the given header; reals carry 17 significant digits."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(cell) for cell in row) + "\n")


def _write_summary(path: Path, config_echo, lines, assertions: list[Assertion]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in config_echo:
            fh.write(f"{key}={value}\n")
        for key, value in lines:
            fh.write(f"{key}={value}\n")
        fh.write("[assertions]\n")
        for a in assertions:
            detail = f" ({a.detail})" if a.detail else ""
            fh.write(f"{a.name}={a.status}{detail}\n")
        overall = "PASS" if all(a.status != "FAIL" for a in assertions) else "FAIL"
        fh.write(f"result={overall}\n")


def _passfail(name: str, ok: bool, detail: str) -> Assertion:
    return Assertion(name, "PASS" if ok else "FAIL", detail)


def _sibling(out: Path, suffix: str) -> Path:
    return out.with_name(out.stem + suffix)


# ---------------------------------------------------------------------------
# command handlers: each returns (summary_lines, assertions)
# ---------------------------------------------------------------------------


def _cmd_blowup(cfg: RunConfig):
    report = experiments.run_blowup(cfg.alpha, list(cfg.Ns), cfg.T)
    mech = experiments.blowup_mechanism(cfg.alpha, list(cfg.Ns), cfg.T)
    emit_csv(
        cfg.out,
        ["N", "lambda_size", "l2_initial", "l4_mixed", "ratio"],
        [(r.N, r.window_size, r.l2_initial, r.l4_mixed, r.ratio) for r in report.rows],
    )
    lines = [
        ("fit_slope", _fmt(report.fit.slope)),
        ("fit_intercept", _fmt(report.fit.intercept)),
        ("fit_residual", _fmt(report.fit.residual)),
    ]
    for row in mech:
        lines.append(
            (
                f"mechanism_N{row.N}",
                f"count={row.quadruple_count} q_max={_fmt(row.q_max)} "
                f"bound={_fmt(row.lower_bound)} fourth_power={_fmt(row.fourth_power)}",
            )
        )
    lo = cfg.tol_slope_lo if cfg.tol_slope_lo is not None else 0.5 * cfg.alpha / 4.0
    hi = cfg.tol_slope_hi if cfg.tol_slope_hi is not None else 1.5 * cfg.alpha / 4.0
    growth = report.rows[-1].ratio / report.rows[0].ratio
    assertions = [
        _passfail(
            "slope_in_band",
            lo <= report.fit.slope <= hi,
            f"slope={report.fit.slope:.6g} band=[{lo:.6g},{hi:.6g}]",
        ),
        _passfail(
            "ratio_growth",
            growth >= cfg.tol_growth,
            f"ratio({report.rows[-1].N})/ratio({report.rows[0].N})={growth:.6g} "
            f"need>={cfg.tol_growth:.6g}",
        ),
    ]
    for row in mech:
        assertions.append(
            _passfail(
                f"mechanism_N{row.N}",
                row.satisfied,
                f"fourth_power={row.fourth_power:.6g} bound={row.lower_bound:.6g}",
            )
        )
    return lines, assertions


def _uniformity_output(cfg: RunConfig, report: experiments.UniformityReport, assertable: bool):
    emit_csv(
        cfg.out,
        ["N", "trial", "ratio"],
        [(r.N, r.trial, r.ratio) for r in report.rows],
    )
    lines = [("descriptor", report.descriptor), ("rule", report.rule)]
    per_n = report.per_n_max()
    for N in sorted(per_n):
        lines.append((f"max_ratio_N{N}", _fmt(per_n[N])))
    lines.append(("global_max_ratio", _fmt(report.global_max())))
    lines.append(("per_N_max_spread", _fmt(report.spread())))
    if len(per_n) >= 2 and assertable:
        smallest = sorted(per_n)[:2]
        baseline = max(per_n[N] for N in smallest)
        assertions = [
            _passfail(
                "uniform_bound",
                report.bounded_by_smallest(cfg.tol_factor),
                f"global_max={report.global_max():.6g} <= "
                f"{cfg.tol_factor:g}*max(N={smallest[0]},N={smallest[1]})={cfg.tol_factor * baseline:.6g}",
            )
        ]
    else:
        reason = "no asserted constant for this mode" if not assertable else "needs >= 2 grid sizes"
        assertions = [Assertion("uniform_bound", "SKIP", reason)]
    if report.blowup_rows:
        emit_csv(
            _sibling(cfg.out, "_contrast.csv"),
            ["N", "viscous_ratio", "conservative_ratio"],
            [(r.N, r.viscous_ratio, r.conservative_ratio) for r in report.blowup_rows],
        )
        first, last = report.blowup_rows[0], report.blowup_rows[-1]
        lines.append(
            (
                "blowup_contrast",
                f"viscous {first.viscous_ratio:.6g}->{last.viscous_ratio:.6g} "
                f"conservative {first.conservative_ratio:.6g}->{last.conservative_ratio:.6g}",
            )
        )
    return lines, assertions


def _cmd_filter(cfg: RunConfig):
    report = experiments.run_filter(
        cfg.lam,
        list(cfg.Ns),
        T=cfg.T,
        trials=cfg.trials,
        seed=cfg.seed,
        band_epsilon=cfg.band_epsilon,
        jobs=cfg.jobs,
    )
    return _uniformity_output(cfg, report, assertable=cfg.band_epsilon is None)


def _cmd_viscous(cfg: RunConfig):
    report = experiments.run_viscous(
        list(cfg.Ns),
        T=cfg.T,
        trials=cfg.trials,
        seed=cfg.seed,
        c=cfg.visc_c,
        beta=cfg.visc_beta,
        include_blowup_data=cfg.include_blowup_data,
        blowup_alpha=cfg.alpha,
        jobs=cfg.jobs,
    )
    return _uniformity_output(cfg, report, assertable=cfg.visc_beta is None)


def _cmd_gaps(cfg: RunConfig):
    rows = []
    assertions = []
    lines = []
    for N in cfg.Ns:
        cut = int(math.floor(cfg.lam * N))
        r_values = [cfg.r] if cfg.r is not None else list(range(0, 2 * cut + 1))
        inc_ok = dec_ok = True
        for r in r_values:
            rep = experiments.gap_report(N, cfg.lam, r)
            inc_ok = inc_ok and rep.increasing_side_ok(cfg.tol_rel)
            dec_ok = dec_ok and rep.decreasing_side_ok(cfg.tol_rel)
            for i, (n, mu) in enumerate(zip(rep.ns, rep.mu)):
                gap = _fmt(rep.gaps[i]) if i < len(rep.gaps) else ""
                rows.append((N, _fmt(cfg.lam), rep.r, n, _fmt(mu), gap))
            if cfg.r is not None:
                lines.append(
                    (
                        f"gap_profile_N{N}_r{r}",
                        f"split={rep.split_index} peak={rep.peak_index()} "
                        f"min_inc_gap={_fmt(rep.min_increasing_gap)} "
                        f"max_dec_gap={_fmt(rep.max_decreasing_gap)} bound={_fmt(rep.gap_bound)}",
                    )
                )
        scope = f"r={cfg.r}" if cfg.r is not None else f"all r in [0,{2 * cut}]"
        assertions.append(_passfail(f"gap_increasing_N{N}", inc_ok, scope))
        assertions.append(_passfail(f"gap_decreasing_N{N}", dec_ok, scope))
    emit_csv(cfg.out, ["N", "lambda", "r", "n", "mu", "gap_to_next"], rows)
    return lines, assertions


def _cmd_pairbound(cfg: RunConfig):
    rows = []
    global_min = math.inf
    for N in cfg.Ns:
        r_values = [cfg.r] if cfg.r is not None else list(range(0, N // 4 + 1))
        for r in r_values:
            ratio = experiments.pair_bound_report(N, r)
            global_min = min(global_min, ratio)
            rows.append((N, r, ratio))
    emit_csv(cfg.out, ["N", "r", "min_ratio"], rows)
    lines = [("global_min_ratio", _fmt(global_min)), ("floor", _fmt(experiments.PAIR_BOUND_FLOOR))]
    assertions = [
        _passfail(
            "pair_bound_floor",
            global_min >= experiments.PAIR_BOUND_FLOOR - 1e-6,
            f"min={global_min:.6f} floor={experiments.PAIR_BOUND_FLOOR:.6f}",
        )
    ]
    return lines, assertions


def _cmd_simulate(cfg: RunConfig):
    node_rows = []
    symbol_rows = []
    lines = []
    assertions = []
    for N in cfg.Ns:
        window = experiments.spectral_window(N, cfg.alpha)
        u0 = experiments.window_initial_data(window)
        grid = u0.grid
        if cfg.scheme == CONSERVATIVE:
            config = SchemeConfig.conservative(grid)
        else:
            a = cfg.visc_c * (grid.h if cfg.visc_beta is None else grid.h**cfg.visc_beta)
            config = SchemeConfig.viscous(grid, a)
        initial = idft(u0)
        final = solution_at_nodes(u0, cfg.T, config)
        xs = grid.nodes()
        for j in range(grid.num_nodes):
            v0, vT = initial.values[j], final.values[j]
            node_rows.append(
                (N, j, xs[j], v0.real, v0.imag, abs(v0), vT.real, vT.imag, abs(vT))
            )
        p = laplacian_symbol_values(grid)
        for n in grid.modes():
            symbol_rows.append(
                (N, n, p[n + grid.max_mode], (2.0 * math.pi * n) ** 2)
            )
        l2_0 = lp_norm(initial, 2)
        l2_T = lp_norm(final, 2)
        mixed = l4_mixed_analytic(u0, cfg.T, config)
        lines.append((f"l2_initial_N{N}", _fmt(l2_0)))
        lines.append((f"l2_final_N{N}", _fmt(l2_T)))
        lines.append((f"l4_mixed_N{N}", _fmt(mixed.value)))
        if cfg.scheme == CONSERVATIVE:
            drift = abs(l2_T - l2_0) / l2_0
            assertions.append(
                _passfail(f"l2_conserved_N{N}", drift <= 1e-12, f"rel_drift={drift:.3e}")
            )
        else:
            assertions.append(
                _passfail(f"l2_contracted_N{N}", l2_T <= l2_0, f"{l2_T:.6g} <= {l2_0:.6g}")
            )
    emit_csv(
        cfg.out,
        ["N", "j", "x", "re_u0", "im_u0", "abs_u0", "re_uT", "im_uT", "abs_uT"],
        node_rows,
    )
    emit_csv(
        _sibling(cfg.out, "_symbols.csv"),
        ["N", "n", "discrete_symbol", "continuous_symbol"],
        symbol_rows,
    )
    return lines, assertions


def _cmd_selftest(cfg: RunConfig):
    results = run_selftest(cfg.seed)
    lines = []
    assertions = []
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] {res.name}: {res.detail}")
        assertions.append(Assertion(res.name, status, res.detail))
    return lines, assertions


_HANDLERS = {
    "blowup": _cmd_blowup,
    "filter": _cmd_filter,
    "viscous": _cmd_viscous,
    "gaps": _cmd_gaps,
    "pairbound": _cmd_pairbound,
    "simulate": _cmd_simulate,
    "selftest": _cmd_selftest,
}


def run(cfg: RunConfig) -> int:
    """Execute the command, write its files, and return the exit status."""
    lines, assertions = _HANDLERS[cfg.command](cfg)
    _write_summary(_sibling(cfg.out, "_summary.txt"), cfg.echo(), lines, assertions)
    failed = [a for a in assertions if a.status == "FAIL"]
    for a in assertions:
        print(f"assertion {a.name}: {a.status}" + (f" ({a.detail})" if a.detail else ""))
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _parse_n_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad N list {text!r}: {exc}")
    if not values:
        raise argparse.ArgumentTypeError("N list is empty")
    return values


_DEFAULT_NS = {
    "blowup": "128,256,512,1024",
    "filter": "128,256,512",
    "viscous": "128,256,512",
    "gaps": "150",
    "pairbound": "64,128",
    "simulate": "500",
    "selftest": "16",
}


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="schrodinger-lab",
        description="Space-time L4 experiments for semidiscrete periodic Schrodinger schemes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("blowup", "conservative-scheme mixed-norm growth on concentrated data"),
        ("filter", "uniform bound for spectrally filtered random data"),
        ("viscous", "uniform bound for the viscous scheme on random data"),
        ("gaps", "pair-phase gap profile and inequality check"),
        ("pairbound", "pairwise lower-bound diagnostic"),
        ("simulate", "evolve the window datum and dump nodes plus symbols"),
        ("selftest", "run the built-in oracle and inequality checks"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--N", type=_parse_n_list, default=None, metavar="N1,N2,...",
                       help="comma-separated even grid parameters")
        p.add_argument("--alpha", type=float, default=0.3,
                       help="spectral window width exponent (default 0.3)")
        p.add_argument("--lambda", dest="lam", type=float, default=0.2,
                       help="filter fraction, must be < 1/4 (default 0.2)")
        p.add_argument("--visc-c", type=float, default=1.0,
                       help="viscosity constant in a = c*h (default 1)")
        p.add_argument("--visc-beta", type=float, default=None,
                       help="exploratory viscosity exponent: a = c*h^beta, beta > 1")
        p.add_argument("--T", type=float, default=1.0, help="time horizon (default 1)")
        p.add_argument("--trials", type=int, default=20,
                       help="random trials per grid size (default 20)")
        p.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
        p.add_argument("--r", type=int, default=None,
                       help="restrict gaps/pairbound to a single pair sum r")
        p.add_argument("--out", type=Path, default=None,
                       help="output CSV path (default <command>.csv)")
        p.add_argument("--scheme", choices=[CONSERVATIVE, VISCOUS], default=CONSERVATIVE,
                       help="dynamics for simulate (default conservative)")
        p.add_argument("--band-epsilon", type=float, default=None,
                       help="filter variant: exclude ||n|-N/4| < eps*N instead of a low-pass")
        p.add_argument("--include-blowup-data", action="store_true",
                       help="viscous: also evaluate the window datum under both schemes")
        p.add_argument("--jobs", type=int, default=None,
                       help="parallel trial workers (capped by SCHRODINGER_LAB_THREADS)")
        p.add_argument("--tol-factor", type=float, default=1.3,
                       help="uniformity assertion factor (default 1.3)")
        p.add_argument("--tol-growth", type=float, default=1.2,
                       help="blow-up ratio growth threshold (default 1.2)")
        p.add_argument("--tol-slope-lo", type=float, default=None,
                       help="blow-up slope lower bound (default 0.5*alpha/4)")
        p.add_argument("--tol-slope-hi", type=float, default=None,
                       help="blow-up slope upper bound (default 1.5*alpha/4)")
        p.add_argument("--tol-rel", type=float, default=1e-9,
                       help="relative slack for proven inequalities (default 1e-9)")

    args = parser.parse_args(argv)
    Ns = args.N if args.N is not None else _parse_n_list(_DEFAULT_NS[args.command])
    out = args.out if args.out is not None else Path(f"{args.command}.csv")
    return RunConfig(
        command=args.command,
        Ns=Ns,
        alpha=args.alpha,
        lam=args.lam,
        visc_c=args.visc_c,
        visc_beta=args.visc_beta,
        T=args.T,
        trials=args.trials,
        seed=args.seed,
        r=args.r,
        out=out,
        scheme=args.scheme,
        band_epsilon=args.band_epsilon,
        include_blowup_data=args.include_blowup_data,
        jobs=_resolve_jobs(args.jobs),
        tol_factor=args.tol_factor,
        tol_growth=args.tol_growth,
        tol_slope_lo=args.tol_slope_lo,
        tol_slope_hi=args.tol_slope_hi,
        tol_rel=args.tol_rel,
    )


def _resolve_jobs(requested: int | None) -> int:
    cpus = os.cpu_count() or 1
    cap_env = os.environ.get("SCHRODINGER_LAB_THREADS")
    cap = cpus
    if cap_env:
        try:
            cap = max(1, int(cap_env))
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"SCHRODINGER_LAB_THREADS must be an integer, got {cap_env!r}"
            )
    want = requested if requested is not None else cpus
    return max(1, min(want, cap, cpus))


def main(argv: Sequence[str] | None = None) -> int:
    cfg = parse_args(argv)
    try:
        return run(cfg)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
