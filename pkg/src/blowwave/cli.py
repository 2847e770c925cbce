"""Command-line driver: roots, kernel, quasi, iterate, simpson-table, verify.

Every subcommand reads one JSON config (``--config``), writes delimited
output plus figures into the output directory, and echoes the resolved
configuration there.  Exit codes: 0 success, 2 configuration or domain
error, 3 non-convergence (or failed verification checks).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import charroots, plots
from .charroots import CharKind, StripQuery
from .config import RunConfig, load_config, save_config
from .errors import BlowwaveError, ConfigError, DivergenceError, DomainError
from .iteration import IterationConfig, apply_F, iterate
from .model import equilibria, validate_params, wave_residual
from .profiles import Grid, Profile, bridge_coeffs, paired_profiles
from .quadrature import (
    SimpsonPlan,
    build_kernel_table,
    kappa_table,
    simpson,
    tail_truncation_radius,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOCONV = 3

# construction-scoped conditions: reported, but not fatal for subcommands
# that do not need the quasi upper solution
_SOFT_VIOLATIONS = ("c > 2*sqrt(p) violated",)


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _prepare_out(cfg: RunConfig, out_override) -> Path:
    outdir = Path(out_override) if out_override else Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    save_config(cfg, outdir / "resolved_config.json")
    return outdir


def _hard_violations(cfg: RunConfig) -> list[str]:
    return [v for v in validate_params(cfg.model_params())
            if not v.startswith(_SOFT_VIOLATIONS)]


def _say(quiet: bool, *parts) -> None:
    if not quiet:
        print(*parts)


def cmd_roots(cfg: RunConfig, outdir: Path, quiet: bool) -> int:
    params = cfg.model_params()
    bad = _hard_violations(cfg)
    if bad:
        print("invalid parameters: " + "; ".join(bad), file=sys.stderr)
        return EXIT_CONFIG
    for v in validate_params(params):
        _say(quiet, "note:", v)

    lam1, lam2 = charroots.quadratic_roots_lambda(params.c, params.delta)
    rows = [("lambda1", lam1, 0.0, 0.0), ("lambda2", lam2, 0.0, 0.0)]
    have_mu = params.c > 2.0 * math.sqrt(params.p)
    if have_mu:
        mu1, mu2 = charroots.quadratic_roots_mu(params.c, params.p)
        rows += [("mu1", mu1, 0.0, 0.0), ("mu2", mu2, 0.0, 0.0)]
    else:
        rows += [("mu1", math.nan, math.nan, math.nan),
                 ("mu2", math.nan, math.nan, math.nan)]

    e1 = charroots.eta1(params)
    rows.append(("eta1", e1.value.real, e1.value.imag, e1.residual))
    if have_mu:
        e2 = charroots.eta2(params)
        rows.append(("eta2", e2.value.real, e2.value.imag, e2.residual))
    else:
        rows.append(("eta2", math.nan, math.nan, math.nan))
        _say(quiet, "note: c <= 2*sqrt(p); mu roots and eta2 unavailable")

    eps = abs(lam1) / 10.0
    im_max = max(50.0, 2.0 * charroots.dominance_radius(CharKind.CE, params, 0.0))
    count_u = charroots.count_roots_rect(
        CharKind.CE, StripQuery(lam1 - eps, 0.0, -im_max, im_max), params)
    box = StripQuery(e1.value.real - 0.5, e1.value.real + 0.5, -2.0, 2.0)
    count_eta1 = charroots.count_roots_rect(CharKind.CE, box, params)
    ok_axis, axis_min = charroots.imaginary_axis_clear(CharKind.CE, params)

    _write_csv(outdir / "roots.csv", ("name", "re", "im", "residual"), rows)
    _write_csv(
        outdir / "root_counts.csv",
        ("quantity", "value"),
        [
            ("count_CE_left_strip", count_u),
            ("count_CE_near_eta1", count_eta1),
            ("axis_clear", ok_axis),
            ("axis_min_abs", axis_min),
        ],
    )
    if not quiet:
        for name, re, im, res in rows:
            print(f"{name:8s} {re:+.9f} {im:+.2e}  residual {res:.2e}")
        print(f"CE roots in left strip: {count_u}; near eta1: {count_eta1}; "
              f"axis min |Delta| = {axis_min:.3e}")
    return EXIT_OK


def cmd_kernel(cfg: RunConfig, outdir: Path, quiet: bool) -> int:
    params = cfg.model_params()
    bad = _hard_violations(cfg)
    if bad:
        print("invalid parameters: " + "; ".join(bad), file=sys.stderr)
        return EXIT_CONFIG
    n_freq = cfg.n_freq if cfg.n_freq else None
    table = build_kernel_table(params, T_ker=cfg.T_ker, h_ker=cfg.h_ker,
                               N=cfg.N, n_freq=n_freq)
    _write_csv(outdir / "kernel.csv", ("t", "G"),
               list(zip(table.t_grid, table.values)))
    plots.save_kernel_plot(table, outdir / "kernel.png")
    _say(quiet,
         f"kernel: {len(table.values)} samples, M1={table.decay_m1:.6f}, "
         f"delta1={table.decay_delta1:.6f}, max_imag={table.max_imag:.2e}, "
         f"mass={table.mass:.6f} (target {1.0 / (params.delta + params.beta):.6f})")
    return EXIT_OK


def cmd_quasi(cfg: RunConfig, outdir: Path, quiet: bool) -> int:
    params = cfg.model_params()
    bad = _hard_violations(cfg)
    if bad:
        print("invalid parameters: " + "; ".join(bad), file=sys.stderr)
        return EXIT_CONFIG
    grid = Grid(cfg.L, cfg.h)
    pair = paired_profiles(params, grid, cfg.T_bridge, placement=cfg.lower_placement)
    t = grid.nodes()
    lower_vals = np.asarray(pair.lower.value(t))
    upper_vals = np.asarray(pair.upper.value(t))
    res_lower = np.asarray(wave_residual(pair.lower, t, params))
    res_upper = np.asarray(wave_residual(pair.upper, t, params))
    _write_csv(outdir / "quasi.csv",
               ("t", "lower", "upper", "residual_lower", "residual_upper"),
               list(zip(t, lower_vals, upper_vals, res_lower, res_upper)))
    ue = equilibria(params).ue
    plots.save_quasi_plots(t, lower_vals, upper_vals, ue, outdir)
    _say(quiet,
         f"quasi pair: eta1={pair.eta1:.6f}, eta2={pair.eta2:.6f}, "
         f"T={pair.T:g}, lower placement={pair.placement} (shift {pair.shift:g})")
    _say(quiet,
         f"certificates: upper {'pass' if pair.upper_report.passed else 'FAIL'} "
         f"(worst {pair.upper_report.worst_value:.3e}), "
         f"lower {'pass' if pair.lower_report.passed else 'FAIL'} "
         f"(worst {pair.lower_report.worst_value:.3e}), ordered={pair.ordered}")
    return EXIT_OK


def cmd_iterate(cfg: RunConfig, outdir: Path, quiet: bool) -> int:
    params = cfg.model_params()
    bad = _hard_violations(cfg)
    if bad:
        print("invalid parameters: " + "; ".join(bad), file=sys.stderr)
        return EXIT_CONFIG
    grid = Grid(cfg.L, cfg.h)
    if cfg.T_ker < 2.0 * cfg.L:
        print(f"config error: T_ker must be >= 2*L = {2 * cfg.L} for iteration",
              file=sys.stderr)
        return EXIT_CONFIG
    n_freq = cfg.n_freq if cfg.n_freq else None
    table = build_kernel_table(params, T_ker=cfg.T_ker, h_ker=cfg.h_ker,
                               N=cfg.N, n_freq=n_freq)
    icfg = IterationConfig(grid=grid, kernel=table, tol=cfg.tol,
                           max_iter=cfg.max_iter, clamp=cfg.clamp,
                           T_bridge=cfg.T_bridge,
                           lower_placement=cfg.lower_placement,
                           pre_check=cfg.pre_check)
    pair = paired_profiles(params, grid, cfg.T_bridge,
                           placement=cfg.lower_placement)
    try:
        final, report = iterate(icfg, params, pair=pair)
    except DivergenceError as exc:
        report = exc.report
        _write_report_csv(outdir, report)
        print("iteration diverging; partial report written", file=sys.stderr)
        return EXIT_NOCONV

    t = grid.nodes()
    phi0 = np.asarray(pair.upper.value(t))
    lower_vals = np.asarray(pair.lower.value(t))
    _write_csv(outdir / "profile.csv", ("t", "phi_final", "phi0", "lower"),
               list(zip(t, final.values, phi0, lower_vals)))
    _write_report_csv(outdir, report)
    summary = {
        "converged": report.converged,
        "steps": report.steps,
        "final_residual": report.final_residual,
        "boundary_error_left": report.boundary_errors[0],
        "boundary_error_right": report.boundary_errors[1],
        "monotone_ok_all": all(report.monotone_ok),
        "order_ok_all": all(report.order_ok),
        "clamp_events": report.clamp_events,
        "g_clamps": report.g_clamps,
        "lower_placement": report.lower_placement,
        "lower_shift": report.lower_shift,
        "notes": report.notes,
    }
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    plots.save_iterate_plots(t, phi0, final.values, lower_vals, report.deltas, outdir)
    _say(quiet,
         f"iterate: converged={report.converged} steps={report.steps} "
         f"final delta={report.deltas[-1]:.3e} residual={report.final_residual:.3e} "
         f"boundary=({report.boundary_errors[0]:.2e}, {report.boundary_errors[1]:.2e})")
    return EXIT_OK if report.converged else EXIT_NOCONV


def _write_report_csv(outdir: Path, report) -> None:
    rows = [
        (i + 1, d, m, c)
        for i, (d, m, c) in enumerate(
            zip(report.deltas, report.monotone_ok, report.clamp_steps)
        )
    ]
    _write_csv(outdir / "report.csv", ("step", "delta", "monotone_ok", "clamp_events"), rows)


def cmd_simpson_table(cfg: RunConfig, outdir: Path, quiet: bool, mode=None) -> int:
    params = cfg.model_params()
    bad = _hard_violations(cfg)
    if bad:
        print("invalid parameters: " + "; ".join(bad), file=sys.stderr)
        return EXIT_CONFIG
    mode = mode or cfg.mode
    lam1, _ = charroots.quadratic_roots_lambda(params.c, params.delta)
    rows = kappa_table(params, abs(lam1), cfg.kappa_steps)
    _write_csv(outdir / "simpson_table.csv",
               ("n", "h", "abs_I_printed_mode", "abs_I_consistent_mode"), rows)
    plots.save_kappa_plot(rows, outdir / "kappa.png")
    col = 2 if mode == "printed" else 3
    for r in rows:
        _say(quiet, f"n={r[0]:>8d}  h={r[1]:<8g}  |I_n| ({mode}) = {r[col]:.4f}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, outdir: Path, quiet: bool) -> int:
    params = cfg.model_params()
    bad = _hard_violations(cfg)
    if bad:
        print("invalid parameters: " + "; ".join(bad), file=sys.stderr)
        return EXIT_CONFIG
    rows = []

    def check(name, ok, observed, bound, note=""):
        rows.append((name, "pass" if ok else "FAIL", observed, bound, note))

    def info(name, observed, note=""):
        rows.append((name, "info", observed, "", note))

    def skip(name, note):
        rows.append((name, "skip", "", "", note))

    for v in validate_params(params):
        info("param_note", 0.0, v)

    lam1, lam2 = charroots.quadratic_roots_lambda(params.c, params.delta)
    check("lambda_sum", abs((lam1 + lam2) - params.c) <= 1e-12 * max(1, params.c),
          lam1 + lam2, params.c)
    check("lambda_product", abs(lam1 * lam2 + params.delta) <= 1e-12 * max(1, params.delta),
          lam1 * lam2, -params.delta)

    try:
        e1 = charroots.eta1(params)
        check("eta1_residual", e1.residual <= 1e-10 * max(1.0, abs(e1.value) ** 2),
              e1.residual, 1e-10, f"eta1={e1.value.real!r}")
    except BlowwaveError as exc:
        e1 = None
        skip("eta1_residual", str(exc))
    have_mu = params.c > 2.0 * math.sqrt(params.p)
    if have_mu:
        e2 = charroots.eta2(params)
        check("eta2_residual", e2.residual <= 1e-10 * max(1.0, abs(e2.value) ** 2),
              e2.residual, 1e-10, f"eta2={e2.value.real!r}")
    else:
        skip("eta2_residual", "c <= 2*sqrt(p)")

    ok_axis, axis_min = charroots.imaginary_axis_clear(CharKind.CE, params)
    check("axis_clear", ok_axis, axis_min, 1e-6)

    eps = abs(lam1) / 10.0
    count_u = charroots.count_roots_rect(
        CharKind.CE, StripQuery(lam1 - eps, 0.0, -50.0, 50.0), params)
    info("left_strip_count", count_u)

    plan = SimpsonPlan(0.0, 1.0, 2)
    cubic = simpson(lambda x: x ** 3, plan)
    check("simpson_cubic_exact", abs(cubic - 0.25) <= 1e-15, cubic.real, 0.25)
    e_n = abs(simpson(lambda x: x ** 4, SimpsonPlan(0.0, 1.0, 8)) - 0.2)
    e_2n = abs(simpson(lambda x: x ** 4, SimpsonPlan(0.0, 1.0, 16)) - 0.2)
    ratio = e_n / e_2n
    check("simpson_order_ratio", 15.0 <= ratio <= 17.0, ratio, 16.0)

    n_freq = cfg.n_freq if cfg.n_freq else None
    table = build_kernel_table(params, T_ker=cfg.T_ker, h_ker=cfg.h_ker,
                               N=cfg.N, n_freq=n_freq)
    max_abs = float(np.max(np.abs(table.values)))
    check("kernel_realness", table.max_imag < 1e-8 * max_abs,
          table.max_imag, 1e-8 * max_abs)
    check("kernel_decay_rate", table.decay_delta1 > 0, table.decay_delta1, 0.0,
          f"M1={table.decay_m1!r}")
    info("kernel_mass", table.mass,
         f"target {1.0 / (params.delta + params.beta)!r}")
    info("truncation_radius_1e-6", tail_truncation_radius(table, 1e-6))

    eta_for_bridge = e1.value.real if e1 is not None else lam2
    br = bridge_coeffs(eta_for_bridge, cfg.T_bridge)
    m0 = abs(float(br.f(-cfg.T_bridge)) - math.exp(-br.eta1 * br.T) / 4.0)
    m1 = abs(float(br.fp(-cfg.T_bridge)) - (br.eta1 / 4.0) * math.exp(-br.eta1 * br.T))
    note_src = "eta1" if e1 is not None else "lambda2 (eta1 unavailable)"
    check("bridge_match_value", m0 <= 1e-12, m0, 1e-12, f"rate from {note_src}")
    check("bridge_match_slope", m1 <= 1e-12, m1, 1e-12)
    info("bridge_printed_mismatch", br.printed_mismatch)

    if have_mu and e1 is not None:
        grid = Grid(cfg.L, cfg.h)
        pair = paired_profiles(params, grid, cfg.T_bridge,
                               placement=cfg.lower_placement)
        check("quasi_upper_certificate", pair.upper_report.passed,
              pair.upper_report.worst_value, 1e-8)
        check("quasi_lower_certificate", pair.lower_report.passed,
              pair.lower_report.worst_value, -1e-8,
              f"placement={pair.placement}")
        check("quasi_ordering", pair.ordered, 1.0 if pair.ordered else 0.0, 1.0)
    else:
        why = "c <= 2*sqrt(p)" if not have_mu else "eta1 unavailable"
        skip("quasi_upper_certificate", why)
        skip("quasi_lower_certificate", why)
        skip("quasi_ordering", why)

    L_fp = min(10.0, cfg.L)
    tol_fp = 1e-3
    table_fp = build_kernel_table(params, T_ker=2.0 * L_fp, h_ker=cfg.h,
                                  N=cfg.N, n_freq=n_freq)
    needed = tail_truncation_radius(table_fp, tol_fp / 10.0)
    if needed > table_fp.T_ker:
        table_fp = build_kernel_table(params, T_ker=math.ceil(needed) + 4.0,
                                      h_ker=cfg.h, N=cfg.N, n_freq=n_freq)
    grid_fp = Grid(L_fp, cfg.h)
    icfg = IterationConfig(grid=grid_fp, kernel=table_fp, tol=tol_fp,
                           pre_check=False)
    ue = equilibria(params).ue
    zero = Profile(grid=grid_fp, values=np.zeros(grid_fp.count),
                   left_limit=0.0, right_limit=0.0)
    f0 = apply_F(zero, icfg, params)
    check("fixed_point_zero", float(np.max(np.abs(f0.values))) == 0.0,
          float(np.max(np.abs(f0.values))), 0.0)
    const = Profile(grid=grid_fp, values=np.full(grid_fp.count, ue),
                    left_limit=ue, right_limit=ue)
    fue = apply_F(const, icfg, params)
    err_ue = float(np.max(np.abs(fue.values - ue)))
    bound_ue = 1e-3 if params.r1 == 0.0 else 5e-3
    check("fixed_point_ue", err_ue < bound_ue, err_ue, bound_ue)

    _write_csv(outdir / "verify_report.csv",
               ("check", "status", "observed", "bound", "note"), rows)
    failed = [r for r in rows if r[1] == "FAIL"]
    if not quiet:
        for name, status, observed, bound, note in rows:
            extra = f"  [{note}]" if note else ""
            print(f"{status:4s} {name:28s} {observed!s:>24s}{extra}")
        print(f"verify: {len(failed)} failed / {len(rows)} rows")
    return EXIT_OK if not failed else EXIT_NOCONV


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="blowwave",
        description="Monotone traveling-wave front solver for a Nicholson "
                    "blowflies model with a delayed diffusion term.",
    )
    parser.add_argument("command",
                        choices=["roots", "kernel", "quasi", "iterate",
                                 "simpson-table", "verify"])
    parser.add_argument("--config", required=True, help="path to a JSON config")
    parser.add_argument("--out", default=None, help="output directory override")
    parser.add_argument("--mode", choices=["printed", "consistent"], default=None,
                        help="kappa-table integrand reported on stdout")
    parser.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        outdir = _prepare_out(cfg, args.out)
        if args.command == "roots":
            return cmd_roots(cfg, outdir, args.quiet)
        if args.command == "kernel":
            return cmd_kernel(cfg, outdir, args.quiet)
        if args.command == "quasi":
            return cmd_quasi(cfg, outdir, args.quiet)
        if args.command == "iterate":
            return cmd_iterate(cfg, outdir, args.quiet)
        if args.command == "simpson-table":
            return cmd_simpson_table(cfg, outdir, args.quiet, mode=args.mode)
        return cmd_verify(cfg, outdir, args.quiet)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowwaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
