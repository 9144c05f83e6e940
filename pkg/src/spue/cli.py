"""Command line entry point: ``spue {equilibrium,simulate,verify}``.

Exit codes: 0 all verdicts pass, 1 usage or configuration error,
2 a numerical verdict failed.
"""

import argparse
import json
import logging
from pathlib import Path
import sys

import numpy as np

from . import io, svg
from .config import default_config, load_config
from .equilibrium import equilibrium_arrivals, spue_density, spue_summary
from .exceptions import DescentViolation, SpueError
from .initial import build_initial, departures_payoff_span, two_pulse_departures
from .lp_oracle import cross_check, cumulative_mass_gap, solve_atue_lp, solve_spue_lp
from .lwr_core import SimState, run
from .lyapunov import LyapunovMonitor, descent_report, potential
from .payoff_transform import PayoffGrid, arrivals_from_density, time_grid_for
from .point_queue import TimeGrid
from .properties import run_all

log = logging.getLogger("spue")

EXIT_OK, EXIT_USAGE, EXIT_VERDICT = 0, 1, 2


def initial_payoff_span(cfg, departures=None):
    """Payoff length occupied by the configured initial condition."""
    L = spue_summary(cfg.params).L_star
    if cfg.preset == "from_departures":
        return departures_payoff_span(departures, cfg.params)
    return cfg.span * L


def payoff_grid(cfg, ic_span=None):
    """Grid down to ``x_min`` or, by default, ``max(4 L*, 1.1 * ic_span)`` below the wall."""
    p = cfg.params
    if cfg.x_min is not None:
        return PayoffGrid.build(p, cfg.dx, x_min=cfg.x_min)
    L = spue_summary(p).L_star
    span = max(4.0 * L, 1.1 * (ic_span if ic_span is not None else cfg.span * L))
    return PayoffGrid.build(p, cfg.dx, span=span)


def time_grid(cfg, grid):
    if cfg.t_min is not None or cfg.t_max is not None:
        dt = cfg.dt if cfg.dt is not None else grid.dx / max(cfg.params.beta, cfg.params.gamma)
        full = time_grid_for(grid, cfg.params, dt)
        lo = cfg.t_min if cfg.t_min is not None else full.t_min
        hi = cfg.t_max if cfg.t_max is not None else full.t_max
        return TimeGrid.covering(lo, hi, dt, anchor=cfg.params.t_star)
    return time_grid_for(grid, cfg.params, cfg.dt)


def _emit(payload):
    print(json.dumps(payload, indent=2, default=float))


def cmd_equilibrium(cfg):
    p = cfg.params
    out = Path(cfg.out)
    grid = payoff_grid(cfg)
    tg = time_grid(cfg, grid)
    summary = spue_summary(p)
    k_star = spue_density(grid, p)
    g_star = equilibrium_arrivals(tg, p)
    spue_lp = solve_spue_lp(grid, p)
    atue_lp = solve_atue_lp(tg, p)
    check = cross_check(p, grid, tg)

    io.write_table(out / "summary.csv", summary.as_dict())
    io.write_density(out / "spue_density.csv", k_star)
    io.write_profile(out / "equilibrium_arrivals.csv", g_star)
    io.write_density(out / "spue_lp.csv", spue_lp.profile)
    io.write_profile(out / "atue_lp.csv", atue_lp.profile)
    report = {
        "summary": summary.as_dict(),
        "potential_exact": potential(k_star),
        "spue_lp_objective": spue_lp.objective,
        "atue_lp_objective": atue_lp.objective,
        "cross_check": {
            "objective_gap": check.objective_gap,
            "objective_tol": check.objective_tol,
            "mass_gap": check.mass_gap,
            "mass_tol": check.mass_tol,
            "passed": check.passed,
            "deviations": check.deviations,
        },
    }
    (out / "equilibrium.json").write_text(json.dumps(report, indent=2))
    s = summary
    print(f"kappa     = {s.kappa:.12g} veh/$")
    print(f"L*        = {s.L_star:.12g} $")
    print(f"phi*      = {s.phi_star:.12g} $")
    print(f"window    = [{s.t_first:.12g}, {s.t_last:.12g}] h")
    print(f"Phi(k*)   = {report['potential_exact']:.12g}")
    print(f"SPUE LP   = {spue_lp.objective:.12g}")
    print(f"ATUE LP   = {atue_lp.objective:.12g}")
    print(f"cross-check {'PASS' if check.passed else 'FAIL'}" + "".join(f"\n  {d}" for d in check.deviations))
    return EXIT_OK if check.passed else EXIT_VERDICT


def shock_distance(final, k_star, exclude=2):
    """Max-norm distance ignoring ``exclude`` cells on either side of the shock."""
    diff = np.abs(final.k - k_star.k)
    idx = np.flatnonzero(k_star.k > 0)
    keep = np.ones(diff.size, dtype=bool)
    if idx.size:
        s = idx[0]
        keep[max(0, s - exclude): s + exclude + 1] = False
    return float(diff[keep].max()) if keep.any() else 0.0


def cmd_simulate(cfg):
    p, fd = cfg.params, cfg.fd
    out = Path(cfg.out)
    rng = np.random.default_rng(cfg.seed)
    departures = None
    if cfg.preset == "from_departures":
        departures = io.read_departures(cfg.departures) if cfg.departures else two_pulse_departures(p)
    grid = payoff_grid(cfg, initial_payoff_span(cfg, departures))
    k0 = build_initial(cfg.preset, grid, p, span=cfg.span * spue_summary(p).L_star, rng=rng, departures=departures)
    k0.check_feasible(fd.kappa, p.demand_total)
    k_star = spue_density(grid, p)
    monitor = LyapunovMonitor(strict=True)
    mass0 = k0.mass
    mass_err = [0.0]

    def mass_watch(prev, nxt, q, dr):
        mass_err[0] = max(mass_err[0], abs(nxt.field.mass - mass0))

    try:
        traj = run(
            SimState(0.0, k0, fd),
            cfg.days,
            observers=[monitor, mass_watch],
            stride=cfg.stride,
            cfl_factor=cfg.cfl_factor,
            tol=cfg.tol,
        )
    except DescentViolation as exc:
        io.write_density(out / "violation_prev.csv", exc.prev.field)
        io.write_density(out / "violation_next.csv", exc.next.field)
        print(f"descent violation: {exc}; states dumped to {out}", file=sys.stderr)
        return EXIT_VERDICT
    final = traj.final.field
    report = descent_report(traj.snapshots, potential(k_star), records=monitor.records)
    dist = shock_distance(final, k_star)
    left_wall = float(max(s.field.k[0] for s in traj.snapshots))
    verdicts = {
        "monotone": report.monotone,
        "mass": mass_err[0] <= 1e-9 * p.demand_total,
        "converged": dist <= 0.05 * fd.kappa,
        "left_wall_empty": left_wall < 1e-12 * fd.kappa,
    }
    io.write_trajectory(out / "trajectory.csv", traj.snapshots)
    io.write_descent(out / "descent.csv", monitor.records)
    io.write_density(out / "final_density.csv", final)
    io.write_density(out / "initial_density.csv", k0)
    with (out / "final_vs_analytic.csv").open("w") as fh:
        fh.write("x,k_final,k_star,diff\n")
        for x, a, b in zip(grid.centers, final.k, k_star.k):
            fh.write(f"{x:.17g},{a:.17g},{b:.17g},{a - b:.17g}\n")
    tg = time_grid(cfg, grid)
    io.write_profile(out / "final_arrivals.csv", arrivals_from_density(final, p, tg))
    if cfg.svg:
        picks = traj.snapshots[:: max(1, len(traj.snapshots) // 6)][:6] + [traj.snapshots[-1]]
        series = []
        for s in picks:
            xs, ys = svg.step_points(grid.edges, s.field.k)
            series.append((f"day {s.day:.3g}", xs, ys))
        svg.line_chart(out / "density_snapshots.svg", series, "Imaginary density", "payoff x ($)", "k (veh/$)")
        days = np.array([r.day for r in monitor.records])
        gaps = np.array([r.phi for r in monitor.records]) - potential(k_star)
        svg.line_chart(out / "potential.svg", [("Phi - Phi*", days, gaps)], "Potential gap", "day", "Phi - Phi*", logy=True)
    summary = {
        "preset": cfg.preset,
        "steps": traj.n_steps,
        "final_day": traj.final.day,
        "converged_early": traj.converged,
        "final_gap": report.final_gap,
        "first_day_within_1e-6": report.first_day_within_tol,
        "max_distance_outside_shock": dist,
        "max_mass_error": mass_err[0],
        "verdicts": verdicts,
    }
    (out / "simulate.json").write_text(json.dumps(summary, indent=2))
    _emit(summary)
    return EXIT_OK if all(verdicts.values()) else EXIT_VERDICT


def cmd_verify(cfg, tol_scale=1.0):
    results = run_all(cfg.params, cfg.fd, seed=cfg.seed, tol_scale=tol_scale)
    results = [{k: (bool(v) if isinstance(v, np.bool_) else v) for k, v in r.items()} for r in results]
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = {"seed": cfg.seed, "tol_scale": tol_scale, "passed": all(r["passed"] for r in results), "batteries": results}
    (out / "verify.json").write_text(json.dumps(payload, indent=2, default=float))
    for r in results:
        detail = ", ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}" for k, v in r.items() if k not in ("name", "passed"))
        print(f"{'PASS' if r['passed'] else 'FAIL'} {r['name']}: {detail}")
    return EXIT_OK if payload["passed"] else EXIT_VERDICT


def build_parser():
    parser = argparse.ArgumentParser(prog="spue", description="Day-to-day departure-time dynamics at a single bottleneck.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI config file (default: built-in canonical case)")
    common.add_argument("--out", metavar="DIR", help="output directory (default: $SPUE_OUT or ./spue_out)")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--dx", type=float, help="payoff cell width ($)")
    common.add_argument("--dt", type=float, help="time bin width (h)")
    common.add_argument("--days", type=float, help="simulated horizon (days)")
    common.add_argument("--preset", help="initial condition: uniform, bimodal, random, from_departures")
    common.add_argument("--svg", action=argparse.BooleanOptionalAction, default=None, help="write SVG plots")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("equilibrium", parents=[common], help="analytic equilibrium and both LP oracles")
    sub.add_parser("simulate", parents=[common], help="run the day-to-day dynamics")
    v = sub.add_parser("verify", parents=[common], help="randomized property batteries")
    v.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance (use <1 to tighten)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        cfg = load_config(args.config) if args.config else default_config()
        cfg = cfg.with_overrides(
            out=args.out, seed=args.seed, dx=args.dx, dt=args.dt, days=args.days, preset=args.preset, svg=args.svg
        )
    except SpueError as exc:
        parser.print_usage(sys.stderr)
        print(f"spue: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "equilibrium":
            return cmd_equilibrium(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        return cmd_verify(cfg, args.tol_scale)
    except SpueError as exc:
        hint = ""
        name = type(exc).__name__
        if name == "CFLError":
            hint = " (hint: lower solver.cfl_factor or leave the day step to its default)"
        elif name in ("GridError", "AliasingError", "InfeasibleError"):
            hint = " (hint: widen the grid with grid.x_min, or check grid.t_min/t_max)"
        print(f"spue: error: {exc}{hint}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
