"""Randomized property batteries bundled by the ``verify`` subcommand.

Each battery returns a dict with ``name``, ``passed`` and the worst
observed quantity next to the tolerance it was held to. ``tol_scale``
multiplies every tolerance (values below 1 tighten them).
"""

import numpy as np

from .cost_model import CostParams
from .equilibrium import spue_density, spue_summary
from .lp_oracle import cross_check, cumulative_mass_gap, solve_spue_lp
from .lwr_core import SimState, run
from .lyapunov import LyapunovMonitor, potential
from .initial import random_density
from .payoff_transform import (
    PayoffGrid,
    atue_objective,
    density_from_arrivals,
    jam_density,
    time_grid_for,
    times_of_payoff,
)
from .point_queue import ArrivalProfile, DepartureProfile, TimeGrid, propagate, vacancy_property_check


def random_arrivals(tg, p, rng, max_pieces=8, window=None):
    """Piecewise-constant arrivals with random breakpoints, bin-averaged onto ``tg``.

    Breakpoints fall inside ``window`` (default: the whole grid).

    Levels lie in ``[0, C]``; overlapping pieces are capped at ``C``.
    """
    n = rng.integers(1, max_pieces + 1)
    lo, hi = window if window is not None else (tg.t_min, tg.t_max)
    cuts = np.sort(rng.uniform(lo, hi, size=2 * n))
    levels = rng.uniform(0, p.capacity, size=n)
    e = tg.edges
    mass = np.zeros(tg.n_bins)
    for (a, b), lvl in zip(cuts.reshape(-1, 2), levels):
        mass += lvl * np.clip(np.minimum(e[1:], b) - np.maximum(e[:-1], a), 0, None)
    rates = mass / tg.dt
    return ArrivalProfile(tg, np.minimum(rates, p.capacity))


def random_departures(p, rng, n_bins=200):
    """Random pulses around ``t_star`` at rates up to three times capacity."""
    unit = p.demand_total / p.capacity
    dt = 3.0 * unit / n_bins
    tg = TimeGrid(p.t_star - 1.5 * unit - p.upsilon0, dt, n_bins)
    rates = np.zeros(n_bins)
    for _ in range(rng.integers(1, 5)):
        a = rng.integers(0, n_bins - 1)
        b = rng.integers(a + 1, min(n_bins, a + n_bins // 3) + 1)
        rates[a:b] += rng.uniform(0.1, 3.0) * p.capacity
    rates *= p.demand_total / (rates.sum() * dt)
    return DepartureProfile(tg, rates)


def random_params(rng):
    beta = rng.uniform(0.5, 5.0)
    return CostParams(
        alpha=beta * rng.uniform(1.1, 3.0),
        beta=beta,
        gamma=rng.uniform(0.5, 20.0),
        t_star=rng.uniform(6.0, 10.0),
        upsilon0=rng.uniform(0.0, 1.0),
        capacity=rng.uniform(0.5, 3.0),
        demand_total=rng.uniform(0.5, 5.0),
    )


def transform_identity(p, rng, trials=100, tol_scale=1.0):
    L = spue_summary(p).L_star
    grid = PayoffGrid.build(p, L / 50.0, span=4 * L)
    # bins deliberately incommensurate with cells so the identity is not exact
    dt = grid.dx / (1.37 * max(p.beta, p.gamma))
    t_lo, t_hi = times_of_payoff(grid.x_min, p)
    tg = TimeGrid.covering(t_lo, t_hi, dt, anchor=p.t_star + 0.31 * dt)
    window = (t_lo + dt, t_hi - dt)
    h = grid.dx + max(p.beta, p.gamma) * tg.dt
    worst = 0.0
    for _ in range(trials):
        g = random_arrivals(tg, p, rng, window=window)
        err = abs(potential(density_from_arrivals(g, grid, p)) - atue_objective(g, p))
        worst = max(worst, err / (0.5 * g.mass * h) if g.mass > 0 else 0.0)
    tol = tol_scale
    return {"name": "transform_identity", "passed": worst <= tol, "worst_error_over_bound": worst, "tol": tol}


def vacancy(p, rng, trials=100, tol_scale=1.0):
    violations = 0
    pairs = 0
    for _ in range(trials):
        g, q = propagate(random_departures(p, rng), p)
        rep = vacancy_property_check(g, q, p, exhaustive=True, tol=1e-12 * tol_scale)
        violations += len(rep.violations)
        pairs += rep.pairs_checked
    return {"name": "vacancy", "passed": violations == 0, "violations": violations, "pairs": pairs}


def oracle_agreement(rng, trials=20, tol_scale=1.0):
    worst_obj, worst_mass, mass_tol = 0.0, 0.0, np.inf
    for _ in range(trials):
        p = random_params(rng)
        L = spue_summary(p).L_star
        grid = PayoffGrid.build(p, L / rng.uniform(20, 200), span=2 * L)
        lp = solve_spue_lp(grid, p)
        exact = spue_density(grid, p)
        ref = potential(exact)
        worst_obj = max(worst_obj, abs(lp.objective - ref) / abs(ref))
        worst_mass = max(worst_mass, cumulative_mass_gap(lp.profile, exact) / (jam_density(p) * grid.dx))
    obj_tol, mass_tol = 1e-12 * tol_scale, 1.0 * tol_scale
    return {
        "name": "oracle_agreement",
        "passed": worst_obj <= obj_tol and worst_mass <= mass_tol,
        "worst_objective_rel": worst_obj,
        "objective_tol": obj_tol,
        "worst_mass_cells": worst_mass,
        "mass_tol_cells": mass_tol,
    }


def formulation_equivalence(p, tol_scale=1.0):
    L = spue_summary(p).L_star
    grid = PayoffGrid.build(p, 1e-3 * L, span=1.5 * L)
    rep = cross_check(p, grid, time_grid_for(grid, p))
    tol = rep.objective_tol * tol_scale
    return {
        "name": "formulation_equivalence",
        "passed": rep.objective_gap <= tol and rep.mass_gap <= rep.mass_tol * tol_scale * (1 + 1e-9),
        "objective_gap": rep.objective_gap,
        "tol": tol,
        "mass_gap": rep.mass_gap,
    }


def descent(p, fd, rng, trials=3, days=5.0, tol_scale=1.0):
    L = spue_summary(p).L_star
    grid = PayoffGrid.build(p, L / 50.0, span=4 * L)
    worst_rate, worst_id, ok = -np.inf, 0.0, True
    for _ in range(trials):
        k0 = random_density(grid, p, 3 * L, rng)
        mon = LyapunovMonitor(strict=False, descent_slack=1e-12 * tol_scale, identity_rtol=1e-10 * tol_scale)
        run(SimState(0.0, k0, fd), days, observers=[mon], tol=None)
        ok &= mon.passed
        for r in mon.records:
            worst_rate = max(worst_rate, r.phi_discrete_rate)
            worst_id = max(worst_id, abs(r.phi_discrete_rate + r.flux_integral) / (1 + abs(r.flux_integral)))
    return {
        "name": "descent",
        "passed": bool(ok),
        "max_phi_rate": worst_rate,
        "worst_identity_rel": worst_id,
    }


def run_all(p, fd, seed=0, tol_scale=1.0):
    rng = np.random.default_rng(seed)
    streams = rng.spawn(5)
    return [
        transform_identity(p, streams[0], tol_scale=tol_scale),
        vacancy(p, streams[1], tol_scale=tol_scale),
        oracle_agreement(streams[2], tol_scale=tol_scale),
        formulation_equivalence(p, tol_scale=tol_scale),
        descent(p, fd, streams[3], tol_scale=tol_scale),
    ]
