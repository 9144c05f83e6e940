"""Discretized equilibrium linear programs solved by greedy filling.

Both programs have a linear objective, one equality (total demand) and box
bounds per variable: a continuous knapsack, for which filling the cheapest
variables first to their upper bound is optimal.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .cost_model import scheduling_cost
from .exceptions import InfeasibleError
from .lyapunov import potential
from .payoff_transform import DensityField, atue_objective, density_from_arrivals, jam_density
from .point_queue import ArrivalProfile


@dataclass(frozen=True)
class LpSolution:
    """Optimal per-cell (or per-bin) values and their objective.

    ``active_support`` is the ``(first, last)`` index range of non-zero
    variables, inclusive.
    """

    variables: np.ndarray
    objective: float
    active_support: tuple
    profile: object = None


def _greedy_fill(order, capacity_each, total):
    """Fraction of its upper bound taken by each variable, cheapest first."""
    frac = np.zeros(order.size)
    n_full = int(min(order.size, math.floor(total / capacity_each + 1e-12)))
    frac[order[:n_full]] = 1.0
    rest = total - n_full * capacity_each
    if rest > 1e-12 * total:
        if n_full == order.size:
            raise InfeasibleError(
                f"grid holds at most {capacity_each * order.size:.6g} vehicles, need {total:.6g}"
            )
        frac[order[n_full]] = rest / capacity_each
    return frac


def _support(values):
    nz = np.flatnonzero(values > 0)
    return (int(nz[0]), int(nz[-1])) if nz.size else (0, -1)


def solve_spue_lp(grid, p):
    """Minimize ``-sum x k dx`` s.t. ``sum k dx = N`` and ``0 <= k <= kappa``."""
    kappa = jam_density(p)
    order = np.argsort(-grid.centers, kind="stable")
    k = kappa * _greedy_fill(order, kappa * grid.dx, p.demand_total)
    f = DensityField(grid, k)
    return LpSolution(k, potential(f), _support(k), f)


def solve_atue_lp(tg, p):
    """Minimize ``sum g phi2 dt`` s.t. ``sum g dt = N`` and ``0 <= g <= C``.

    Bins are ranked by ``phi2`` at their centers; equal costs go to the
    earlier bin first.
    """
    centers = tg.centers
    order = np.lexsort((centers, scheduling_cost(centers, p)))
    g = p.capacity * _greedy_fill(order, p.capacity * tg.dt, p.demand_total)
    prof = ArrivalProfile(tg, g)
    return LpSolution(g, atue_objective(prof, p), _support(g), prof)


def cumulative_mass_gap(a, b):
    """Largest discrepancy of vehicles counted from the right wall (veh).

    A value at most ``kappa * dx`` means the two fields differ by less than
    one cell's worth of displaced mass.
    """
    ca = np.cumsum(a.k[::-1]) * a.grid.dx
    cb = np.cumsum(b.k[::-1]) * b.grid.dx
    return float(np.max(np.abs(ca - cb)))


@dataclass
class CrossCheckReport:
    spue_objective: float
    atue_objective: float
    objective_gap: float
    objective_tol: float
    mass_gap: float
    mass_tol: float
    deviations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.deviations


def cross_check(p, grid, tg, objective_tol=None):
    """Solve both programs and compare objectives and transformed densities.

    The default objective tolerance ``(N/2) * (dx + max(beta, gamma) * dt)``
    bounds the midpoint-rule error of either discretization.
    """
    spue = solve_spue_lp(grid, p)
    atue = solve_atue_lp(tg, p)
    if objective_tol is None:
        objective_tol = 0.5 * p.demand_total * (grid.dx + max(p.beta, p.gamma) * tg.dt)
    k_atue = density_from_arrivals(atue.profile, grid, p)
    gap = abs(spue.objective - atue.objective)
    mgap = cumulative_mass_gap(k_atue, spue.profile)
    mtol = jam_density(p) * grid.dx
    report = CrossCheckReport(spue.objective, atue.objective, gap, objective_tol, mgap, mtol)
    if gap > objective_tol:
        report.deviations.append(f"objective gap {gap:.3e} > {objective_tol:.3e}")
    if mgap > mtol * (1 + 1e-9):
        report.deviations.append(f"density mismatch {mgap:.3e} veh > one cell ({mtol:.3e} veh)")
    return report
