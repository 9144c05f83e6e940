"""Closed-form equilibrium: the stationary density and the matching arrivals."""

from dataclasses import dataclass, asdict
import math

import numpy as np

from .exceptions import GridError
from .payoff_transform import DensityField, jam_density, times_of_payoff
from .point_queue import ArrivalProfile

__all__ = [
    "EquilibriumSummary",
    "jam_density",
    "spue_summary",
    "spue_density",
    "equilibrium_arrivals",
    "equilibrium_potential",
]


@dataclass(frozen=True)
class EquilibriumSummary:
    kappa: float
    L_star: float
    phi_star: float
    t_first: float
    t_last: float

    def as_dict(self):
        return asdict(self)


def spue_summary(p):
    """Jam density, queue length on the payoff axis, common cost and arrival window."""
    kappa = jam_density(p)
    L = p.demand_total / kappa
    t_first, t_last = times_of_payoff(p.x_max - L, p)
    return EquilibriumSummary(kappa, L, p.free_flow_cost + L, t_first, t_last)


def equilibrium_potential(p):
    """Exact minimum of ``-integral x k dx``: ``N * (alpha*upsilon0 + L*/2)``."""
    L = p.demand_total / jam_density(p)
    return p.demand_total * (p.free_flow_cost + 0.5 * L)


def _overlap(lo, hi, a, b):
    return np.clip(np.minimum(hi, b) - np.maximum(lo, a), 0.0, None)


def spue_density(grid, p):
    """Stationary density: ``kappa`` on ``[x_max - L*, x_max]``, zero elsewhere.

    The cell holding the shock gets the fractional value that keeps the
    vehicle count exact.
    """
    s = spue_summary(p)
    lo = p.x_max - s.L_star
    if grid.x_min > lo + 1e-12 * max(1.0, abs(lo)):
        raise GridError(
            f"payoff grid starts at {grid.x_min:.6g} but the queue reaches {lo:.6g}"
        )
    cells = s.L_star / grid.dx
    n_full = math.floor(cells + 1e-12)
    rest = max(cells - n_full, 0.0)
    k = np.zeros(grid.n_cells)
    if n_full:
        k[grid.n_cells - n_full:] = s.kappa
    if rest > 1e-12 and n_full < grid.n_cells:
        k[grid.n_cells - n_full - 1] = rest * s.kappa
    return DensityField(grid, k)


def equilibrium_arrivals(tg, p):
    """Arrivals at capacity on ``[t_first, t_last]`` with fractional boundary bins."""
    s = spue_summary(p)
    tol = 1e-12 * max(1.0, abs(s.t_first), abs(s.t_last))
    if tg.t_min > s.t_first + tol or tg.t_max < s.t_last - tol:
        raise GridError(
            f"time grid [{tg.t_min:.6g}, {tg.t_max:.6g}] does not cover the "
            f"arrival window [{s.t_first:.6g}, {s.t_last:.6g}]"
        )
    e = tg.edges
    frac = _overlap(e[:-1], e[1:], s.t_first, s.t_last) / tg.dt
    # edges carry rounding of order ulp(t); classify whole bins with a dt-relative slack
    slack = 1e-9 * tg.dt
    frac[(e[:-1] >= s.t_first - slack) & (e[1:] <= s.t_last + slack)] = 1.0
    frac[(e[1:] <= s.t_first + slack) | (e[:-1] >= s.t_last - slack)] = 0.0
    return ArrivalProfile(tg, p.capacity * frac)
