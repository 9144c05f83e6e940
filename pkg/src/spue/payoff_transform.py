"""Maps between arrival time t and scheduling payoff x = -phi2(t).

Every x-cell ``[a, b]`` has two time preimages, ``[t1(a), t1(b)]`` on the
early side of ``t_star`` and ``[t2(b), t2(a)]`` on the late side. Transfers
between the axes integrate over these intervals exactly, so mass is kept
up to rounding whenever both grids cover the support.
"""

from dataclasses import dataclass
import math

import numpy as np

from .cost_model import scheduling_cost
from .exceptions import AliasingError, ParameterError
from .point_queue import ArrivalProfile, TimeGrid


@dataclass(frozen=True)
class PayoffGrid:
    """Uniform cells on ``[x_max - n_cells * dx, x_max]``.

    The right wall ``x_max`` is ``-alpha * upsilon0``; the left wall is a
    truncation of the half-line and must stay empty.
    """

    x_max: float
    dx: float
    n_cells: int

    def __post_init__(self):
        if not self.dx > 0:
            raise ParameterError(f"dx must be > 0, got {self.dx!r}")
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise ParameterError(f"n_cells must be a positive integer, got {self.n_cells!r}")
        object.__setattr__(self, "n_cells", int(self.n_cells))
        object.__setattr__(self, "x_max", float(self.x_max))
        object.__setattr__(self, "dx", float(self.dx))

    @classmethod
    def build(cls, p, dx, span=None, x_min=None):
        """Grid anchored at ``p.x_max`` reaching at least down to ``x_min``.

        Exactly one of ``span`` (payoff length) or ``x_min`` is required; the
        left wall is moved outward to the next whole cell.
        """
        if (span is None) == (x_min is None):
            raise ParameterError("give exactly one of span or x_min")
        if span is None:
            span = p.x_max - x_min
        if not span > 0:
            raise ParameterError(f"grid span must be > 0, got {span!r}")
        return cls(p.x_max, dx, max(1, math.ceil(span / dx - 1e-9)))

    @property
    def x_min(self):
        return self.x_max - self.n_cells * self.dx

    @property
    def edges(self):
        return self.x_max - self.dx * np.arange(self.n_cells, -1, -1)

    @property
    def centers(self):
        return self.edges[:-1] + 0.5 * self.dx


@dataclass(frozen=True)
class DensityField:
    """Cell-averaged imaginary density ``k`` (veh/$) over a PayoffGrid."""

    grid: PayoffGrid
    k: np.ndarray

    def __post_init__(self):
        k = np.array(self.k, dtype=float)
        if k.shape != (self.grid.n_cells,):
            raise ParameterError(f"expected {self.grid.n_cells} cells, got shape {k.shape}")
        if not np.all(np.isfinite(k)):
            raise ParameterError("density must be finite")
        k.setflags(write=False)
        object.__setattr__(self, "k", k)

    @property
    def mass(self):
        return float(np.sum(self.k) * self.grid.dx)

    def cumulative_at(self, x):
        """Vehicles in ``[x_min, x]`` (exact for cell-wise constant density)."""
        cum = np.concatenate([[0.0], np.cumsum(self.k * self.grid.dx)])
        return np.interp(x, self.grid.edges, cum)

    def check_feasible(self, kappa, total=None, atol=1e-12):
        """Raise unless ``0 <= k <= kappa`` (and mass equals ``total`` if given)."""
        slack = atol * kappa
        if np.any(self.k < -slack) or np.any(self.k > kappa + slack):
            raise ParameterError("density leaves the box [0, kappa]")
        if total is not None and abs(self.mass - total) > 1e-9 * total:
            raise ParameterError(f"density carries {self.mass!r} vehicles, expected {total!r}")
        return self


def jam_density(p):
    """Width of the single tube, ``(1/beta + 1/gamma) * C`` (veh/$)."""
    return (1.0 / p.beta + 1.0 / p.gamma) * p.capacity


def times_of_payoff(x, p):
    """Early and late arrival times ``(t1, t2)`` sharing scheduling payoff ``x``."""
    x = np.asarray(x, dtype=float)
    excess = x - p.x_max
    if np.any(excess > 1e-12 * max(1.0, abs(p.x_max))):
        raise ParameterError(f"payoff must not exceed -alpha*upsilon0 = {p.x_max!r}")
    excess = np.minimum(excess, 0.0)
    t1 = p.t_star + excess / p.beta
    t2 = p.t_star - excess / p.gamma
    if t1.ndim == 0:
        return t1.item(), t2.item()
    return t1, t2


def payoff_of_time(t, p):
    """``x = -phi2(t)``."""
    return -np.asarray(scheduling_cost(t, p))


def time_grid_for(grid, p, dt=None):
    """TimeGrid covering both preimages of ``grid`` with ``t_star`` on an edge.

    ``dt`` defaults to ``dx / max(beta, gamma)`` so that no time bin spans
    more than one payoff cell.
    """
    if dt is None:
        dt = grid.dx / max(p.beta, p.gamma)
    t_lo, t_hi = times_of_payoff(grid.x_min, p)
    return TimeGrid.covering(t_lo, t_hi, dt, anchor=p.t_star)


def _mass_tolerance(total, unit):
    return max(1e-9 * total, 1e-12) + 1e-9 * unit


def density_from_arrivals(g, grid, p, check=True):
    """Imaginary density of the arrival profile ``g`` on ``grid``.

    Each cell collects the arrivals over its early and late time preimages,
    divided by ``dx``.

    Raises
    ------
    AliasingError
        If part of ``g``'s mass falls outside the payoff grid.
    """
    a, b = grid.edges[:-1], grid.edges[1:]
    t1a, t2a = times_of_payoff(a, p)
    t1b, t2b = times_of_payoff(b, p)
    early = g.cumulative_at(t1b) - g.cumulative_at(t1a)
    late = g.cumulative_at(t2a) - g.cumulative_at(t2b)
    k = np.maximum(early + late, 0.0) / grid.dx
    field = DensityField(grid, k)
    if check:
        lost = g.mass - field.mass
        if abs(lost) > _mass_tolerance(g.mass, p.capacity * g.grid.dt):
            raise AliasingError(
                f"{lost:.6g} vehicles fall outside the payoff grid "
                f"[{grid.x_min:.6g}, {grid.x_max:.6g}]; widen it"
            )
        kappa = jam_density(p)
        if np.any(field.k > kappa * (1 + 1e-9)):
            raise ParameterError("arrival rates above capacity give density above kappa")
        if np.any(field.k > kappa):
            field = DensityField(grid, np.minimum(field.k, kappa))
    return field


def arrivals_from_density(field, p, tg, check=True):
    """Arrival profile on ``tg`` obtained by the symmetric split.

    Both preimage times of payoff ``x`` receive ``g = k(x) * C / kappa``.
    This reproduces ``field`` exactly at cell centers and keeps ``g <= C``.
    It is one admissible split among many; only the rendered time profile
    depends on the choice.
    """
    kappa = jam_density(p)
    scale = p.capacity / kappa
    lo, hi = tg.edges[:-1], tg.edges[1:]
    ts = p.t_star
    # early side: x rises with t at rate beta
    e_lo, e_hi = np.minimum(lo, ts), np.minimum(hi, ts)
    xe_lo = p.x_max + p.beta * (e_lo - ts)
    xe_hi = p.x_max + p.beta * (e_hi - ts)
    early = scale / p.beta * (field.cumulative_at(xe_hi) - field.cumulative_at(xe_lo))
    # late side: x falls with t at rate gamma
    l_lo, l_hi = np.maximum(lo, ts), np.maximum(hi, ts)
    xl_lo = p.x_max - p.gamma * (l_lo - ts)
    xl_hi = p.x_max - p.gamma * (l_hi - ts)
    late = scale / p.gamma * (field.cumulative_at(xl_lo) - field.cumulative_at(xl_hi))
    rates = np.clip((early + late) / tg.dt, 0.0, p.capacity)
    g = ArrivalProfile(tg, rates)
    if check:
        lost = field.mass - g.mass
        if abs(lost) > _mass_tolerance(field.mass, p.capacity * tg.dt):
            raise AliasingError(f"{lost:.6g} vehicles fall outside the time grid; widen it")
    return g


def atue_objective(g, p):
    """Arrival-time objective ``sum g * phi2(t_center) * dt`` (midpoint rule)."""
    return float(np.sum(g.rates * scheduling_cost(g.grid.centers, p)) * g.grid.dt)
