"""Point-queue dynamics at the bottleneck on a uniform within-day time grid."""

from dataclasses import dataclass, field
import math

import numpy as np

from .cost_model import scheduling_cost, total_cost
from .exceptions import ParameterError


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of ``n_bins`` bins of width ``dt`` starting at ``t_min``."""

    t_min: float
    dt: float
    n_bins: int

    def __post_init__(self):
        if not self.dt > 0:
            raise ParameterError(f"dt must be > 0, got {self.dt!r}")
        if int(self.n_bins) != self.n_bins or self.n_bins < 1:
            raise ParameterError(f"n_bins must be a positive integer, got {self.n_bins!r}")
        object.__setattr__(self, "n_bins", int(self.n_bins))

    @classmethod
    def covering(cls, t_lo, t_hi, dt, anchor=None):
        """Smallest grid of step ``dt`` covering ``[t_lo, t_hi]``.

        If ``anchor`` is given it falls exactly on a bin edge.
        """
        if anchor is None:
            anchor = t_lo
        start = anchor - math.ceil((anchor - t_lo) / dt - 1e-9) * dt
        n = max(1, math.ceil((t_hi - start) / dt - 1e-9))
        return cls(start, dt, n)

    @property
    def t_max(self):
        return self.t_min + self.n_bins * self.dt

    @property
    def edges(self):
        return self.t_min + self.dt * np.arange(self.n_bins + 1)

    @property
    def centers(self):
        return self.t_min + self.dt * (np.arange(self.n_bins) + 0.5)

    def shifted(self, offset):
        return TimeGrid(self.t_min + offset, self.dt, self.n_bins)

    def extended(self, extra_bins):
        return TimeGrid(self.t_min, self.dt, self.n_bins + extra_bins)


def _as_rates(rates, grid):
    rates = np.array(rates, dtype=float)
    if rates.shape != (grid.n_bins,):
        raise ParameterError(f"expected {grid.n_bins} rates, got shape {rates.shape}")
    if np.any(rates < 0) or not np.all(np.isfinite(rates)):
        raise ParameterError("flow rates must be finite and non-negative")
    rates.setflags(write=False)
    return rates


@dataclass(frozen=True)
class _Profile:
    grid: TimeGrid
    rates: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rates", _as_rates(self.rates, self.grid))

    @property
    def mass(self):
        return float(np.sum(self.rates) * self.grid.dt)

    def cumulative(self):
        """Cumulative count at every bin edge (length ``n_bins + 1``)."""
        return np.concatenate([[0.0], np.cumsum(self.rates * self.grid.dt)])

    def cumulative_at(self, t):
        """Cumulative count at arbitrary times (exact for piecewise-constant rates)."""
        return np.interp(t, self.grid.edges, self.cumulative())

    def check_mass(self, total, rtol=1e-9):
        if abs(self.mass - total) > rtol * total:
            raise ParameterError(f"profile carries {self.mass!r} vehicles, expected {total!r}")


class DepartureProfile(_Profile):
    """Departure flow rate f' (veh/hr) per bin."""


class ArrivalProfile(_Profile):
    """Arrival flow rate g (veh/hr) per bin."""

    def check_capacity(self, capacity):
        if np.any(self.rates > capacity * (1 + 1e-12)):
            raise ParameterError("arrival rate exceeds the bottleneck capacity")


@dataclass(frozen=True)
class QueueTrace:
    """Queue left behind after each bin's service, and the matching delay.

    ``queue_size[j]`` is the point-queue content at the end of bin ``j``;
    ``queue_time = queue_size / C``. Both vanish on every bin in which the
    bottleneck is under-utilized.
    """

    grid: TimeGrid
    queue_size: np.ndarray
    queue_time: np.ndarray


def shift_departures(f_prime, p):
    """Translate a departure profile by the free-flow travel time."""
    return DepartureProfile(f_prime.grid.shifted(p.upsilon0), f_prime.rates)


def propagate(f, p):
    """Serve the (already shifted) inflow ``f`` through the point queue.

    The grid is extended past ``f``'s horizon until the residual queue has
    drained, so arrivals carry the full demand.

    Returns
    -------
    (ArrivalProfile, QueueTrace)
    """
    C, dt = p.capacity, f.grid.dt
    inflow = list(f.rates)
    g, delta = [], []
    queue = 0.0
    j = 0
    while j < len(inflow) or queue > 0.0:
        f_j = inflow[j] if j < len(inflow) else 0.0
        demand = queue / dt + f_j
        if demand < C:
            g.append(demand)
            queue = 0.0
        else:
            g.append(C)
            queue = max(0.0, queue + (f_j - C) * dt)
        delta.append(queue)
        j += 1
    grid = f.grid.extended(len(g) - f.grid.n_bins)
    delta = np.array(delta)
    return ArrivalProfile(grid, np.array(g)), QueueTrace(grid, delta, delta / C)


def cumulative_arrivals_oracle(f, p, n_bins=None):
    """Reference G at bin edges from ``G(t) = min_{s<=t} F(s) + C (t - s)``.

    Quadratic time; meant for testing ``propagate``.
    """
    n = f.grid.n_bins if n_bins is None else n_bins
    dt = f.grid.dt
    F = np.concatenate([[0.0], np.cumsum(np.pad(f.rates, (0, n - f.grid.n_bins)) * dt)])
    t = dt * np.arange(n + 1)
    G = np.empty(n + 1)
    for i in range(n + 1):
        G[i] = np.min(F[: i + 1] + p.capacity * (t[i] - t[: i + 1]))
    return G


@dataclass
class VacancyReport:
    trials: int
    pairs_checked: int
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations


def vacancy_property_check(g, q, p, trials=1000, rng=None, exhaustive=False, tol=1e-12):
    """Check that under-utilized times are never beaten by costlier-scheduled ones.

    For pairs ``(t1, t2)`` of bin centers with ``g(t1) < C`` and
    ``phi2(t2) >= phi2(t1)`` the total cost must satisfy ``phi(t2) >= phi(t1)``.
    Pairs are sampled at random, or all scanned when ``exhaustive`` is set.
    """
    t = g.grid.centers
    phi2 = scheduling_cost(t, p)
    phi = total_cost(t, q.queue_time, p)
    under = np.flatnonzero(g.rates < p.capacity)
    report = VacancyReport(trials=trials, pairs_checked=0)
    if under.size == 0:
        return report
    if exhaustive:
        for i in under:
            mask = phi2 >= phi2[i]
            report.pairs_checked += int(mask.sum())
            bad = np.flatnonzero(mask & (phi < phi[i] - tol))
            report.violations.extend((float(t[i]), float(t[j])) for j in bad)
        return report
    rng = np.random.default_rng(rng)
    i = rng.choice(under, size=trials)
    j = rng.integers(0, t.size, size=trials)
    ok = phi2[j] >= phi2[i]
    report.pairs_checked = int(ok.sum())
    bad = ok & (phi[j] < phi[i] - tol)
    report.violations.extend((float(t[a]), float(t[b])) for a, b in zip(i[bad], j[bad]))
    return report
