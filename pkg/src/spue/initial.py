"""Initial density presets.

All presets except ``from_departures`` occupy ``[x_max - span, x_max]``
and leave the rest of the grid empty, so the truncated left wall starts
(and therefore stays) vacant.
"""

import numpy as np

from .cost_model import scheduling_cost
from .exceptions import ParameterError
from .payoff_transform import DensityField, density_from_arrivals, jam_density
from .point_queue import DepartureProfile, TimeGrid, propagate, shift_departures

PRESETS = ("uniform", "bimodal", "random", "from_departures")


def _support_mask(grid, span):
    if span > grid.x_max - grid.x_min + 1e-12:
        raise ParameterError(f"initial span {span:.6g} exceeds the payoff grid")
    return grid.centers >= grid.x_max - span


def _rescale(raw, cap, mass, dx):
    """Scale non-negative ``raw`` to ``mass`` without exceeding ``cap`` per cell."""
    k = np.zeros_like(raw)
    free = raw > 0
    remaining = mass
    for _ in range(raw.size + 1):
        weight = raw[free].sum()
        if weight <= 0:
            break
        trial = raw[free] * (remaining / (weight * dx))
        over = trial >= cap
        if not over.any():
            k[free] = trial
            remaining = 0.0
            break
        idx = np.flatnonzero(free)[over]
        k[idx] = cap
        remaining -= cap * dx * idx.size
        free[idx] = False
    if remaining > 1e-12 * mass:
        raise ParameterError("initial support too short to hold the demand below kappa")
    return k


def uniform_density(grid, p, span):
    mask = _support_mask(grid, span)
    return DensityField(grid, _rescale(mask.astype(float), jam_density(p), p.demand_total, grid.dx))


def bimodal_density(grid, p, span):
    """Two Gaussian bumps at one and three quarters of the span."""
    mask = _support_mask(grid, span)
    x = grid.x_max - grid.centers
    width = span / 10.0
    raw = np.exp(-0.5 * ((x - 0.25 * span) / width) ** 2) + np.exp(-0.5 * ((x - 0.75 * span) / width) ** 2)
    return DensityField(grid, _rescale(raw * mask, jam_density(p), p.demand_total, grid.dx))


def random_density(grid, p, span, rng):
    """Random feasible field: cell-wise noise under a random smooth envelope."""
    rng = np.random.default_rng(rng)
    mask = _support_mask(grid, span)
    x = (grid.x_max - grid.centers) / span
    envelope = np.zeros_like(x)
    for _ in range(rng.integers(1, 5)):
        c, w = rng.uniform(0, 1), rng.uniform(0.05, 0.4)
        envelope += rng.uniform(0.2, 1.0) * np.exp(-0.5 * ((x - c) / w) ** 2)
    raw = envelope * rng.uniform(0.0, 1.0, size=x.size) ** rng.uniform(0.3, 2.0)
    return DensityField(grid, _rescale(raw * mask, jam_density(p), p.demand_total, grid.dx))


def two_pulse_departures(p, dt=None):
    """Departures in two equal pulses, the first at twice capacity.

    First pulse on ``[t* - 2N/C, t* - 1.75N/C)``, second on
    ``[t* + 0.25N/C, t* + 0.75N/C)`` at capacity; each carries ``N/2``.
    """
    N, C = p.demand_total, p.capacity
    unit = N / C
    if dt is None:
        dt = unit / 400.0
    tg = TimeGrid.covering(p.t_star - 2.0 * unit - p.upsilon0, p.t_star + unit, dt, anchor=p.t_star - p.upsilon0)
    t = tg.centers + p.upsilon0 - p.t_star
    rates = np.zeros(tg.n_bins)
    rates[(t >= -2.0 * unit) & (t < -1.75 * unit)] = 2.0 * C
    rates[(t >= 0.25 * unit) & (t < 0.75 * unit)] = C
    rates *= N / (rates.sum() * dt)
    return DepartureProfile(tg, rates)


def arrivals_of_departures(f_prime, p):
    return propagate(shift_departures(f_prime, p), p)


def departures_payoff_span(f_prime, p):
    """Payoff length needed to hold the arrivals produced by ``f_prime``."""
    g, _ = arrivals_of_departures(f_prime, p)
    used = g.grid.edges[np.r_[np.flatnonzero(g.rates > 0), np.flatnonzero(g.rates > 0) + 1]]
    return float(np.max(scheduling_cost(used, p)) - p.free_flow_cost)


def density_from_departures(grid, p, f_prime):
    g, _ = arrivals_of_departures(f_prime, p)
    return density_from_arrivals(g, grid, p)


def build_initial(preset, grid, p, span=None, rng=None, departures=None):
    if preset == "uniform":
        return uniform_density(grid, p, span)
    if preset == "bimodal":
        return bimodal_density(grid, p, span)
    if preset == "random":
        return random_density(grid, p, span, rng)
    if preset == "from_departures":
        if departures is None:
            departures = two_pulse_departures(p)
        return density_from_departures(grid, p, departures)
    raise ParameterError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
