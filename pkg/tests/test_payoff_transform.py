import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spue import (
    AliasingError,
    ArrivalProfile,
    CostParams,
    DensityField,
    ParameterError,
    PayoffGrid,
    TimeGrid,
    arrivals_from_density,
    atue_objective,
    density_from_arrivals,
    equilibrium_arrivals,
    jam_density,
    potential,
    scheduling_cost,
    spue_density,
    spue_summary,
    time_grid_for,
    times_of_payoff,
)
from spue.initial import random_density
from spue.properties import random_arrivals


def test_apex_maps_to_ideal_time(arnott):
    assert times_of_payoff(arnott.x_max, arnott) == (arnott.t_star, arnott.t_star)


def test_times_of_payoff_hand_value():
    # alpha * upsilon0 = 1 with beta < alpha
    p = CostParams(alpha=4, beta=2, gamma=4, t_star=9, upsilon0=0.25, capacity=1, demand_total=1)
    assert times_of_payoff(-3.0, p) == pytest.approx((8.0, 9.5))


def test_payoff_above_wall_rejected(arnott):
    with pytest.raises(ParameterError):
        times_of_payoff(arnott.x_max + 0.1, arnott)


@given(st.floats(0, 50))
def test_round_trip_against_scheduling_cost(depth):
    p = CostParams(alpha=6.4, beta=3.9, gamma=15.21, t_star=9.0, upsilon0=0.5, capacity=1, demand_total=1)
    x = p.x_max - depth
    t1, t2 = times_of_payoff(x, p)
    assert t1 <= p.t_star <= t2
    assert scheduling_cost(t1, p) == pytest.approx(-x, rel=1e-12)
    assert scheduling_cost(t2, p) == pytest.approx(-x, rel=1e-12)


def test_grid_geometry(arnott):
    grid = PayoffGrid.build(arnott, 0.1, span=1.05)
    assert grid.n_cells == 11
    assert abs(grid.n_cells * grid.dx - (grid.x_max - grid.x_min)) < 1e-12
    assert grid.x_max == arnott.x_max
    np.testing.assert_allclose(np.diff(grid.centers), 0.1)


def test_zero_arrivals_zero_density(canonical):
    grid = PayoffGrid.build(canonical, 0.05, span=2)
    tg = time_grid_for(grid, canonical)
    k = density_from_arrivals(ArrivalProfile(tg, np.zeros(tg.n_bins)), grid, canonical)
    assert np.all(k.k == 0)


def test_symmetric_unit_block_gives_double_density(canonical):
    # beta = gamma = 1, g = 1 on [-1, 1]: both branches contribute 1, so k = 2 on [-1, 0]
    grid = PayoffGrid.build(canonical, 0.1, span=2)
    tg = TimeGrid(-2.0, 0.1, 40)
    g = ArrivalProfile(tg, np.where(np.abs(tg.centers) < 1, 1.0, 0.0))
    k = density_from_arrivals(g, grid, canonical)
    inside = grid.centers > -1
    np.testing.assert_allclose(k.k[inside], 2.0, atol=1e-12)
    np.testing.assert_allclose(k.k[~inside], 0.0, atol=1e-12)


def test_equilibrium_arrivals_map_to_stationary_density(arnott):
    s = spue_summary(arnott)
    grid = PayoffGrid.build(arnott, s.L_star / 40, span=2 * s.L_star)
    tg = time_grid_for(grid, arnott)
    k = density_from_arrivals(equilibrium_arrivals(tg, arnott), grid, arnott)
    ref = spue_density(grid, arnott)
    assert np.max(np.abs(k.k - ref.k)) * grid.dx <= s.kappa * grid.dx
    assert k.mass == pytest.approx(arnott.demand_total, rel=1e-12)
    full = ref.k == s.kappa
    np.testing.assert_allclose(k.k[full], s.kappa, rtol=1e-9)


def test_mass_outside_grid_is_reported(canonical):
    grid = PayoffGrid.build(canonical, 0.1, span=0.5)
    tg = TimeGrid(-2.0, 0.1, 40)
    g = ArrivalProfile(tg, np.ones(40))
    with pytest.raises(AliasingError):
        density_from_arrivals(g, grid, canonical)


def test_split_of_full_cells_is_capacity(canonical):
    grid = PayoffGrid.build(canonical, 0.1, span=3)
    k = spue_density(grid, canonical)
    tg = time_grid_for(grid, canonical)
    g = arrivals_from_density(k, canonical, tg)
    used = (tg.centers > -1) & (tg.centers < 1)
    np.testing.assert_allclose(g.rates[used], canonical.capacity, rtol=1e-12)
    np.testing.assert_allclose(g.rates[~used], 0.0, atol=1e-12)


def test_split_of_empty_field(canonical):
    grid = PayoffGrid.build(canonical, 0.1, span=3)
    g = arrivals_from_density(DensityField(grid, np.zeros(grid.n_cells)), canonical, time_grid_for(grid, canonical))
    assert np.all(g.rates == 0)


@pytest.mark.parametrize("which", ["canonical", "arnott"])
def test_split_round_trip(which, request, rng):
    p = request.getfixturevalue(which)
    L = spue_summary(p).L_star
    for aligned in (True, False):
        grid = PayoffGrid.build(p, L / 30, span=3 * L)
        k = random_density(grid, p, 2.5 * L, rng)
        # aligned: a whole number of bins per cell on both sides (gamma / beta = 3.9 for arnott)
        dt = grid.dx / (10 * p.gamma) if aligned else grid.dx / (2.3 * max(p.beta, p.gamma))
        tg = time_grid_for(grid, p, dt)
        g = arrivals_from_density(k, p, tg)
        assert np.all(g.rates <= p.capacity) and g.mass == pytest.approx(k.mass, rel=1e-12)
        back = density_from_arrivals(g, grid, p)
        if aligned:
            np.testing.assert_allclose(back.k, k.k, atol=1e-12 * jam_density(p))
        else:
            # smearing confined to neighbouring cells: cumulative mass within one cell
            cum = np.cumsum(back.k - k.k) * grid.dx
            assert np.max(np.abs(cum)) <= jam_density(p) * grid.dx


def test_split_reproduces_density_at_centers(arnott):
    # k(x) = g(t1)/beta + g(t2)/gamma with g = k C / kappa at each preimage
    kappa = jam_density(arnott)
    k = np.linspace(0, kappa, 7)
    g = k * arnott.capacity / kappa
    np.testing.assert_allclose(g / arnott.beta + g / arnott.gamma, k, rtol=1e-14)


def test_atue_objective_zero(canonical):
    tg = TimeGrid(-1, 0.1, 20)
    assert atue_objective(ArrivalProfile(tg, np.zeros(20)), canonical) == 0


def test_atue_objective_abs_integral(canonical):
    # integral of |t| over [-1, 1] is 1; midpoint rule is exact for bins not straddling 0
    tg = TimeGrid(-1.0, 0.01, 200)
    assert atue_objective(ArrivalProfile(tg, np.ones(200)), canonical) == pytest.approx(1.0, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_objective_identity_bounded(seed):
    rng = np.random.default_rng(seed)
    p = CostParams(alpha=6.4, beta=3.9, gamma=15.21, t_star=9.0, upsilon0=0.5, capacity=1, demand_total=1)
    L = spue_summary(p).L_star
    grid = PayoffGrid.build(p, L / 40, span=3 * L)
    dt = grid.dx / 20.0
    t_lo, t_hi = times_of_payoff(grid.x_min, p)
    tg = TimeGrid.covering(t_lo, t_hi, dt, anchor=p.t_star + 0.4 * dt)
    g = random_arrivals(tg, p, rng, window=(t_lo + dt, t_hi - dt))
    k = density_from_arrivals(g, grid, p)
    assert k.mass == pytest.approx(g.mass, rel=1e-9, abs=1e-12)
    bound = 0.5 * g.mass * (grid.dx + max(p.beta, p.gamma) * dt)
    assert abs(potential(k) - atue_objective(g, p)) <= bound
