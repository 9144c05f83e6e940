import numpy as np
import pytest

from spue import (
    CostParams,
    GridError,
    PayoffGrid,
    TimeGrid,
    atue_objective,
    equilibrium_arrivals,
    equilibrium_potential,
    jam_density,
    potential,
    scheduling_cost,
    spue_density,
    spue_summary,
    time_grid_for,
)
from spue.properties import random_params


def test_jam_density_values(canonical, arnott):
    assert jam_density(canonical) == 2.0
    # 1/3.9 + 1/15.21
    assert jam_density(arnott) == pytest.approx(0.322156, abs=5e-7)


def test_jam_density_linear_in_capacity(rng):
    from dataclasses import replace

    for _ in range(20):
        p = random_params(rng)
        assert jam_density(replace(p, capacity=2 * p.capacity)) == pytest.approx(2 * jam_density(p), rel=1e-14)


def test_canonical_summary(canonical):
    s = spue_summary(canonical)
    assert (s.kappa, s.L_star, s.phi_star) == (2.0, 1.0, 1.0)
    assert (s.t_first, s.t_last) == (-1.0, 1.0)


def test_summary_invariants(rng):
    for _ in range(50):
        p = random_params(rng)
        s = spue_summary(p)
        assert s.L_star == pytest.approx(p.demand_total / s.kappa)
        assert s.t_first <= p.t_star <= s.t_last
        assert p.capacity * (s.t_last - s.t_first) == pytest.approx(p.demand_total, rel=1e-9)
        assert s.phi_star == pytest.approx(scheduling_cost(s.t_first, p))
        assert s.phi_star == pytest.approx(scheduling_cost(s.t_last, p))


def test_doubling_demand(arnott):
    from dataclasses import replace

    a, b = spue_summary(arnott), spue_summary(replace(arnott, demand_total=2.0))
    assert b.L_star == pytest.approx(2 * a.L_star)
    assert arnott.capacity * (b.t_last - b.t_first) == pytest.approx(2.0)


def test_aligned_density_is_exact_step(canonical):
    grid = PayoffGrid.build(canonical, 0.1, span=3.0)
    k = spue_density(grid, canonical)
    assert set(np.unique(k.k)) == {0.0, 2.0}
    assert np.all(k.k[grid.centers > -1] == 2.0)
    assert k.mass == pytest.approx(2.0, rel=1e-15)


def test_misaligned_density_has_one_fractional_cell(arnott):
    grid = PayoffGrid.build(arnott, 0.07, span=5.0)
    k = spue_density(grid, arnott)
    kappa = jam_density(arnott)
    frac = (k.k > 0) & (k.k < kappa)
    assert frac.sum() == 1
    assert k.mass == pytest.approx(arnott.demand_total, rel=1e-13)
    # the fractional cell sits at the shock -alpha*upsilon0 - L*
    i = np.flatnonzero(frac)[0]
    lo = arnott.x_max - spue_summary(arnott).L_star
    assert grid.edges[i] <= lo <= grid.edges[i + 1]


def test_density_needs_long_enough_grid(canonical):
    with pytest.raises(GridError):
        spue_density(PayoffGrid.build(canonical, 0.1, span=0.5), canonical)


def test_potential_minimum_against_random_fields(arnott, rng):
    from spue.initial import random_density

    L = spue_summary(arnott).L_star
    grid = PayoffGrid.build(arnott, L / 50, span=4 * L)
    best = potential(spue_density(grid, arnott))
    for _ in range(1000):
        k = random_density(grid, arnott, rng.uniform(1.2, 4.0) * L, rng)
        assert potential(k) > best


def test_equilibrium_arrivals_mass_and_shape(arnott):
    s = spue_summary(arnott)
    tg = TimeGrid.covering(s.t_first - 1, s.t_last + 1, 0.013)
    g = equilibrium_arrivals(tg, arnott)
    assert g.mass == pytest.approx(arnott.demand_total, rel=1e-12)
    inside = (tg.edges[:-1] >= s.t_first) & (tg.edges[1:] <= s.t_last)
    assert np.all(g.rates[inside] == arnott.capacity)
    outside = (tg.edges[1:] <= s.t_first) | (tg.edges[:-1] >= s.t_last)
    assert np.all(g.rates[outside] == 0)


def test_equilibrium_arrivals_need_window(canonical):
    with pytest.raises(GridError):
        equilibrium_arrivals(TimeGrid(-0.5, 0.1, 20), canonical)


@pytest.mark.parametrize("which", ["canonical", "arnott"])
def test_objectives_equal_on_aligned_grids(which, request):
    p = request.getfixturevalue(which)
    L = spue_summary(p).L_star
    grid = PayoffGrid.build(p, L / 100, span=2 * L)
    tg = time_grid_for(grid, p, grid.dx / (10 * p.gamma))
    phi = potential(spue_density(grid, p))
    assert atue_objective(equilibrium_arrivals(tg, p), p) == pytest.approx(phi, rel=1e-12)
    assert phi == pytest.approx(equilibrium_potential(p), rel=1e-12)


def test_equilibrium_is_atue(arnott):
    # g* <= C so no queue forms and total cost equals phi2 everywhere
    s = spue_summary(arnott)
    tg = TimeGrid.covering(s.t_first - 0.5, s.t_last + 0.5, 0.01)
    g = equilibrium_arrivals(tg, arnott)
    cost = scheduling_cost(tg.centers, arnott)
    full = g.rates == arnott.capacity
    assert np.all(cost[full] <= s.phi_star + 1e-12)
    assert np.all(cost[g.rates == 0] > s.phi_star - 1e-12)
    # exact cost at the window ends
    assert scheduling_cost(s.t_first, arnott) == pytest.approx(s.phi_star)


def test_self_consistency_from_density(arnott):
    s = spue_summary(arnott)
    grid = PayoffGrid.build(arnott, s.L_star / 200, span=2 * s.L_star)
    k = spue_density(grid, arnott)
    assert k.mass / s.kappa == pytest.approx(s.L_star, rel=1e-12)
    first = grid.edges[np.flatnonzero(k.k > 0)[0]]
    assert abs(first - (arnott.x_max - s.L_star)) <= grid.dx
