import numpy as np
import pytest

from spue import (
    CostParams,
    DensityField,
    DescentViolation,
    FundamentalDiagram,
    LyapunovMonitor,
    PayoffGrid,
    SimState,
    descent_report,
    observe,
    potential,
    run,
    spue_density,
)
from spue.initial import random_density, uniform_density
from spue.lwr_core import advance


def block(p, lo, hi, value, dx=0.01, span=3.0):
    grid = PayoffGrid.build(p, dx, span=span)
    c = grid.centers
    return DensityField(grid, np.where((c > lo) & (c < hi), value, 0.0))


def test_potential_of_empty_field(canonical):
    assert potential(DensityField(PayoffGrid.build(canonical, 0.1, span=1.0), np.zeros(10))) == 0.0


def test_potential_hand_values(canonical):
    # -int_{-1}^{0} 2x dx = 1;  -int_{-2}^{-1} 2x dx = 3
    assert potential(block(canonical, -1, 0, 2.0)) == pytest.approx(1.0, rel=1e-12)
    assert potential(block(canonical, -2, -1, 2.0)) == pytest.approx(3.0, rel=1e-12)


def test_observe_at_equilibrium(canonical, fd_canonical):
    k = spue_density(PayoffGrid.build(canonical, 0.05, span=4), canonical)
    s = SimState(0.0, k, fd_canonical)
    nxt, q = advance(s, 0.045)
    rec = observe(s, nxt, q, 0.045)
    assert rec.phi_discrete_rate == 0.0 and rec.flux_integral == 0.0
    assert rec.ok


def test_strict_descent_off_equilibrium(canonical, fd_canonical, rng):
    grid = PayoffGrid.build(canonical, 0.05, span=4)
    for _ in range(20):
        s = SimState(0.0, random_density(grid, canonical, 3.0, rng), fd_canonical)
        nxt, q = advance(s, 0.045)
        assert q.max() > 0
        rec = observe(s, nxt, q, 0.045)
        assert rec.phi_discrete_rate < 0 and rec.ok


def test_long_random_trajectory(canonical, fd_canonical, rng):
    grid = PayoffGrid.build(canonical, 0.02, span=4)
    mon = LyapunovMonitor(strict=True)
    run(SimState(0.0, random_density(grid, canonical, 3.5, rng), fd_canonical), 1e4 * 0.018, observers=[mon], tol=None)
    assert len(mon.records) == 10000 and mon.passed
    assert all(r.descent_ok() and r.identity_ok() for r in mon.records)


def test_summation_by_parts_identity(arnott, rng):
    from spue import jam_density

    fd = FundamentalDiagram(0.7, 2.3, jam_density(arnott))
    grid = PayoffGrid.build(arnott, 0.05, span=12)
    s = SimState(0.0, random_density(grid, arnott, 10.0, rng), fd)
    for _ in range(50):
        nxt, q = advance(s, 0.9 * grid.dx / fd.max_speed)
        dphi = potential(nxt.field) - potential(s.field)
        assert dphi == pytest.approx(-(nxt.day - s.day) * q.sum() * grid.dx, rel=1e-9, abs=1e-14)
        s = nxt


def test_strict_monitor_raises_with_states(canonical, fd_canonical):
    grid = PayoffGrid.build(canonical, 0.05, span=4)
    a = SimState(0.0, spue_density(grid, canonical), fd_canonical)
    k = a.field.k.copy()
    k[-1], k[0] = 0.0, 2.0  # move a full cell to the far end
    b = SimState(0.045, DensityField(grid, k), fd_canonical)
    mon = LyapunovMonitor(strict=True)
    with pytest.raises(DescentViolation) as err:
        mon(a, b, np.zeros(grid.n_cells + 1), 0.045)
    assert err.value.prev is a and err.value.next is b and err.value.day == 0.045
    lax = LyapunovMonitor(strict=False)
    lax(a, b, np.zeros(grid.n_cells + 1), 0.045)
    assert not lax.passed


def test_report_on_equilibrium(canonical, fd_canonical):
    k = spue_density(PayoffGrid.build(canonical, 0.05, span=4), canonical)
    rep = descent_report([SimState(0.0, k, fd_canonical)], potential(k))
    assert rep.monotone and rep.final_gap == 0.0 and rep.first_day_within_tol == 0.0


def test_report_uniform_start_converges(canonical, fd_canonical):
    grid = PayoffGrid.build(canonical, 0.02, span=4)
    k0 = uniform_density(grid, canonical, 3.0)
    mon = LyapunovMonitor()
    traj = run(SimState(0.0, k0, fd_canonical), 20.0, observers=[mon], stride=10)
    phi_star = potential(spue_density(grid, canonical))
    rep = descent_report(traj.snapshots, phi_star, records=mon.records)
    assert rep.monotone
    assert rep.final_gap < 1e-6 * phi_star
    assert rep.first_day_within_tol is not None


def test_report_flags_ascending_trajectory(canonical, fd_canonical):
    grid = PayoffGrid.build(canonical, 0.02, span=4)
    traj = run(SimState(0.0, uniform_density(grid, canonical, 3.0), fd_canonical), 2.0, stride=5)
    rep = descent_report(traj.snapshots[::-1], potential(spue_density(grid, canonical)))
    assert not rep.monotone and rep.failures


def test_report_rejects_empty():
    with pytest.raises(ValueError):
        descent_report([], 0.0)
