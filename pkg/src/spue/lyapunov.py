"""Potential functional and per-step descent certification."""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DescentViolation


def potential(field):
    """``-sum x_center * k * dx`` over the grid (veh$)."""
    return float(-np.sum(field.grid.centers * field.k) * field.grid.dx)


@dataclass(frozen=True)
class DescentRecord:
    day: float
    phi: float
    flux_integral: float
    phi_discrete_rate: float

    def descent_ok(self, slack=1e-12):
        return self.phi_discrete_rate <= slack * abs(self.phi) + slack

    def identity_ok(self, rtol=1e-10):
        return abs(self.phi_discrete_rate + self.flux_integral) <= rtol * (1 + abs(self.flux_integral))

    @property
    def ok(self):
        return self.descent_ok() and self.identity_ok()


def observe(prev, next, fluxes, dr):
    """Descent record for one step; does not raise.

    The potential change is evaluated from the two states alone, as
    ``-sum x (k_next - k_prev) dx``, so it is independent of ``fluxes``.
    """
    grid = next.field.grid
    dphi = float(-np.sum(grid.centers * (next.field.k - prev.field.k)) * grid.dx)
    return DescentRecord(
        day=next.day,
        phi=potential(next.field),
        flux_integral=float(np.sum(fluxes) * grid.dx),
        phi_discrete_rate=dphi / dr,
    )


class LyapunovMonitor:
    """Observer for ``lwr_core.run`` collecting DescentRecords.

    With ``strict=True`` the first failing record raises DescentViolation
    carrying the offending states.
    """

    def __init__(self, strict=True, descent_slack=1e-12, identity_rtol=1e-10):
        self.strict = strict
        self.descent_slack = descent_slack
        self.identity_rtol = identity_rtol
        self.records = []
        self.failures = []

    def __call__(self, prev, next, fluxes, dr):
        rec = observe(prev, next, fluxes, dr)
        self.records.append(rec)
        problems = []
        if not rec.descent_ok(self.descent_slack):
            problems.append(f"potential rose at rate {rec.phi_discrete_rate:.3e}")
        if not rec.identity_ok(self.identity_rtol):
            problems.append(
                f"rate {rec.phi_discrete_rate:.17g} != -flux integral {-rec.flux_integral:.17g}"
            )
        if problems:
            self.failures.append(rec)
            if self.strict:
                raise DescentViolation(
                    f"day {rec.day:.9g}: " + "; ".join(problems), rec.day, prev, next, rec
                )
        return rec

    @property
    def passed(self):
        return not self.failures


@dataclass
class DescentReport:
    monotone: bool
    final_gap: float
    first_day_within_tol: float
    n_states: int
    failures: list = field(default_factory=list)


def descent_report(states, phi_min, records=None, rtol=1e-6, slack=1e-12):
    """Summarize a trajectory of SimStates (or DensityFields).

    ``monotone`` is true iff the potential never rises between consecutive
    states beyond rounding slack and every given record passes.
    ``first_day_within_tol`` is the first day with
    ``phi - phi_min <= rtol * |phi_min|`` (None if never reached).
    """
    if not states:
        raise ValueError("trajectory is empty")
    days, phis = [], []
    for i, s in enumerate(states):
        f = getattr(s, "field", s)
        days.append(getattr(s, "day", float(i)))
        phis.append(potential(f))
    phis = np.array(phis)
    rises = np.diff(phis) > slack * np.abs(phis[1:]) + slack
    failures = [days[i + 1] for i in np.flatnonzero(rises)]
    if records is not None:
        failures.extend(r.day for r in records if not r.ok)
    gap = phis - phi_min
    within = np.flatnonzero(gap <= rtol * abs(phi_min))
    return DescentReport(
        monotone=not failures,
        final_gap=float(gap[-1]),
        first_day_within_tol=days[within[0]] if within.size else None,
        n_states=len(states),
        failures=failures,
    )
