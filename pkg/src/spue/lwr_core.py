"""First-order Godunov integrator for day-to-day LWR dynamics on the payoff axis.

Vehicles travel toward larger payoff (the right wall at ``-alpha*upsilon0``);
both walls carry zero flux so the vehicle count is conserved exactly.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .exceptions import CFLError, ParameterError
from .payoff_transform import DensityField


@dataclass(frozen=True)
class FundamentalDiagram:
    """Triangular ``Q(k) = min(u k, w (kappa - k))``; speeds in $/day."""

    u: float
    w: float
    kappa: float

    def __post_init__(self):
        for name in ("u", "w", "kappa"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, float(value))

    @property
    def kappa_c(self):
        return self.w * self.kappa / (self.u + self.w)

    @property
    def q_max(self):
        return self.u * self.kappa_c

    @property
    def max_speed(self):
        return max(self.u, self.w)

    def _checked(self, k):
        k = np.asarray(k, dtype=float)
        slack = 1e-12 * self.kappa
        if np.any(k < -slack) or np.any(k > self.kappa + slack):
            raise ParameterError(f"density outside [0, {self.kappa}]")
        return np.clip(k, 0.0, self.kappa)


def _scalar(a):
    return a.item() if np.ndim(a) == 0 else a


def flow(k, fd):
    """Day-to-day flux of payoff switching at density ``k``."""
    k = fd._checked(k)
    return _scalar(np.minimum(fd.u * k, fd.w * (fd.kappa - k)))


def demand(k, fd):
    """Sending flow ``Q(min(k, kappa_c))``, non-decreasing in ``k``."""
    k = fd._checked(k)
    return _scalar(fd.u * np.minimum(k, fd.kappa_c))


def supply(k, fd):
    """Receiving flow ``Q(max(k, kappa_c))``, non-increasing in ``k``."""
    k = fd._checked(k)
    return _scalar(fd.w * (fd.kappa - np.maximum(k, fd.kappa_c)))


def interface_flux(k_left, k_right, fd):
    """Godunov flux ``min(demand(k_left), supply(k_right))``."""
    return _scalar(np.minimum(demand(k_left, fd), supply(k_right, fd)))


def godunov_fluxes(k, fd):
    """Fluxes at all ``n + 1`` interfaces, zero at both walls.

    Rounding may push ``k`` a few ulps outside ``[0, kappa]``; values are
    clamped for the flux evaluation only.
    """
    k = np.clip(k, 0.0, fd.kappa)
    d = fd.u * np.minimum(k[:-1], fd.kappa_c)
    s = fd.w * (fd.kappa - np.maximum(k[1:], fd.kappa_c))
    q = np.zeros(k.size + 1)
    q[1:-1] = np.minimum(d, s)
    return q


@dataclass(frozen=True)
class SimState:
    """Density field on day ``day``."""

    day: float
    field: DensityField
    fd: FundamentalDiagram


def max_stable_step(dx, fd, cfl_factor=0.9):
    return cfl_factor * dx / fd.max_speed


def advance(s, dr, cfl_factor=1.0):
    """One explicit update; returns ``(next_state, interface_fluxes)``."""
    dx = s.field.grid.dx
    limit = max_stable_step(dx, s.fd, cfl_factor)
    if not dr > 0:
        raise CFLError(f"day step must be > 0, got {dr!r}")
    if dr > limit * (1 + 1e-12):
        raise CFLError(
            f"day step {dr:.6g} exceeds the CFL limit {limit:.6g} "
            f"(cfl_factor * dx / max(u, w)); reduce dr or refine less"
        )
    q = godunov_fluxes(s.field.k, s.fd)
    k = s.field.k - (dr / dx) * np.diff(q)
    return SimState(s.day + dr, DensityField(s.field.grid, k), s.fd), q


def step(s, dr, cfl_factor=1.0):
    """Advance ``s`` by ``dr`` days."""
    return advance(s, dr, cfl_factor)[0]


@dataclass
class Trajectory:
    """Snapshots kept every ``stride`` steps plus the final state."""

    snapshots: list = field(default_factory=list)
    final: SimState = None
    n_steps: int = 0
    converged: bool = False
    converged_day: float = None

    @property
    def days(self):
        return [s.day for s in self.snapshots]


def run(s0, horizon, dr=None, observers=(), stride=1, cfl_factor=0.9, tol=1e-12, patience=10):
    """Integrate from ``s0`` for ``horizon`` days.

    Observers are called as ``obs(prev, next, fluxes, dr)`` after every step.
    Integration stops early once ``max |k_next - k_prev| <= tol * kappa`` has
    held for ``patience`` consecutive steps; pass ``tol=None`` to disable.
    """
    if horizon < 0:
        raise ParameterError("horizon must be >= 0")
    if stride < 1:
        raise ParameterError("stride must be >= 1")
    if dr is None:
        dr = max_stable_step(s0.field.grid.dx, s0.fd, cfl_factor)
    elif dr > max_stable_step(s0.field.grid.dx, s0.fd, cfl_factor) * (1 + 1e-12):
        raise CFLError(f"day step {dr:.6g} violates the CFL limit for cfl_factor={cfl_factor}")
    traj = Trajectory(snapshots=[s0], final=s0)
    n_total = math.ceil(horizon / dr - 1e-9) if horizon > 0 else 0
    threshold = None if tol is None else tol * s0.fd.kappa
    quiet = 0
    state = s0
    for n in range(1, n_total + 1):
        h = min(dr, s0.day + horizon - state.day) if n == n_total else dr
        nxt, q = advance(state, h, cfl_factor=1.0)
        for obs in observers:
            obs(state, nxt, q, h)
        change = float(np.max(np.abs(nxt.field.k - state.field.k)))
        state = nxt
        traj.n_steps = n
        if n % stride == 0:
            traj.snapshots.append(state)
        if threshold is not None:
            quiet = quiet + 1 if change <= threshold else 0
            if quiet >= patience:
                traj.converged = True
                traj.converged_day = state.day
                break
    if traj.snapshots[-1] is not state:
        traj.snapshots.append(state)
    traj.final = state
    return traj


def is_stationary(k, fd):
    """True iff every interior interface carries zero flux."""
    return not np.any(godunov_fluxes(np.asarray(k, dtype=float), fd) > 0)


def center_of_mass(field):
    return float(np.sum(field.grid.centers * field.k) / np.sum(field.k))
