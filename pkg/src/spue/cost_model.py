"""Cost constants and scalar cost functions of the arrival time.

Units used everywhere in the package: hours for clock time, "$" for money,
veh/hr for arrival/departure flow, veh/$ for imaginary density and days for
the day index r.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import EquilibriumExistenceError, ParameterError


@dataclass(frozen=True)
class CostParams:
    """Behavioural and physical constants of the single-bottleneck problem.

    Attributes
    ----------
    alpha : float
        Value of travel time ($/hr).
    beta : float
        Earliness penalty rate ($/hr). Must satisfy ``beta < alpha``.
    gamma : float
        Lateness penalty rate ($/hr).
    t_star : float
        Ideal arrival time (clock hour).
    upsilon0 : float
        Free-flow travel time (hr).
    capacity : float
        Bottleneck service rate C (veh/hr).
    demand_total : float
        Number of commuters N (veh).
    """

    alpha: float
    beta: float
    gamma: float
    t_star: float
    upsilon0: float
    capacity: float
    demand_total: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "t_star", "upsilon0", "capacity", "demand_total"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in ("alpha", "beta", "gamma", "capacity", "demand_total"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if self.upsilon0 < 0:
            raise ParameterError(f"upsilon0 must be >= 0, got {self.upsilon0!r}")
        if self.beta >= self.alpha:
            raise EquilibriumExistenceError(
                f"beta ({self.beta}) must be smaller than alpha ({self.alpha}); "
                "no departure-time equilibrium exists otherwise"
            )

    @property
    def free_flow_cost(self):
        """alpha * upsilon0, the cost floor reached at t = t_star."""
        return self.alpha * self.upsilon0

    @property
    def x_max(self):
        """Right wall of the payoff axis, -alpha * upsilon0."""
        return -self.free_flow_cost


def scheduling_cost(t, p):
    """Generalized scheduling cost: free-flow travel cost plus schedule delay.

    Vectorized over ``t``; returns a float for scalar input.
    """
    t = np.asarray(t, dtype=float)
    early = np.maximum(p.t_star - t, 0.0)
    late = np.maximum(t - p.t_star, 0.0)
    out = p.free_flow_cost + p.beta * early + p.gamma * late
    return out.item() if out.ndim == 0 else out


def total_cost(t, queue_time, p):
    """Total cost of arriving at ``t`` after queueing ``queue_time`` hours."""
    q = np.asarray(queue_time, dtype=float)
    if np.any(q < 0):
        raise ParameterError("queue_time must be non-negative")
    out = np.asarray(scheduling_cost(t, p)) + p.alpha * q
    return out.item() if out.ndim == 0 else out
