"""Day-to-day departure-time dynamics at a single bottleneck.

The arrival-time choice problem is recast as an LWR conservation law on
the scheduling-payoff axis; its stationary state is the user equilibrium
and the potential ``-integral x k dx`` decreases along every trajectory.
"""

from .cost_model import CostParams, scheduling_cost, total_cost
from .equilibrium import (
    EquilibriumSummary,
    equilibrium_arrivals,
    equilibrium_potential,
    jam_density,
    spue_density,
    spue_summary,
)
from .exceptions import (
    AliasingError,
    CFLError,
    DescentViolation,
    EquilibriumExistenceError,
    GridError,
    InfeasibleError,
    ParameterError,
    SpueError,
)
from .lp_oracle import LpSolution, cross_check, solve_atue_lp, solve_spue_lp
from .lwr_core import (
    FundamentalDiagram,
    SimState,
    demand,
    flow,
    interface_flux,
    run,
    step,
    supply,
)
from .lyapunov import DescentRecord, LyapunovMonitor, descent_report, observe, potential
from .payoff_transform import (
    DensityField,
    PayoffGrid,
    arrivals_from_density,
    atue_objective,
    density_from_arrivals,
    time_grid_for,
    times_of_payoff,
)
from .point_queue import (
    ArrivalProfile,
    DepartureProfile,
    QueueTrace,
    TimeGrid,
    propagate,
    shift_departures,
    vacancy_property_check,
)

__version__ = "0.1.0"
