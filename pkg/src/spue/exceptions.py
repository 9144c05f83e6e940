"""Exception hierarchy shared by all modules."""


class SpueError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(SpueError, ValueError):
    """A constructor or function argument is outside its valid range."""


class EquilibriumExistenceError(ParameterError):
    """beta >= alpha: no departure-time equilibrium exists."""


class GridError(SpueError, ValueError):
    """A grid is too short / too coarse for the requested operation."""


class AliasingError(GridError):
    """Mass was lost while transferring between the time and payoff axes."""


class CFLError(SpueError, ValueError):
    """The day step violates the CFL bound of the explicit scheme."""


class InfeasibleError(SpueError):
    """A linear program has no feasible point on the given grid."""


class DescentViolation(SpueError):
    """The potential increased (or its discrete identity broke) along a trajectory.

    The offending pre- and post-step states are attached so callers can dump them.
    """

    def __init__(self, message, day, prev=None, next=None, record=None):
        super().__init__(message)
        self.day = day
        self.prev = prev
        self.next = next
        self.record = record
