"""scikit-learn compatible wrappers.

``PayoffDensityTransformer`` maps rows of arrival rates (one row per day
or scenario, one column per time bin) to rows of imaginary density and
back. ``DayToDayEquilibrium`` evolves rows of initial densities with the
LWR dynamics and exposes the equilibrium it reaches.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .cost_model import CostParams
from .equilibrium import spue_density, spue_summary
from .initial import uniform_density
from .lwr_core import FundamentalDiagram, SimState, run
from .lyapunov import LyapunovMonitor, potential
from .payoff_transform import (
    DensityField,
    PayoffGrid,
    arrivals_from_density,
    density_from_arrivals,
    time_grid_for,
)
from .point_queue import ArrivalProfile


class _CostParamsMixin:
    """Shared cost hyper-parameters; ``alpha`` ... ``demand_total`` as in CostParams."""

    def _cost_params(self):
        return CostParams(
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            t_star=self.t_star,
            upsilon0=self.upsilon0,
            capacity=self.capacity,
            demand_total=self.demand_total,
        )

    def _payoff_grid(self, p):
        L = spue_summary(p).L_star
        dx = self.dx if self.dx is not None else L / 100.0
        span = self.span if self.span is not None else 4.0 * L
        return PayoffGrid.build(p, dx, span=span)


class PayoffDensityTransformer(_CostParamsMixin, TransformerMixin, BaseEstimator):
    """Arrival-rate rows -> density rows over the payoff grid.

    Parameters
    ----------
    dx, span : float, optional
        Payoff cell width and grid length; default ``L*/100`` and ``4 L*``.
    dt : float, optional
        Time bin width; default ``dx / max(beta, gamma)``.

    Attributes
    ----------
    params_ : CostParams
    grid_ : PayoffGrid
    time_grid_ : TimeGrid
        The time bins expected as input columns.
    """

    def __init__(self, alpha=2.0, beta=1.0, gamma=1.0, t_star=0.0, upsilon0=0.0,
                 capacity=1.0, demand_total=1.0, dx=None, span=None, dt=None):
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.t_star = t_star
        self.upsilon0 = upsilon0
        self.capacity = capacity
        self.demand_total = demand_total
        self.dx = dx
        self.span = span
        self.dt = dt

    def fit(self, X=None, y=None):
        self.params_ = self._cost_params()
        self.grid_ = self._payoff_grid(self.params_)
        self.time_grid_ = time_grid_for(self.grid_, self.params_, self.dt)
        self.n_features_in_ = self.time_grid_.n_bins
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.time_grid_.n_bins:
            raise ValueError(f"expected {self.time_grid_.n_bins} time bins, got {X.shape[1]}")
        return np.vstack([
            density_from_arrivals(ArrivalProfile(self.time_grid_, row), self.grid_, self.params_).k
            for row in X
        ])

    def inverse_transform(self, X):
        """Density rows -> arrival rows via the symmetric split."""
        check_is_fitted(self, "grid_")
        X = check_array(X, dtype=float)
        return np.vstack([
            arrivals_from_density(DensityField(self.grid_, row), self.params_, self.time_grid_).rates
            for row in X
        ])

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "grid_")
        return np.array([f"x{i}" for i in range(self.grid_.n_cells)], dtype=object)


class DayToDayEquilibrium(_CostParamsMixin, TransformerMixin, BaseEstimator):
    """Evolve initial densities toward the scheduling-payoff equilibrium.

    ``fit(X)`` runs the dynamics from the first row of ``X`` (a uniform
    density over ``3 L*`` when ``X`` is None) and stores the result;
    ``transform(X)`` returns the density reached from every row.

    Attributes
    ----------
    equilibrium_ : ndarray
        Analytic stationary density on ``grid_``.
    density_ : ndarray
        State reached by ``fit``.
    potential_history_ : ndarray
        Potential after every step of the fitted run.
    converged_ : bool
    """

    def __init__(self, alpha=2.0, beta=1.0, gamma=1.0, t_star=0.0, upsilon0=0.0,
                 capacity=1.0, demand_total=1.0, u=1.0, w=1.0, dx=None, span=None,
                 days=40.0, cfl_factor=0.9, tol=1e-12):
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.t_star = t_star
        self.upsilon0 = upsilon0
        self.capacity = capacity
        self.demand_total = demand_total
        self.u = u
        self.w = w
        self.dx = dx
        self.span = span
        self.days = days
        self.cfl_factor = cfl_factor
        self.tol = tol

    def _setup(self):
        self.params_ = self._cost_params()
        self.grid_ = self._payoff_grid(self.params_)
        s = spue_summary(self.params_)
        self.fd_ = FundamentalDiagram(self.u, self.w, s.kappa)
        self.equilibrium_ = spue_density(self.grid_, self.params_).k
        self.n_features_in_ = self.grid_.n_cells

    def _evolve(self, row, monitor=None):
        k0 = DensityField(self.grid_, row).check_feasible(self.fd_.kappa)
        observers = [monitor] if monitor is not None else []
        return run(SimState(0.0, k0, self.fd_), self.days, observers=observers,
                   cfl_factor=self.cfl_factor, tol=self.tol, stride=10**9)

    def fit(self, X=None, y=None):
        self._setup()
        if X is None:
            row = uniform_density(self.grid_, self.params_, 3 * spue_summary(self.params_).L_star).k
        else:
            row = self._check(X)[0]
        monitor = LyapunovMonitor(strict=True)
        traj = self._evolve(row, monitor)
        self.density_ = traj.final.field.k.copy()
        self.potential_history_ = np.array([potential(DensityField(self.grid_, row))] + [r.phi for r in monitor.records])
        self.converged_ = traj.converged
        self.n_days_ = traj.final.day
        return self

    def _check(self, X):
        X = check_array(X, dtype=float)
        if X.shape[1] != self.grid_.n_cells:
            raise ValueError(f"expected {self.grid_.n_cells} payoff cells, got {X.shape[1]}")
        return X

    def transform(self, X):
        check_is_fitted(self, "density_")
        return np.vstack([self._evolve(row).final.field.k for row in self._check(X)])

    def score(self, X, y=None):
        """Negative mean potential gap of the states reached from ``X``."""
        check_is_fitted(self, "density_")
        phi_star = potential(DensityField(self.grid_, self.equilibrium_))
        finals = self.transform(X)
        return -float(np.mean([potential(DensityField(self.grid_, k)) - phi_star for k in finals]))
