"""Estimator-style wrappers around the functional core.

SynchronizationProtocol bundles the design pipeline behind a fit()
facade with get_params/set_params, trailing-underscore fitted
attributes, and a simulate() convenience; GeometricDecayEstimator is a
tiny regressor for geometric decay rates.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from . import rates
from .design import design_protocol
from .exceptions import ArgumentError
from .graph import build_laplacian, spectrum
from .simulate import Trajectory, random_initial_states, run
from .validation import as_matrix_list, as_vector


class SynchronizationProtocol(BaseEstimator):
    """Design a synchronizing coupling for an ensemble of linear agents.

    Parameters
    ----------
    coupling : float, optional
        Override the coupling strength; default picks the optimal point
        of the admissible interval.
    eta : float, optional
        Riccati slack override; default is the midpoint of its range.
    riccati_p : array-like, optional
        User-supplied witness matrix (verified instead of solved).

    Attributes (after fit)
    ----------
    spectrum_ : LaplacianSpectrum of the communication graph
    design_ : ProtocolDesign with coupling, gains, and rate bound
    s_infinity_ : average dynamics matrix
    assumption_report_ : AssumptionReport for the three structural checks
    rate_bound_ : float, certified convergence rate bound
    """

    def __init__(self, coupling=None, eta=None, riccati_p=None):
        self.coupling = coupling
        self.eta = eta
        self.riccati_p = riccati_p

    def fit(self, S, y=None, *, adjacency, b):
        """Run the design pipeline for agents with dynamics S on a graph.

        S is an (N, p, p) array-like of per-agent dynamics matrices,
        adjacency the symmetric weight matrix, b the shared input vector.
        """
        s_arr = as_matrix_list(S, "S")
        self.input_ = as_vector(b, "b")
        self.spectrum_ = spectrum(build_laplacian(adjacency))
        self.design_ = design_protocol(
            s_arr, self.input_, self.spectrum_,
            c=self.coupling, eta=self.eta, p_matrix=self.riccati_p,
        )
        self.s_init_ = s_arr
        self.s_infinity_ = self.design_.s_infinity
        self.assumption_report_ = self.design_.assumptions
        self.coupling_ = self.design_.coupling
        self.rate_bound_ = self.design_.rate_bound
        self.limit_gain_ = self.design_.limit_gain
        self.riccati_p_ = self.design_.riccati_p
        self.p_source_ = self.design_.p_source
        return self

    def simulate(self, xi_init=None, horizon: int = 100, seed: int = 0) -> Trajectory:
        """Simulate the fitted design; random seeded initial states by default."""
        self._check_fitted()
        n, p = self.s_init_.shape[0], self.s_init_.shape[1]
        if xi_init is None:
            xi_init = random_initial_states(n, p, seed)
        return run(self.spectrum_.laplacian, self.s_init_, xi_init,
                   self.input_, self.design_, horizon)

    def _check_fitted(self):
        if not hasattr(self, "design_"):
            raise ArgumentError("estimator is not fitted; call fit() first")


class GeometricDecayEstimator(BaseEstimator):
    """Least-squares fit of value ~ amplitude * rate**t for a positive series.

    X is the 1-D array of time indices (or (n, 1)), y the series values.
    Fitted attributes: rate_, amplitude_, residual_.
    """

    def __init__(self, exclude_floor: float = rates.FLOOR_FRACTION):
        self.exclude_floor = exclude_floor

    def fit(self, X, y):
        t = np.asarray(X, dtype=float)
        if t.ndim == 2 and t.shape[1] == 1:
            t = t.ravel()
        if t.ndim != 1:
            raise ArgumentError(f"X must be 1-D time indices, got shape {t.shape}")
        v = np.asarray(y, dtype=float)
        if v.shape != t.shape:
            raise ArgumentError(f"y shape {v.shape} does not match X shape {t.shape}")
        if not np.any(v > 0):
            raise ArgumentError("y has no positive values to fit")
        floor = self.exclude_floor * v[0] if v[0] > 0 else 0.0
        keep = v > max(floor, 0.0)
        if keep.sum() < 5:
            raise ArgumentError(
                f"{int(keep.sum())} usable points after exclusions, need 5"
            )
        logs = np.log(v[keep])
        slope, intercept = np.polyfit(t[keep], logs, 1)
        fit = slope * t[keep] + intercept
        self.rate_ = float(np.exp(slope))
        self.amplitude_ = float(np.exp(intercept))
        self.residual_ = float(np.sqrt(np.mean((logs - fit) ** 2)))
        self.n_points_ = int(keep.sum())
        return self

    def predict(self, X):
        if not hasattr(self, "rate_"):
            raise ArgumentError("estimator is not fitted; call fit() first")
        t = np.asarray(X, dtype=float)
        if t.ndim == 2 and t.shape[1] == 1:
            t = t.ravel()
        return self.amplitude_ * self.rate_**t
