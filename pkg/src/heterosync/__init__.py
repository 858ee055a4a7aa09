"""Synchronization design and certification for discrete-time
heterogeneous multiagent ensembles with coupled dynamics drift.

The functional core lives in graph / linalg / riccati / design /
simulate / decoupling / rates; estimators wraps the design-and-simulate
pipeline in a scikit-learn style interface.
"""

from .decoupling import (DecayCertificate, DecomposedSystem, check_decay,
                         decouple_suite, decoupled_from_run,
                         hypothesis_violating_instance,
                         perturbed_power_ratio, random_decoupling_instance,
                         recurrence_decay_bounded, simulate_decomposed)
from .design import (AssumptionReport, CouplingInterval, ProtocolDesign,
                     average_dynamics, check_assumptions, contraction_factor,
                     coupling_interval, design_gain, design_protocol,
                     rate_bound)
from .estimators import GeometricDecayEstimator, SynchronizationProtocol
from .exceptions import (ArgumentError, AssumptionError, ConvergenceError,
                         HeterosyncError, NumericalError)
from .graph import (LaplacianSpectrum, WeightedGraph, build_laplacian,
                    is_connected, spectrum)
from .linalg import (ShrinkSimilarity, operator_norm, shrink_similarity,
                     spectral_radius, stabilizable, unstable_product)
from .rates import RateEstimate, estimate_rate, ratio_series, tail_monotone
from .riccati import (RiccatiProblem, RiccatiWitness, riccati_lhs,
                      solve_modified_riccati, verify_riccati)
from .simulate import (DisagreementTransform, Trajectory,
                       closed_loop_residual, random_initial_states, run,
                       step_dynamics, step_states)

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "AssumptionError",
    "AssumptionReport",
    "ConvergenceError",
    "CouplingInterval",
    "DecayCertificate",
    "DecomposedSystem",
    "DisagreementTransform",
    "GeometricDecayEstimator",
    "HeterosyncError",
    "LaplacianSpectrum",
    "NumericalError",
    "ProtocolDesign",
    "RateEstimate",
    "RiccatiProblem",
    "RiccatiWitness",
    "ShrinkSimilarity",
    "SynchronizationProtocol",
    "Trajectory",
    "WeightedGraph",
    "average_dynamics",
    "build_laplacian",
    "check_assumptions",
    "check_decay",
    "closed_loop_residual",
    "contraction_factor",
    "coupling_interval",
    "decouple_suite",
    "decoupled_from_run",
    "design_gain",
    "design_protocol",
    "estimate_rate",
    "hypothesis_violating_instance",
    "is_connected",
    "operator_norm",
    "perturbed_power_ratio",
    "random_decoupling_instance",
    "random_initial_states",
    "rate_bound",
    "ratio_series",
    "recurrence_decay_bounded",
    "riccati_lhs",
    "run",
    "shrink_similarity",
    "simulate_decomposed",
    "solve_modified_riccati",
    "spectral_radius",
    "spectrum",
    "stabilizable",
    "step_dynamics",
    "step_states",
    "tail_monotone",
    "unstable_product",
    "verify_riccati",
]
