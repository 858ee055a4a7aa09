"""Coupling and gain design for ensembles of heterogeneous linear agents.

Pipeline: average the agents' dynamics matrices, check the structural
assumptions against the graph spectrum, pick a coupling strength from the
admissible interval, obtain a Riccati witness, and form the feedback
gains plus the closed-loop rate bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ArgumentError, AssumptionError, NumericalError
from .graph import LaplacianSpectrum, is_connected
from .linalg import spectral_radius, stabilizable, unstable_product
from .riccati import RiccatiProblem, solve_modified_riccati, verify_riccati
from .validation import as_matrix_list, as_square_matrix, as_vector, check_symmetric


def average_dynamics(s_list) -> np.ndarray:
    """Entrywise arithmetic mean of the agents' dynamics matrices."""
    return as_matrix_list(s_list, "dynamics list").mean(axis=0)


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of the three structural checks.

    lhs_value is the inverse product of unstable eigenvalue moduli of the
    average dynamics; rhs_value is the graph's spectral gap ratio
    (lambda_N - lambda_2) / (lambda_N + lambda_2).  The gap condition
    holds iff lhs_value > rhs_value.
    """

    stabilizable: bool
    unstable_average: bool
    product_gap: bool
    lhs_value: float
    rhs_value: float

    @property
    def all_hold(self) -> bool:
        return self.stabilizable and self.unstable_average and self.product_gap


def check_assumptions(s_list, b, spec: LaplacianSpectrum) -> AssumptionReport:
    """Evaluate stabilizability, instability of the average, and the gap condition."""
    s_inf = average_dynamics(s_list)
    b = as_vector(b, "input")
    lhs = 1.0 / unstable_product(s_inf)
    lam2, lam_n = spec.lambda2, spec.lambda_max
    rhs = (lam_n - lam2) / (lam_n + lam2)
    return AssumptionReport(
        stabilizable=stabilizable(s_inf, b),
        unstable_average=spectral_radius(s_inf) >= 1.0,
        product_gap=lhs > rhs,
        lhs_value=lhs,
        rhs_value=rhs,
    )


@dataclass(frozen=True)
class CouplingInterval:
    lower: float
    upper: float
    optimal: float

    def contains(self, c: float) -> bool:
        return self.lower < c < self.upper


def coupling_interval(rho_inf: float, lam2: float, lam_n: float) -> CouplingInterval:
    """Admissible couplings ((1 - 1/rho)/lambda_2, (1 + 1/rho)/lambda_N).

    The optimal point 2/(lambda_2 + lambda_N) minimizes the contraction
    factor and always lies inside whenever the interval is nonempty.
    Raises AssumptionError when the interval is empty, which is exactly
    the failure of the spectral-gap condition.
    """
    if not (lam_n >= lam2 > 0):
        raise ArgumentError(f"need lambda_N >= lambda_2 > 0, got {lam2}, {lam_n}")
    if rho_inf < 1.0:
        raise ArgumentError(f"rho_inf must be >= 1, got {rho_inf}")
    lower = (1.0 - 1.0 / rho_inf) / lam2
    upper = (1.0 + 1.0 / rho_inf) / lam_n
    if lower >= upper:
        raise AssumptionError(
            f"empty coupling interval ({lower:.6g}, {upper:.6g}): the spectral "
            "gap condition fails for this graph and average dynamics"
        )
    return CouplingInterval(lower=lower, upper=upper, optimal=2.0 / (lam2 + lam_n))


def contraction_factor(c: float, lam2: float, lam_n: float) -> float:
    """max(|1 - c*lambda_2|, |1 - c*lambda_N|), the averaging decay rate."""
    if not (lam_n >= lam2 > 0):
        raise ArgumentError(f"need lambda_N >= lambda_2 > 0, got {lam2}, {lam_n}")
    return max(abs(1.0 - c * lam2), abs(1.0 - c * lam_n))


def design_gain(s_i, b, p_matrix, lam2: float, lam_n: float) -> np.ndarray:
    """Feedback row K_i = (2/(lambda_2 + lambda_N)) * B'P S_i / (B'P B)."""
    s_i = as_square_matrix(s_i, "dynamics")
    b = as_vector(b, "input")
    p_matrix = check_symmetric(as_square_matrix(p_matrix, "P"), "P")
    bpb = float(b @ p_matrix @ b)
    if bpb <= 0:
        raise ArgumentError(f"B'PB must be positive, got {bpb}")
    return (2.0 / (lam2 + lam_n)) * (b @ p_matrix @ s_i) / bpb


def rate_bound(s_inf, b, k_inf, c: float, spec: LaplacianSpectrum) -> float:
    """Convergence rate bound: the larger of the averaging rate
    spectral_radius(S_inf) * f(c) and the worst closed-loop radius
    spectral_radius(S_inf - lambda_j * B K_inf) over j = 2..N."""
    s_inf = as_square_matrix(s_inf, "dynamics")
    b = as_vector(b, "input")
    k_inf = as_vector(k_inf, "gain")
    f_c = contraction_factor(c, spec.lambda2, spec.lambda_max)
    worst = spectral_radius(s_inf) * f_c
    bk = np.outer(b, k_inf)
    for lam in spec.eigenvalues[1:]:
        worst = max(worst, spectral_radius(s_inf - lam * bk))
    return worst


@dataclass(frozen=True)
class ProtocolDesign:
    """Complete synchronizing design for one ensemble.

    p_source records whether the Riccati witness was produced by the
    solver or supplied by the caller.  In the stable regime (average
    dynamics already contracting) no witness is needed: gains are zero,
    eta and riccati_p are None, and rate_bound is the open-loop radius.
    """

    coupling: float
    interval: CouplingInterval
    contraction: float
    eta: float | None
    riccati_p: np.ndarray | None = field(repr=False)
    p_source: str
    gain_scale: float
    limit_gain: np.ndarray
    rate_bound: float
    stable_case: bool
    assumptions: AssumptionReport
    s_infinity: np.ndarray = field(repr=False)


def design_protocol(s_list, b, spec: LaplacianSpectrum, *, c: float | None = None,
                    eta: float | None = None, p_matrix=None) -> ProtocolDesign:
    """Run the full design pipeline.

    Overrides: c must lie in the admissible interval; eta must lie in
    [spectral gap ratio, inverse unstable product); p_matrix must verify
    against the inequality.  Raises AssumptionError naming the first
    failed structural check.
    """
    s_arr = as_matrix_list(s_list, "dynamics list")
    b = as_vector(b, "input")
    if b.size != s_arr.shape[1]:
        raise ArgumentError(
            f"input vector has length {b.size}, expected {s_arr.shape[1]}"
        )
    if s_arr.shape[0] != spec.n_nodes:
        raise ArgumentError(
            f"{s_arr.shape[0]} dynamics matrices for a {spec.n_nodes}-node graph"
        )
    if not is_connected(spec):
        raise AssumptionError("graph is not connected (lambda_2 is zero)")
    lam2, lam_n = spec.lambda2, spec.lambda_max
    s_inf = s_arr.mean(axis=0)
    report = check_assumptions(s_arr, b, spec)
    rho = spectral_radius(s_inf)

    if not report.unstable_average:
        # contracting average: zero gains and any c in (0, 2/lambda_N) synchronize
        interval = CouplingInterval(lower=0.0, upper=2.0 / lam_n,
                                    optimal=2.0 / (lam2 + lam_n))
        coupling = interval.optimal if c is None else float(c)
        if not interval.contains(coupling):
            raise ArgumentError(
                f"coupling {coupling} outside stable-case interval "
                f"(0, {interval.upper:.6g})"
            )
        return ProtocolDesign(
            coupling=coupling,
            interval=interval,
            contraction=contraction_factor(coupling, lam2, lam_n),
            eta=None,
            riccati_p=None,
            p_source="unused",
            gain_scale=2.0 / (lam2 + lam_n),
            limit_gain=np.zeros(b.size),
            rate_bound=rho,
            stable_case=True,
            assumptions=report,
            s_infinity=s_inf,
        )

    if not report.stabilizable:
        raise AssumptionError("average dynamics is not stabilizable through the input")
    if not report.product_gap:
        raise AssumptionError(
            f"spectral gap condition fails: {report.lhs_value:.6g} is not above "
            f"{report.rhs_value:.6g}"
        )

    interval = coupling_interval(rho, lam2, lam_n)
    coupling = interval.optimal if c is None else float(c)
    if not interval.contains(coupling):
        raise ArgumentError(
            f"coupling {coupling} outside the admissible interval "
            f"({interval.lower:.6g}, {interval.upper:.6g})"
        )
    f_c = contraction_factor(coupling, lam2, lam_n)

    gap = report.rhs_value
    eta_cap = report.lhs_value
    if eta is None:
        eta = 0.5 * (contraction_factor(interval.optimal, lam2, lam_n) + eta_cap)
    eta = float(eta)
    if not (gap <= eta < eta_cap):
        raise ArgumentError(
            f"eta={eta} outside the admissible range [{gap:.6g}, {eta_cap:.6g})"
        )

    prob = RiccatiProblem(dynamics=s_inf, input=b, eta=eta)
    if p_matrix is not None:
        p_matrix = np.asarray(p_matrix, dtype=float)
        passed, residual = verify_riccati(p_matrix, prob)
        if not passed:
            raise ArgumentError(
                f"supplied P fails verification (residual min eigenvalue "
                f"{residual:.6g})"
            )
        p_source = "supplied"
    else:
        witness = solve_modified_riccati(prob)
        p_matrix = witness.p_matrix
        p_source = "solved"

    k_inf = design_gain(s_inf, b, p_matrix, lam2, lam_n)
    r_star = rate_bound(s_inf, b, k_inf, coupling, spec)
    if not r_star < 1.0:
        raise NumericalError(
            f"rate bound {r_star:.6g} is not below 1 despite a verified design"
        )
    return ProtocolDesign(
        coupling=coupling,
        interval=interval,
        contraction=f_c,
        eta=eta,
        riccati_p=p_matrix,
        p_source=p_source,
        gain_scale=2.0 / (lam2 + lam_n),
        limit_gain=k_inf,
        rate_bound=r_star,
        stable_case=False,
        assumptions=report,
        s_infinity=s_inf,
    )
