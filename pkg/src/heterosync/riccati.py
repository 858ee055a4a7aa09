"""Modified discrete Riccati inequality: witness search and verification.

The inequality asks for a symmetric positive-definite P with

    P - S'PS + (1 - eta^2) * S'PB B'PS / (B'PB)  positive definite.

Feasibility for some eta in [0, 1) requires (S, B) stabilizable, and the
admissible eta are capped by the inverse product of the unstable
eigenvalue moduli of S.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ArgumentError, AssumptionError, ConvergenceError, NumericalError
from .linalg import operator_norm, unstable_product
from .validation import as_square_matrix, as_vector, check_probability_range, check_symmetric


@dataclass(frozen=True)
class RiccatiProblem:
    """Problem data: dynamics S (p x p), input column B (length p), slack eta in [0, 1)."""

    dynamics: np.ndarray = field(repr=False)
    input: np.ndarray = field(repr=False)
    eta: float

    def __post_init__(self):
        s = as_square_matrix(self.dynamics, "dynamics")
        b = as_vector(self.input, "input")
        if b.size != s.shape[0]:
            raise ArgumentError(
                f"input vector has length {b.size}, expected {s.shape[0]}"
            )
        eta = check_probability_range(self.eta, "eta")
        object.__setattr__(self, "dynamics", s)
        object.__setattr__(self, "input", b)
        object.__setattr__(self, "eta", eta)

    @property
    def order(self) -> int:
        return self.dynamics.shape[0]

    def eta_bound(self) -> float:
        """Supremum of admissible eta: inverse unstable eigenvalue product."""
        return 1.0 / unstable_product(self.dynamics)


@dataclass(frozen=True)
class RiccatiWitness:
    p_matrix: np.ndarray = field(repr=False)
    residual_min_eig: float
    iterations: int


def riccati_lhs(p_matrix, s, b, eta: float) -> np.ndarray:
    """Left-hand side P - S'PS + (1 - eta^2) S'PB B'PS / (B'PB), symmetrized."""
    p_matrix = check_symmetric(as_square_matrix(p_matrix, "P"), "P")
    s = as_square_matrix(s, "dynamics")
    b = as_vector(b, "input")
    pb = p_matrix @ b
    bpb = float(b @ pb)
    if bpb <= 0:
        raise ArgumentError(f"B'PB must be positive, got {bpb}")
    v = s.T @ pb
    lhs = p_matrix - s.T @ p_matrix @ s + (1.0 - eta**2) * np.outer(v, v) / bpb
    return 0.5 * (lhs + lhs.T)


def verify_riccati(p_matrix, prob: RiccatiProblem, tol: float = 1e-9):
    """Check whether P witnesses the inequality for the given problem.

    Returns (passed, residual_min_eig).  Passing requires P positive
    definite and the left side's smallest eigenvalue above tol * trace(P),
    a scale-relative strictness floor.
    """
    p_matrix = np.asarray(p_matrix, dtype=float)
    try:
        p_matrix = check_symmetric(as_square_matrix(p_matrix, "P"), "P")
    except ArgumentError:
        return False, float("-inf")
    p_eigs = np.linalg.eigvalsh(p_matrix)
    if p_eigs[0] <= 0:
        return False, float("-inf")
    try:
        lhs = riccati_lhs(p_matrix, prob.dynamics, prob.input, prob.eta)
    except ArgumentError:
        return False, float("-inf")
    residual_min_eig = float(np.linalg.eigvalsh(lhs)[0])
    passed = residual_min_eig > tol * float(np.trace(p_matrix))
    return passed, residual_min_eig


def solve_modified_riccati(prob: RiccatiProblem, tol: float = 1e-10,
                           max_iter: int = 10000) -> RiccatiWitness:
    """Find a witness P by fixed-point iteration on the shifted difference map

        P_{k+1} = S'P_k S - (1 - eta^2) S'P_k B B'P_k S / (B'P_k B) + shift*I

    starting at the identity.  A fixed point satisfies the inequality with
    residual exactly shift*I, so the fixed point is a witness by
    construction; the returned P is still validated independently.
    """
    if not isinstance(prob, RiccatiProblem):
        raise ArgumentError("prob must be a RiccatiProblem")
    bound = prob.eta_bound()
    if prob.eta >= bound:
        raise AssumptionError(
            f"eta={prob.eta} is not below the inverse unstable product {bound:.6g}; "
            "the inequality has no positive-definite witness"
        )
    s = prob.dynamics
    b = prob.input
    p = s.shape[0]
    coef = 1.0 - prob.eta**2
    # shift keeps every iterate positive definite; floor covers S = 0
    shift = max(1e-2 * operator_norm(s) ** 2, 1e-10)
    current = np.eye(p)
    for k in range(1, max_iter + 1):
        pb = current @ b
        bpb = float(b @ pb)
        if bpb <= 0:
            raise NumericalError(f"B'PB became nonpositive at iteration {k}")
        v = s.T @ pb
        nxt = s.T @ current @ s - coef * np.outer(v, v) / bpb + shift * np.eye(p)
        nxt = 0.5 * (nxt + nxt.T)
        # max-abs norms: Frobenius squares entries and can overflow to inf
        # on divergent iterates, turning the test into inf <= inf
        step = float(np.abs(nxt - current).max())
        current = nxt
        size = float(np.abs(current).max())
        if not np.isfinite(size):
            raise ConvergenceError(f"iterates diverged at iteration {k}")
        if step <= tol * size:
            passed, residual = verify_riccati(current, prob)
            if not passed:
                raise NumericalError(
                    f"fixed point reached at iteration {k} but verification "
                    f"failed with residual min eigenvalue {residual:.6g}"
                )
            return RiccatiWitness(p_matrix=current, residual_min_eig=residual,
                                  iterations=k)
    raise ConvergenceError(
        f"no fixed point within {max_iter} iterations; last step size {step:.6g}"
    )
