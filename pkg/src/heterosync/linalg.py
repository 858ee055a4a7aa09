"""Dense spectral utilities: radius, operator norm, unstable product,
norm-shrinking similarity, and a PBH stabilizability test."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .exceptions import ArgumentError, ConvergenceError
from .validation import as_square_matrix, as_vector

# Eigenvalues with modulus >= 1 - UNIT_MODULUS_TOL count as unstable.
# The boundary case |lambda| = 1 is included by convention; values within
# float noise of the unit circle are threshold-sensitive.
UNIT_MODULUS_TOL = 1e-12


def spectral_radius(a) -> float:
    """Maximum eigenvalue modulus of a square matrix."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ArgumentError(f"spectral_radius needs a square matrix, got {a.shape}")
    if a.shape[0] == 0:
        return 0.0
    return float(np.abs(np.linalg.eigvals(a)).max())


def operator_norm(a) -> float:
    """Largest singular value (induced 2-norm). Rectangular input accepted."""
    a = np.asarray(a, dtype=complex if np.iscomplexobj(a) else float)
    if a.ndim != 2:
        raise ArgumentError(f"operator_norm needs a 2-D array, got {a.shape}")
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def unstable_product(a) -> float:
    """Product of |lambda| over eigenvalues with modulus >= 1 (empty product = 1)."""
    a = as_square_matrix(a, "matrix")
    moduli = np.abs(np.linalg.eigvals(a))
    selected = moduli[moduli >= 1.0 - UNIT_MODULUS_TOL]
    return float(np.prod(selected)) if selected.size else 1.0


def stabilizable(s, b, rank_tol: float = 1e-8) -> bool:
    """PBH test: rank [lambda*I - S | B] is full for every unstable eigenvalue.

    Only eigenvalues with |lambda| >= 1 - 1e-12 are tested, since stable
    modes never obstruct stabilizability in discrete time.  Rank uses a
    singular-value threshold relative to the pencil's largest singular value.
    """
    s = as_square_matrix(s, "dynamics")
    b = as_vector(b, "input")
    p = s.shape[0]
    if b.size != p:
        raise ArgumentError(f"input vector has length {b.size}, expected {p}")
    eigenvalues = np.linalg.eigvals(s)
    for lam in eigenvalues:
        if abs(lam) < 1.0 - UNIT_MODULUS_TOL:
            continue
        pencil = np.hstack([lam * np.eye(p) - s, b.reshape(-1, 1)])
        sv = np.linalg.svd(pencil, compute_uv=False)
        if sv[-1] <= rank_tol * sv[0]:
            return False
    return True


@dataclass(frozen=True)
class ShrinkSimilarity:
    """Similarity transform Q with ||inv(Q) A Q|| < spectral_radius(A) + eps.

    Q factors as (unitary) * (diagonal powers of two), so the inverse and
    the transformed matrix are evaluated from the factors rather than by
    explicit inversion; the diagonal scaling is then exact in floating
    point even when Q is very ill conditioned.
    """

    transform: np.ndarray = field(repr=False)
    inverse_transform: np.ndarray = field(repr=False)
    transformed: np.ndarray = field(repr=False)
    transformed_norm: float
    spectral_radius: float
    target: float


def shrink_similarity(a, eps: float, cond_cap: float = 1e30) -> ShrinkSimilarity:
    """Construct Q with ||inv(Q) A Q|| strictly below spectral_radius(A) + eps.

    Uses the complex Schur form A = U T U^H followed by geometric diagonal
    scaling D = diag(1, delta, delta^2, ...) that shrinks the strictly
    upper triangle; delta is halved until the scaled norm clears the
    target.  Termination is guaranteed for eps > 0 because the scaled
    off-diagonal part vanishes as delta -> 0.

    Parameters
    ----------
    a : square matrix
    eps : float
        Strictly positive norm margin above the spectral radius.
    cond_cap : float
        Upper bound on the diagonal conditioning delta**-(n-1).  Hitting
        it means eps is too aggressive for double precision.
    """
    a = as_square_matrix(a, "matrix")
    if eps <= 0:
        raise ArgumentError(f"eps must be positive, got {eps}")
    n = a.shape[0]
    rho = spectral_radius(a)
    target = rho + eps
    t, u = scipy.linalg.schur(a.astype(complex), output="complex")
    k = np.arange(n)
    delta = 1.0
    while True:
        # entry (i, j) of inv(D) T D is T_ij * delta**(j - i); T is upper triangular
        scaled = t * np.triu(delta ** (k[None, :] - k[:, None]))
        norm = operator_norm(scaled)
        if norm < target:
            d = delta**k
            q = u * d[None, :]
            q_inv = (1.0 / d)[:, None] * u.conj().T
            return ShrinkSimilarity(
                transform=q,
                inverse_transform=q_inv,
                transformed=scaled,
                transformed_norm=norm,
                spectral_radius=rho,
                target=target,
            )
        delta *= 0.5
        if n > 1 and delta ** (-(n - 1)) > cond_cap:
            raise ConvergenceError(
                f"shrink_similarity: conditioning cap {cond_cap:g} reached "
                f"at norm {norm:.6g}, target {target:.6g}; eps={eps} is too "
                "aggressive for double precision"
            )
