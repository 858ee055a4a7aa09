"""Weighted undirected communication graphs and their Laplacian spectra.

The Laplacian of a weighted graph has zero row sums, so the all-ones
vector is always an eigenvector with eigenvalue 0.  The spectral basis
returned here pins that eigenvector analytically to 1/sqrt(N) * ones,
which downstream coupling formulas rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ArgumentError, NumericalError
from .validation import as_square_matrix


@dataclass(frozen=True)
class WeightedGraph:
    """Symmetric nonnegative weight matrix with zero diagonal.

    Parameters
    ----------
    weights : ndarray of shape (n, n)
        Entry (i, j) is the coupling weight between nodes i and j.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = as_square_matrix(self.weights, "weights")
        if np.any(w < 0):
            raise ArgumentError("graph weights must be nonnegative")
        scale = max(float(np.abs(w).max()), 1.0)
        if np.abs(w - w.T).max() > 1e-12 * scale:
            raise ArgumentError("graph weights must be symmetric")
        w = 0.5 * (w + w.T)
        if np.abs(np.diag(w)).max() > 0:
            raise ArgumentError("graph weights must have zero diagonal")
        object.__setattr__(self, "weights", w)

    @property
    def n_nodes(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def from_edges(cls, n_nodes: int, edges) -> "WeightedGraph":
        """Build from an iterable of (i, j, weight) triples (0-based nodes)."""
        if n_nodes < 1:
            raise ArgumentError("n_nodes must be positive")
        w = np.zeros((n_nodes, n_nodes))
        for e in edges:
            if len(e) != 3:
                raise ArgumentError(f"edge {e!r} must be (i, j, weight)")
            i, j, wt = int(e[0]), int(e[1]), float(e[2])
            if not (0 <= i < n_nodes and 0 <= j < n_nodes) or i == j:
                raise ArgumentError(f"edge ({i}, {j}) out of range or a self-loop")
            if wt < 0:
                raise ArgumentError(f"edge ({i}, {j}) has negative weight")
            w[i, j] = wt
            w[j, i] = wt
        return cls(w)


def build_laplacian(graph) -> np.ndarray:
    """Laplacian L = diag(row sums) - weights.

    Accepts a :class:`WeightedGraph` or a raw adjacency matrix (which is
    validated the same way).  Row sums of the result are zero.
    """
    if not isinstance(graph, WeightedGraph):
        graph = WeightedGraph(np.asarray(graph, dtype=float))
    w = graph.weights
    return np.diag(w.sum(axis=1)) - w


@dataclass(frozen=True)
class LaplacianSpectrum:
    """Eigendecomposition of a graph Laplacian.

    eigenvalues are sorted ascending; basis is orthogonal with first
    column exactly 1/sqrt(N) * ones.
    """

    laplacian: np.ndarray
    eigenvalues: np.ndarray
    basis: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return self.eigenvalues.size

    @property
    def lambda2(self) -> float:
        """Second-smallest eigenvalue (algebraic connectivity)."""
        return float(self.eigenvalues[1])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def disagreement_basis(self) -> np.ndarray:
        """Columns 2..N of the basis: orthonormal complement of the ones direction."""
        return self.basis[:, 1:]


def spectrum(laplacian) -> LaplacianSpectrum:
    """Full symmetric eigendecomposition of a Laplacian.

    The zero eigenvalue and its eigenvector 1/sqrt(N) * ones are known
    analytically, so they are split off exactly: the solver only sees the
    Laplacian restricted to the orthogonal complement of the ones
    direction.  This keeps the basis orthonormal even when the zero
    eigenvalue is repeated (disconnected graphs).  Remaining columns get
    a deterministic sign fix (largest-magnitude entry made positive).
    """
    L = as_square_matrix(laplacian, "laplacian")
    n = L.shape[0]
    if n < 2:
        raise ArgumentError("need at least 2 nodes for a spectrum")
    scale = max(float(np.abs(L).max()), 1.0)
    if np.abs(L.sum(axis=1)).max() > 1e-9 * scale:
        raise ArgumentError("laplacian must have zero row sums")
    L = 0.5 * (L + L.T)
    # Householder reflector sending e_1 to the normalized ones vector; its
    # trailing columns are an orthonormal complement of that direction
    u = -np.ones(n) / np.sqrt(n)
    u[0] += 1.0
    reflector = np.eye(n) - (2.0 / float(u @ u)) * np.outer(u, u)
    complement = reflector[:, 1:]
    reduced = complement.T @ L @ complement
    reduced = 0.5 * (reduced + reduced.T)
    try:
        tail_eigs, tail_vecs = np.linalg.eigh(reduced)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    if tail_eigs[0] < -1e-9 * scale:
        raise ArgumentError(
            f"matrix has eigenvalue {tail_eigs[0]:.6g} < 0; not a Laplacian "
            "of nonnegative weights"
        )
    tail_eigs = np.maximum(tail_eigs, 0.0)
    eigenvalues = np.concatenate([[0.0], tail_eigs])
    basis = np.empty((n, n))
    basis[:, 0] = 1.0 / np.sqrt(n)
    basis[:, 1:] = complement @ tail_vecs
    for j in range(1, n):
        k = int(np.argmax(np.abs(basis[:, j])))
        if basis[k, j] < 0:
            basis[:, j] = -basis[:, j]
    return LaplacianSpectrum(laplacian=L, eigenvalues=eigenvalues, basis=basis)


def is_connected(spec: LaplacianSpectrum, tol: float | None = None) -> bool:
    """Connectivity test: lambda2 strictly above a scale-relative zero tolerance."""
    if tol is None:
        tol = 1e-9 * spec.lambda_max
    return spec.lambda2 > tol
