"""Coupled simulation of heterogeneous agents with dynamics averaging.

The agent ensemble evolves by

    state:    xi_i(t+1) = S_i(t) xi_i(t) + B u_i(t)
    control:  u_i(t)    = K_i(t) * sum_j a_ij (xi_j(t) - xi_i(t))
    dynamics: S_i(t+1)  = S_i(t) + c * sum_j a_ij (S_j(t) - S_i(t))

run() integrates an exact reformulation in centered coordinates: the
ensemble mean, per-agent state deviations, and per-agent dynamics
deviations are co-simulated, and the zero-mean components are re-centered
every step.  Algebraically this is the same recursion; numerically it
keeps rounding errors relative to each component's own scale.  The naive
form accumulates absolute rounding noise of order eps * ||xi(t)||, which
grows geometrically when the average dynamics is unstable and swamps the
true disagreement after a few dozen steps.  step_states / step_dynamics
expose the plain one-step operations for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .design import ProtocolDesign
from .exceptions import ArgumentError, NumericalError
from .graph import LaplacianSpectrum
from .validation import as_matrix_list, as_square_matrix, as_vector


def random_initial_states(n_agents: int, dim: int, seed: int,
                          low: float = -1.0, high: float = 1.0) -> np.ndarray:
    """Seeded initial states, components uniform in [low, high]."""
    if n_agents < 1 or dim < 1:
        raise ArgumentError("n_agents and dim must be positive")
    rng = np.random.default_rng(seed)
    return rng.uniform(low, high, size=(n_agents, dim))


def step_dynamics(s_list, laplacian, c: float) -> np.ndarray:
    """One step of the dynamics-averaging recursion (plain form)."""
    s_arr = as_matrix_list(s_list, "dynamics list")
    lap = as_square_matrix(laplacian, "laplacian")
    if lap.shape[0] != s_arr.shape[0]:
        raise ArgumentError("laplacian order does not match the number of agents")
    return s_arr - c * np.tensordot(lap, s_arr, axes=([1], [0]))


def step_states(s_list, states, b, gains, laplacian) -> np.ndarray:
    """One step of the state recursion with given per-agent gain rows (plain form)."""
    s_arr = as_matrix_list(s_list, "dynamics list")
    states = np.asarray(states, dtype=float)
    gains = np.asarray(gains, dtype=float)
    b = as_vector(b, "input")
    lap = as_square_matrix(laplacian, "laplacian")
    n, p = s_arr.shape[0], s_arr.shape[1]
    if states.shape != (n, p) or gains.shape != (n, p) or b.size != p:
        raise ArgumentError(
            f"shape mismatch: states {states.shape}, gains {gains.shape}, "
            f"input {b.size}, expected ({n}, {p})"
        )
    # (L @ states)[i] = -sum_j a_ij (xi_j - xi_i)
    u = -np.einsum("nk,nk->n", gains, lap @ states)
    return np.einsum("nij,nj->ni", s_arr, states) + np.outer(u, b)


@dataclass(frozen=True)
class Trajectory:
    """Recorded simulation history.

    states are reconstructed as mean + deviation per step; sync_error(t)
    is max_i ||xi_i - mean||, dynamics_deviation(t) is the largest
    operator norm of S_i(t) - S_inf.
    """

    times: np.ndarray
    states: np.ndarray = field(repr=False)          # (T+1, N, p)
    mean_state: np.ndarray = field(repr=False)      # (T+1, p)
    deviations: np.ndarray = field(repr=False)      # (T+1, N, p)
    dyn_deviations: np.ndarray = field(repr=False)  # (T+1, N, p, p)
    sync_error: np.ndarray
    dynamics_deviation: np.ndarray
    agent_deviation: np.ndarray = field(repr=False)  # (T+1, N)

    @property
    def horizon(self) -> int:
        return self.times.size - 1


def run(laplacian, s_init, xi_init, b, design: ProtocolDesign, horizon: int) -> Trajectory:
    """Simulate the coupled recursion for `horizon` steps under a design.

    Gains are recomputed each step from the current S_i(t); in the stable
    regime they are identically zero.  Aborts with NumericalError when
    any state magnitude exceeds 1e150, reporting the step index.
    """
    if horizon < 1:
        raise ArgumentError(f"horizon must be >= 1, got {horizon}")
    lap = as_square_matrix(laplacian, "laplacian")
    s_arr = as_matrix_list(s_init, "dynamics list")
    b = as_vector(b, "input")
    states0 = np.asarray(xi_init, dtype=float)
    n, p = s_arr.shape[0], s_arr.shape[1]
    if states0.shape != (n, p):
        raise ArgumentError(f"initial states must have shape ({n}, {p}), got {states0.shape}")
    if lap.shape[0] != n or b.size != p:
        raise ArgumentError("laplacian or input dimension mismatch")

    s_inf = design.s_infinity
    c = design.coupling
    use_gains = not design.stable_case
    if use_gains:
        pb = design.riccati_p @ b
        bpb = float(b @ pb)

    mean = states0.mean(axis=0)
    dev = states0 - mean
    dyn_dev = s_arr - s_inf
    dyn_dev -= dyn_dev.mean(axis=0)

    steps = horizon + 1
    mean_hist = np.empty((steps, p))
    dev_hist = np.empty((steps, n, p))
    dyn_hist = np.empty((steps, n, p, p))

    for t in range(steps):
        mean_hist[t] = mean
        dev_hist[t] = dev
        dyn_hist[t] = dyn_dev
        if t == horizon:
            break
        if max(float(np.abs(mean).max()), float(np.abs(dev).max())) > 1e150:
            raise NumericalError(f"state magnitude exceeded 1e150 at step {t}")
        s_now = s_inf + dyn_dev
        if use_gains:
            gains = design.gain_scale * np.einsum("j,njk->nk", pb, s_now) / bpb
            u = -np.einsum("nk,nk->n", gains, lap @ dev)
            control = np.outer(u, b)
        else:
            control = 0.0
        # split S_i xi_i = S_inf mean + D_i mean + S_i dev_i, then re-center
        parts = np.einsum("nij,j->ni", dyn_dev, mean) \
            + np.einsum("nij,nj->ni", s_now, dev) + control
        part_mean = parts.mean(axis=0)
        mean = s_inf @ mean + part_mean
        dev = parts - part_mean
        dyn_dev = dyn_dev - c * np.tensordot(lap, dyn_dev, axes=([1], [0]))
        dyn_dev -= dyn_dev.mean(axis=0)

    agent_norms = np.linalg.norm(dev_hist, axis=2)
    dyn_norms = np.linalg.norm(dyn_hist, ord=2, axis=(2, 3)).max(axis=1)
    return Trajectory(
        times=np.arange(steps),
        states=mean_hist[:, None, :] + dev_hist,
        mean_state=mean_hist,
        deviations=dev_hist,
        dyn_deviations=dyn_hist,
        sync_error=agent_norms.max(axis=1),
        dynamics_deviation=dyn_norms,
        agent_deviation=agent_norms,
    )


@dataclass(frozen=True)
class DisagreementTransform:
    """Orthogonal change of coordinates separating agreement from disagreement.

    basis is an N x N orthogonal matrix whose first column is
    1/sqrt(N) * ones; the full state transform is basis kron identity(dim).
    split() maps stacked agent states to (sigma, zeta) where sigma is the
    scaled-mean component and zeta collects the N-1 disagreement blocks.
    """

    basis: np.ndarray = field(repr=False)
    dim: int

    def __post_init__(self):
        q = as_square_matrix(self.basis, "basis")
        n = q.shape[0]
        if np.abs(q.T @ q - np.eye(n)).max() > 1e-10:
            raise ArgumentError("basis must be orthogonal")
        if np.abs(q[:, 0] - 1.0 / np.sqrt(n)).max() > 1e-10:
            raise ArgumentError("basis must have first column ones/sqrt(N)")
        if self.dim < 1:
            raise ArgumentError("dim must be positive")
        object.__setattr__(self, "basis", q)

    @classmethod
    def from_spectrum(cls, spec: LaplacianSpectrum, dim: int) -> "DisagreementTransform":
        """Use the Laplacian eigenbasis; this one block-diagonalizes the
        limiting closed-loop operator."""
        return cls(basis=spec.basis, dim=dim)

    @classmethod
    def standard(cls, n_agents: int, dim: int) -> "DisagreementTransform":
        """Deterministic completion of ones/sqrt(N) by QR of standard basis vectors."""
        if n_agents < 2:
            raise ArgumentError("need at least 2 agents")
        m = np.zeros((n_agents, n_agents))
        m[:, 0] = 1.0 / np.sqrt(n_agents)
        m[: n_agents - 1, 1:] = np.eye(n_agents - 1)
        q, r = np.linalg.qr(m)
        q = q * np.sign(np.diag(r))[None, :]
        q[:, 0] = 1.0 / np.sqrt(n_agents)
        return cls(basis=q, dim=dim)

    @property
    def n_agents(self) -> int:
        return self.basis.shape[0]

    def split(self, states) -> tuple[np.ndarray, np.ndarray]:
        """(sigma, zeta) for stacked states of shape (N, dim)."""
        states = self._check(states)
        sigma = self.basis[:, 0] @ states
        zeta = (self.basis[:, 1:].T @ states).ravel()
        return sigma, zeta

    def zeta_from_deviations(self, deviations) -> np.ndarray:
        """Disagreement coordinates computed from xi_i - mean directly.

        Equals split(states)[1] exactly in real arithmetic because the
        disagreement columns annihilate the ones direction, but avoids
        multiplying a huge mean by a near-zero rounding residual.
        """
        deviations = self._check(deviations)
        return (self.basis[:, 1:].T @ deviations).ravel()

    def reconstruct(self, sigma, zeta) -> np.ndarray:
        """Inverse of split(), back to stacked states of shape (N, dim)."""
        sigma = as_vector(sigma, "sigma")
        zeta = np.asarray(zeta, dtype=float).reshape(self.n_agents - 1, self.dim)
        return np.outer(self.basis[:, 0], sigma) + self.basis[:, 1:] @ zeta

    def _check(self, states) -> np.ndarray:
        states = np.asarray(states, dtype=float)
        if states.shape != (self.n_agents, self.dim):
            raise ArgumentError(
                f"states must have shape ({self.n_agents}, {self.dim}), "
                f"got {states.shape}"
            )
        return states


def closed_loop_residual(dyn_deviations, laplacian, b, p_matrix,
                         gain_scale: float) -> np.ndarray:
    """Gap between the true closed-loop operator and its limit, at one step.

    With D_i = S_i(t) - S_inf and gain offsets Ktil_i = gain_scale *
    B'P D_i / (B'P B), the residual is

        blockdiag(D_i) - blockdiag(B Ktil_i) (L kron I_p)

    which is linear in the deviations.  Evaluating it this way (instead of
    subtracting the limit operator from the full one) keeps tiny D_i from
    being absorbed into S_inf entries; with identical agents it is exactly
    zero.
    """
    d_arr = as_matrix_list(dyn_deviations, "deviation list")
    lap = as_square_matrix(laplacian, "laplacian")
    b = as_vector(b, "input")
    p_matrix = as_square_matrix(p_matrix, "P")
    n, p = d_arr.shape[0], d_arr.shape[1]
    if lap.shape[0] != n or b.size != p:
        raise ArgumentError("laplacian or input dimension mismatch")
    pb = p_matrix @ b
    bpb = float(b @ pb)
    if bpb <= 0:
        raise ArgumentError(f"B'PB must be positive, got {bpb}")
    residual = np.zeros((n * p, n * p))
    gain_block = np.zeros((n * p, n * p))
    for i in range(n):
        k_til = gain_scale * (pb @ d_arr[i]) / bpb
        sl = slice(i * p, (i + 1) * p)
        residual[sl, sl] = d_arr[i]
        gain_block[sl, sl] = np.outer(b, k_til)
    return residual - gain_block @ np.kron(lap, np.eye(p))
