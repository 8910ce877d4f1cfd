"""Photon loss in the vacuum + single-excitation subspace.

Basis order is ``|00..0>, |10..0>, |01..0>, ..., |00..1>``. Each cavity decays
at the same rate ``gamma`` through the jump operator a_i, which in this
subspace maps the site-i excitation onto the vacuum. The subspace is closed
under both the hopping Hamiltonian and the jumps, so nothing is truncated.

Master equation (standard sign):

    drho/dt = -i [H, rho] + gamma * sum_i (a_i rho a_i^dag - {a_i^dag a_i, rho} / 2)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalGuardError
from .spectral import ModelParams, single_particle_hamiltonian
from .states import EntangledPairSpec, entangled_pair_state

DEFAULT_DT = 1e-3
TRACE_GUARD = 1e-8
POSITIVITY_GUARD = -1e-8


@dataclass(frozen=True)
class LossParams:
    gamma: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.gamma) or self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")


def subspace_labels(n: int) -> list[tuple[int, ...]]:
    vacuum = (0,) * n
    return [vacuum] + [tuple(int(i == j) for j in range(n)) for i in range(n)]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    basis_labels: list[tuple[int, ...]] = field(default=None)

    def __post_init__(self):
        rho = np.array(self.matrix, dtype=complex)
        d = rho.shape[0]
        if rho.shape != (d, d) or d < 3:
            raise ValueError(f"density matrix must be square with n+1 >= 3 rows, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-10:
            raise ValueError(f"density matrix trace is {np.trace(rho).real!r}, not 1")
        if np.linalg.eigvalsh(rho).min() < -1e-9:
            raise ValueError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)
        if self.basis_labels is None:
            object.__setattr__(self, "basis_labels", subspace_labels(d - 1))

    @property
    def n(self) -> int:
        return self.matrix.shape[0] - 1

    def site_populations(self) -> np.ndarray:
        return np.diag(self.matrix).real[1:]


def initial_density(theta: float, n: int) -> DensityMatrix:
    """|psi><psi| for psi = sin(theta)|10..0> + cos(theta)|01..0>, embedded with an empty vacuum row."""
    amps = entangled_pair_state(n, EntangledPairSpec(theta), "first").sectors[1]
    psi = np.concatenate([[0.0], amps])
    return DensityMatrix(np.outer(psi, psi.conj()))


def subspace_hamiltonian(params: ModelParams) -> np.ndarray:
    h = np.zeros((params.n + 1, params.n + 1))
    h[1:, 1:] = single_particle_hamiltonian(params)
    return h


def jump_operators(n: int) -> np.ndarray:
    """Stack of a_i restricted to the subspace, shape (n, n+1, n+1)."""
    ops = np.zeros((n, n + 1, n + 1))
    ops[np.arange(n), 0, np.arange(1, n + 1)] = 1.0
    return ops


def lindblad_rhs(rho, params: ModelParams, loss: LossParams) -> np.ndarray:
    """Time derivative of ``rho``; accepts a batch with shape (..., n+1, n+1)."""
    rho = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (params.n + 1, params.n + 1):
        raise ValueError(f"expected (..., {params.n + 1}, {params.n + 1}) matrices, got {rho.shape}")
    h = subspace_hamiltonian(params)
    out = -1j * (h @ rho - rho @ h)
    if loss.gamma > 0:
        ops = jump_operators(params.n)
        decay = np.einsum("kij,kjl->il", ops.transpose(0, 2, 1), ops)  # sum_i a_i^dag a_i
        feed = np.einsum("kij,...jl,kml->...im", ops, rho, ops)  # sum_i a_i rho a_i^dag
        out = out + loss.gamma * (feed - 0.5 * (decay @ rho + rho @ decay))
    return out


def generator_matrix(params: ModelParams, loss: LossParams) -> np.ndarray:
    """Matrix of the right-hand side acting on row-major flattened rho."""
    d = params.n + 1
    units = np.eye(d * d, dtype=complex).reshape(d * d, d, d)
    return lindblad_rhs(units, params, loss).reshape(d * d, d * d).T


def _rk4_step_operator(gen: np.ndarray, h: float) -> np.ndarray:
    # for a linear right-hand side one classical RK4 step is exactly this polynomial
    x = h * gen
    step = np.eye(gen.shape[0], dtype=complex)
    term = step
    for k in range(1, 5):
        term = term @ x / k
        step = step + term
    return step


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), *batch, n+1, n+1)
    max_trace_drift: float
    max_hermiticity_error: float
    min_eigenvalue: float

    def density(self, i: int, *batch_index: int) -> DensityMatrix:
        return DensityMatrix(self.states[(i, *batch_index)])

    def diagnostics(self) -> dict:
        return {
            "max_trace_drift": self.max_trace_drift,
            "max_hermiticity_error": self.max_hermiticity_error,
            "min_eigenvalue": self.min_eigenvalue,
            "samples": int(self.times.size),
        }


def integrate(
    rho0,
    params: ModelParams,
    loss: LossParams,
    t_final: float,
    dt: float = DEFAULT_DT,
    sample_times=None,
) -> Trajectory:
    """Fixed-step RK4 integration of the master equation.

    ``rho0`` may be a DensityMatrix or an array of shape (..., n+1, n+1) to
    integrate a batch of initial states together. Samples are taken at
    ``sample_times`` (default: 0 and ``t_final``); steps between consecutive
    samples are shrunk slightly so every sample is hit exactly.

    Raises
    ------
    NumericalGuardError
        If trace drift exceeds 1e-8, an entry leaves the unit disc, or an
        eigenvalue drops below -1e-8; usually a sign that ``dt`` is too large.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_final < 0:
        raise ValueError("t_final must be non-negative")
    rho0 = rho0.matrix if isinstance(rho0, DensityMatrix) else np.asarray(rho0, dtype=complex)
    d = params.n + 1
    if rho0.shape[-2:] != (d, d):
        raise ValueError(f"initial state must have shape (..., {d}, {d}), got {rho0.shape}")
    if sample_times is None:
        sample_times = [0.0, t_final]
    times = np.asarray(sample_times, dtype=float)
    if times.size == 0 or times[0] < 0 or np.any(np.diff(times) < 0) or times[-1] > t_final:
        raise ValueError("sample_times must be sorted within [0, t_final]")

    batch = rho0.shape[:-2]
    gen = generator_matrix(params, loss)
    y = rho0.reshape(-1, d * d).T.copy()
    step_cache: dict[tuple[int, float], np.ndarray] = {}
    samples = np.empty((times.size, *batch, d, d), dtype=complex)
    drift = herm = 0.0
    min_eig = np.inf

    t_now = 0.0
    for i, t_next in enumerate(times):
        span = t_next - t_now
        if span > 0:
            nsteps = max(1, math.ceil(span / dt - 1e-9))
            h = span / nsteps
            key = (nsteps, round(h, 15))
            if key not in step_cache:
                step_cache[key] = _rk4_step_operator(gen, h)
            op = step_cache[key]
            for _ in range(nsteps):
                y = op @ y
            t_now = t_next
        rho = y.T.reshape(*batch, d, d)
        tr = np.trace(rho, axis1=-2, axis2=-1)
        drift = max(drift, float(np.max(np.abs(tr - 1.0))))
        herm = max(herm, float(np.max(np.abs(rho - np.swapaxes(rho.conj(), -1, -2)))))
        eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + np.swapaxes(rho.conj(), -1, -2)))))
        min_eig = min(min_eig, eig)
        if not np.all(np.isfinite(rho)) or drift > TRACE_GUARD or np.max(np.abs(rho)) > 1 + TRACE_GUARD:
            raise NumericalGuardError(
                f"integration unstable at t={t_now:g} (trace drift {drift:.3g}); reduce dt={dt:g}"
            )
        if eig < POSITIVITY_GUARD:
            raise NumericalGuardError(f"density matrix lost positivity at t={t_now:g} (eigenvalue {eig:.3g})")
        samples[i] = rho
    return Trajectory(times, samples, drift, herm, min_eig)


def transfer_target(theta: float, n: int) -> np.ndarray:
    amps = entangled_pair_state(n, EntangledPairSpec(theta), "last").sectors[1]
    return np.concatenate([[0.0], amps])


def transfer_sweep(thetas, params: ModelParams, loss: LossParams, times, dt: float = DEFAULT_DT):
    """<Phi_theta| rho_theta(t) |Phi_theta> for every (t, theta); returns (values, trajectory).

    ``values`` has shape (len(times), len(thetas)).
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    times = np.atleast_1d(np.asarray(times, dtype=float))
    rho0 = np.stack([initial_density(th, params.n).matrix for th in thetas])
    traj = integrate(rho0, params, loss, float(times[-1]), dt, times)
    phis = np.stack([transfer_target(th, params.n) for th in thetas])
    values = np.einsum("bi,sbij,bj->sb", phis.conj(), traj.states, phis).real
    return values, traj


def dissipative_transfer_probability(
    theta: float, params: ModelParams, loss: LossParams, t: float, dt: float = DEFAULT_DT
) -> float:
    """Probability that the pair state now sits on the last two cavities, under loss."""
    values, _ = transfer_sweep([theta], params, loss, [t], dt)
    return float(values[0, 0])
