"""Exact unitary evolution of pure states under the hopping Hamiltonian.

The Hamiltonian conserves photon number, so each sector evolves on its own
through a dense eigendecomposition. ``multinomial_amplitude_oracle`` computes
the same amplitudes a second way, by pushing every photon through the
single-particle propagator, and shares no code with the sector evolver.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fock_space import FockBasis, enumerate_sector, ladder_matrix, number_operator
from .spectral import ModelParams, SpectralData, single_particle_propagator
from .states import PureState

ORACLE_MAX_PHOTONS = 6


def assemble_sector_hamiltonian(params: ModelParams, basis: FockBasis) -> np.ndarray:
    """omega * sum_j n_j + J * sum_j (a_j^dag a_{j+1} + h.c.) restricted to one sector."""
    if basis.n != params.n:
        raise ValueError(f"basis has {basis.n} cavities, params have {params.n}")
    h = np.zeros((basis.dim, basis.dim))
    for j in range(params.n):
        h += params.omega * number_operator(basis, j)
    if basis.total_photons == 0 or params.j_coupling == 0.0:
        return h
    lower = enumerate_sector(basis.n, basis.total_photons - 1)
    for j in range(params.n - 1):
        hop = ladder_matrix(lower, basis, j, "create") @ ladder_matrix(basis, lower, j + 1, "annihilate")
        h += params.j_coupling * (hop + hop.conj().T).real
    return h


@dataclass(frozen=True, eq=False)
class SectorEvolver:
    basis: FockBasis
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def propagate(self, vec: np.ndarray, times) -> np.ndarray:
        """Amplitudes at each time; shape ``(len(times), dim)``."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        coeffs = self.eigenvectors.T @ vec
        phases = np.exp(-1j * np.outer(times, self.eigenvalues))
        return (phases * coeffs) @ self.eigenvectors.T


@lru_cache(maxsize=128)
def sector_evolver(params: ModelParams, total_photons: int) -> SectorEvolver:
    basis = enumerate_sector(params.n, total_photons)
    evals, evecs = np.linalg.eigh(assemble_sector_hamiltonian(params, basis))
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return SectorEvolver(basis, evals, evecs)


def evolve(state: PureState, params: ModelParams, t: float) -> PureState:
    if state.n != params.n:
        raise ValueError(f"state has {state.n} cavities, params have {params.n}")
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    sectors = {m: sector_evolver(params, m).propagate(v, [t])[0] for m, v in state.sectors.items()}
    return PureState(state.n, sectors)


def survival_probability(initial, params: ModelParams, t):
    """|<initial| exp(-iHt) |initial>|^2 for an occupation-number initial state.

    ``t`` may be a scalar or an array of times.
    """
    occ = tuple(int(x) for x in initial)
    if len(occ) != params.n or min(occ) < 0:
        raise ValueError(f"occupation {occ} is not valid for {params.n} cavities")
    ev = sector_evolver(params, sum(occ))
    idx = ev.basis.index(occ)
    vec = np.zeros(ev.basis.dim, dtype=complex)
    vec[idx] = 1.0
    p = np.abs(ev.propagate(vec, t)[:, idx]) ** 2
    return float(p[0]) if np.ndim(t) == 0 else p


def closed_form_survival(m: int, params: ModelParams, t):
    """cos^(4m)(J t / sqrt 2): survival of |m00> in a three-cavity chain."""
    if params.n != 3:
        raise ValueError("the cos^(4m) survival law holds only for n = 3")
    if m < 0:
        raise ValueError(f"photon number must be non-negative, got {m}")
    return np.cos(params.j_coupling * np.asarray(t, dtype=float) / math.sqrt(2.0)) ** (4 * m)


def _sites_of(occupation) -> list[int]:
    return [site for site, count in enumerate(occupation) for _ in range(count)]


def _oracle_column(initial, u: np.ndarray) -> dict[tuple[int, ...], complex]:
    # prod_p (sum_i U[i, j_p] a_i^dag) |0>, expanded over every site assignment
    sources = _sites_of(initial)
    n = u.shape[0]
    norm_in = math.prod(math.factorial(m) for m in initial)
    out: dict[tuple[int, ...], complex] = {}
    for targets in itertools.product(range(n), repeat=len(sources)):
        amp = 1.0 + 0j
        for i, j in zip(targets, sources):
            amp *= u[i, j]
        counts = [0] * n
        for i in targets:
            counts[i] += 1
        key = tuple(counts)
        out[key] = out.get(key, 0j) + amp
    return {
        key: amp * math.sqrt(math.prod(math.factorial(c) for c in key) / norm_in)
        for key, amp in out.items()
    }


def multinomial_amplitude_oracle(initial, final, spec: SpectralData, t: float) -> complex:
    """<final| exp(-iHt) |initial> from the single-particle propagator alone."""
    initial = tuple(int(x) for x in initial)
    final = tuple(int(x) for x in final)
    n = spec.params.n
    if len(initial) != n or len(final) != n:
        raise ValueError(f"occupations must describe {n} cavities")
    if sum(initial) != sum(final):
        raise ValueError("initial and final occupations lie in different sectors")
    if sum(initial) > ORACLE_MAX_PHOTONS:
        raise ValueError(f"oracle is limited to {ORACLE_MAX_PHOTONS} photons")
    column = _oracle_column(initial, single_particle_propagator(spec, t))
    return column.get(final, 0j)


def oracle_sector_propagator(spec: SpectralData, total_photons: int, t: float) -> np.ndarray:
    """Full sector propagator built column by column from the oracle expansion."""
    if total_photons > ORACLE_MAX_PHOTONS:
        raise ValueError(f"oracle is limited to {ORACLE_MAX_PHOTONS} photons")
    basis = enumerate_sector(spec.params.n, total_photons)
    u = single_particle_propagator(spec, t)
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for col, occ in enumerate(basis.states):
        for key, amp in _oracle_column(occ, u).items():
            out[basis.index_of[key], col] = amp
    return out


@dataclass(frozen=True, eq=False)
class ProbabilitySeries:
    times: np.ndarray
    labels: list[tuple[int, ...]]
    probabilities: np.ndarray  # shape (len(times), len(labels))

    def column(self, label) -> np.ndarray:
        return self.probabilities[:, self.labels.index(tuple(label))]


def probability_series(state: PureState, params: ModelParams, times, labels) -> ProbabilitySeries:
    """Occupation probabilities |<label|psi(t)>|^2 on a time grid."""
    if state.n != params.n:
        raise ValueError(f"state has {state.n} cavities, params have {params.n}")
    times = np.asarray(times, dtype=float)
    labels = [tuple(int(x) for x in lab) for lab in labels]
    probs = np.zeros((times.size, len(labels)))
    by_sector: dict[int, list[int]] = {}
    for col, lab in enumerate(labels):
        if len(lab) != params.n or min(lab) < 0:
            raise ValueError(f"label {lab} is not valid for {params.n} cavities")
        by_sector.setdefault(sum(lab), []).append(col)
    for m, cols in by_sector.items():
        vec = state.sectors.get(m)
        if vec is None:
            continue
        ev = sector_evolver(params, m)
        amps = ev.propagate(vec, times)
        rows = [ev.basis.index(labels[c]) for c in cols]
        probs[:, cols] = np.abs(amps[:, rows]) ** 2
    return ProbabilitySeries(times, labels, probs)
