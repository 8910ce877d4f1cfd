"""Normal modes of the uniform hopping chain and the revival period of its dynamics.

The single-particle hopping matrix (omega on the diagonal, J on the two
off-diagonals) is diagonalized by the orthogonal sine transform
``S[j, k] = sqrt(2/(n+1)) sin(j k pi / (n+1))`` with mode frequencies
``omega + 2 J cos(k pi / (n+1))``. Mode labels are 1-based in every report.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Chain of ``n`` identical cavities, frequency ``omega``, hopping ``j_coupling`` (hbar = 1)."""

    n: int
    omega: float = 1.0
    j_coupling: float = 0.5

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"need an integer number of cavities >= 2, got n={self.n}")
        if not math.isfinite(self.omega) or self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not math.isfinite(self.j_coupling) or self.j_coupling < 0:
            raise ValueError(f"j_coupling must be non-negative, got {self.j_coupling}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "j_coupling", float(self.j_coupling))


@dataclass(frozen=True, eq=False)
class SpectralData:
    params: ModelParams
    s_matrix: np.ndarray
    frequencies: np.ndarray

    def hopping_matrix(self) -> np.ndarray:
        return single_particle_hamiltonian(self.params)


def single_particle_hamiltonian(params: ModelParams) -> np.ndarray:
    n = params.n
    off = np.full(n - 1, params.j_coupling)
    return params.omega * np.eye(n) + np.diag(off, 1) + np.diag(off, -1)


def sine_transform(n: int) -> np.ndarray:
    j = np.arange(1, n + 1)
    return np.sqrt(2.0 / (n + 1)) * np.sin(np.outer(j, j) * np.pi / (n + 1))


def mode_frequencies(params: ModelParams) -> np.ndarray:
    k = np.arange(1, params.n + 1)
    return params.omega + 2.0 * params.j_coupling * np.cos(k * np.pi / (params.n + 1))


@lru_cache(maxsize=64)
def build_spectral(params: ModelParams) -> SpectralData:
    s = sine_transform(params.n)
    freqs = mode_frequencies(params)
    s.setflags(write=False)
    freqs.setflags(write=False)
    return SpectralData(params, s, freqs)


def single_particle_propagator(spec: SpectralData, t: float) -> np.ndarray:
    """U(t) = S diag(exp(-i Omega_k t)) S^T acting on site amplitudes."""
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    s = spec.s_matrix
    return (s * np.exp(-1j * spec.frequencies * t)) @ s.T


def mode_weights(spec: SpectralData, site_amplitudes) -> np.ndarray:
    """Probability weight of each normal mode k = 1..n in a one-photon state."""
    amps = np.asarray(site_amplitudes, dtype=complex)
    if amps.shape != (spec.params.n,):
        raise ValueError(f"expected {spec.params.n} site amplitudes, got shape {amps.shape}")
    return np.abs(spec.s_matrix.T @ amps) ** 2


def _distinct(values: np.ndarray, tol: float) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > tol * max(1.0, abs(v)):
            out.append(float(v))
    return out


def frequency_gaps(spec: SpectralData, tol: float = 1e-9) -> list[float]:
    """Distinct positive differences between distinct mode frequencies, ascending."""
    levels = _distinct(spec.frequencies, tol)
    gaps = [b - a for i, a in enumerate(levels) for b in levels[i + 1:]]
    return _distinct(np.array(gaps), tol)


def evolution_period(
    spec: SpectralData, tol: float = 1e-9, max_multiple: int = 1_000_000
) -> float | None:
    """Smallest T at which every gap period 2 pi / |Omega_i - Omega_k| divides T.

    Gap ratios are approximated by continued fractions with denominators up to
    ``max_multiple``; a candidate T is accepted only if each gap completes an
    integer number of cycles to within ``tol``. Returns None when the spectrum
    is incommensurate within that bound and 0.0 when all frequencies coincide.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    gaps = frequency_gaps(spec, tol)
    if not gaps:
        return 0.0
    base = gaps[0]
    multiple = 1
    for g in gaps[1:]:
        ratio = Fraction(g / base).limit_denominator(max_multiple)
        multiple = math.lcm(multiple, ratio.denominator)
        if multiple > max_multiple:
            return None
    cycles = multiple * np.array(gaps) / base
    if np.max(np.abs(cycles - np.round(cycles))) > tol:
        return None
    return 2.0 * math.pi * multiple / base
