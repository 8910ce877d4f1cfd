"""Initial states: Fock products, weak coherent products, and the two-site entangled pair."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal, Mapping

import numpy as np

from .fock_space import DEFAULT_MAX_DIM, FockBasis, enumerate_sector

NORM_TOL = 1e-12
WEAK_FIELD_WARN = 0.5


@dataclass(frozen=True, eq=False)
class PureState:
    """Amplitudes of an ``n``-cavity state, kept separately for each photon-number sector.

    ``sectors`` maps total photon number to the amplitude vector over
    ``enumerate_sector(n, m)``.
    """

    n: int
    sectors: Mapping[int, np.ndarray]

    def __post_init__(self):
        clean = {}
        for m, vec in sorted(self.sectors.items()):
            vec = np.array(vec, dtype=complex)
            dim = self.basis(m).dim
            if vec.shape != (dim,):
                raise ValueError(f"sector {m} needs {dim} amplitudes, got shape {vec.shape}")
            vec.setflags(write=False)
            clean[int(m)] = vec
        object.__setattr__(self, "sectors", clean)
        norm = self.norm()
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")

    def basis(self, m: int) -> FockBasis:
        return enumerate_sector(self.n, m)

    def norm(self) -> float:
        return float(sum(np.vdot(v, v).real for v in self.sectors.values()))

    def sector_weight(self, m: int) -> float:
        vec = self.sectors.get(m)
        return 0.0 if vec is None else float(np.vdot(vec, vec).real)

    def amplitude(self, occupation) -> complex:
        occ = tuple(int(x) for x in occupation)
        if len(occ) != self.n:
            raise ValueError(f"occupation {occ} does not describe {self.n} cavities")
        vec = self.sectors.get(sum(occ))
        if vec is None:
            return 0j
        return complex(vec[self.basis(sum(occ)).index(occ)])

    def probability(self, occupation) -> float:
        return abs(self.amplitude(occupation)) ** 2


def _check_n(n: int) -> None:
    if int(n) != n or n < 2:
        raise ValueError(f"need an integer number of cavities >= 2, got n={n}")


def fock_product_state(n: int, occupations, max_dim: int = DEFAULT_MAX_DIM) -> PureState:
    """The occupation-number state |m_1 m_2 ... m_n>."""
    _check_n(n)
    occ = tuple(int(x) for x in occupations)
    if len(occ) != n or min(occ) < 0:
        raise ValueError(f"occupation {occ} is not valid for {n} cavities")
    basis = enumerate_sector(n, sum(occ), max_dim)
    vec = np.zeros(basis.dim, dtype=complex)
    vec[basis.index(occ)] = 1.0
    return PureState(n, {basis.total_photons: vec})


def weak_coherent_product(alphas) -> PureState:
    """Product over cavities of the truncated coherent state (|0> + a|1>) / sqrt(1 + |a|^2).

    The result spans sectors 0..n, each cavity holding at most one photon, and
    its vacuum probability is prod 1/(1 + |a_i|^2).
    """
    alphas = np.asarray(alphas, dtype=complex)
    n = alphas.size
    _check_n(n)
    mags = np.abs(alphas)
    if np.any(mags >= 1.0):
        raise ValueError("weak coherent amplitudes must satisfy |alpha| < 1")
    if np.any(mags > WEAK_FIELD_WARN):
        warnings.warn(
            f"|alpha| above {WEAK_FIELD_WARN}; single-photon truncation is a poor approximation",
            stacklevel=2,
        )
    scale = 1.0 / np.prod(np.sqrt(1.0 + mags**2))
    sectors = {}
    for m in range(n + 1):
        basis = enumerate_sector(n, m)
        occ = basis.occupations()
        allowed = np.all(occ <= 1, axis=1)
        # prod over occupied sites of alpha_i, empty product = 1
        amps = np.prod(np.where(occ == 1, alphas, 1.0), axis=1)
        sectors[m] = np.where(allowed, amps, 0.0) * scale
    return PureState(n, sectors)


@dataclass(frozen=True)
class EntangledPairSpec:
    """sin(theta)|10> + cos(theta)|01> on two adjacent cavities, 0 < theta < pi/2."""

    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta < math.pi / 2:
            raise ValueError(f"theta must lie in (0, pi/2), got {self.theta}")


def entangled_pair_state(
    n: int, spec: EntangledPairSpec, placement: Literal["first", "last"] = "first"
) -> PureState:
    _check_n(n)
    if placement not in ("first", "last"):
        raise ValueError(f"placement must be 'first' or 'last', got {placement!r}")
    site = 0 if placement == "first" else n - 2
    vec = np.zeros(n, dtype=complex)
    vec[site] = math.sin(spec.theta)
    vec[site + 1] = math.cos(spec.theta)
    return PureState(n, {1: vec})


def concurrence(spec: EntangledPairSpec) -> float:
    return abs(math.sin(2.0 * spec.theta))
