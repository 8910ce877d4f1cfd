"""Occupation-number bases for fixed total photon number, and ladder operators on them.

States are tuples of per-cavity photon counts. Cavity indices in this module are
zero-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from types import MappingProxyType
from typing import Literal, Mapping

import numpy as np

from .errors import DimensionCapError

DEFAULT_MAX_DIM = 100_000

Occupation = tuple[int, ...]


@dataclass(frozen=True)
class FockBasis:
    """All occupations of ``n`` cavities holding ``total_photons`` photons.

    States are ordered lexicographically descending, so the one-photon sector
    reads ``(1,0,..), (0,1,..), ...`` in site order.
    """

    n: int
    total_photons: int
    states: tuple[Occupation, ...]
    index_of: Mapping[Occupation, int] = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, occupation) -> int:
        occ = tuple(int(x) for x in occupation)
        try:
            return self.index_of[occ]
        except KeyError:
            raise ValueError(
                f"{occ} is not in the {self.total_photons}-photon sector of {self.n} cavities"
            ) from None

    def occupations(self) -> np.ndarray:
        """Occupations as an integer array of shape (dim, n)."""
        return np.array(self.states, dtype=np.int64).reshape(self.dim, self.n)


def sector_dimension(n: int, total_photons: int) -> int:
    return comb(total_photons + n - 1, n - 1)


def _compositions(total: int, slots: int):
    if slots == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, slots - 1):
            yield (first,) + rest


@lru_cache(maxsize=256)
def enumerate_sector(n: int, total_photons: int, max_dim: int = DEFAULT_MAX_DIM) -> FockBasis:
    """Enumerate the ``total_photons`` sector of ``n`` cavities.

    Raises
    ------
    ValueError
        If ``n < 2`` or ``total_photons < 0``.
    DimensionCapError
        If the sector has more than ``max_dim`` states.
    """
    if n < 2:
        raise ValueError(f"need at least 2 cavities, got n={n}")
    if total_photons < 0:
        raise ValueError(f"total photon number must be non-negative, got {total_photons}")
    dim = sector_dimension(n, total_photons)
    if dim > max_dim:
        raise DimensionCapError(
            f"sector (n={n}, photons={total_photons}) has {dim} states, cap is {max_dim}"
        )
    states = tuple(_compositions(total_photons, n))
    index = MappingProxyType({s: i for i, s in enumerate(states)})
    return FockBasis(n, total_photons, states, index)


def _check_cavity(basis: FockBasis, cavity: int) -> None:
    if not 0 <= cavity < basis.n:
        raise IndexError(f"cavity index {cavity} out of range for n={basis.n}")


def ladder_matrix(
    basis_from: FockBasis,
    basis_to: FockBasis,
    cavity: int,
    kind: Literal["create", "annihilate"],
) -> np.ndarray:
    """Matrix of a_j^dagger or a_j mapping ``basis_from`` into ``basis_to``."""
    if basis_from.n != basis_to.n:
        raise ValueError("bases describe different numbers of cavities")
    _check_cavity(basis_from, cavity)
    if kind == "create":
        step = 1
    elif kind == "annihilate":
        step = -1
    else:
        raise ValueError(f"kind must be 'create' or 'annihilate', got {kind!r}")
    if basis_to.total_photons != basis_from.total_photons + step:
        raise ValueError(
            f"{kind} maps the {basis_from.total_photons}-photon sector to "
            f"{basis_from.total_photons + step}, not {basis_to.total_photons}"
        )

    out = np.zeros((basis_to.dim, basis_from.dim), dtype=complex)
    for col, occ in enumerate(basis_from.states):
        m = occ[cavity]
        if step < 0 and m == 0:
            continue
        target = list(occ)
        target[cavity] = m + step
        amp = np.sqrt(m + 1) if step > 0 else np.sqrt(m)
        out[basis_to.index_of[tuple(target)], col] = amp
    return out


def number_operator(basis: FockBasis, cavity: int) -> np.ndarray:
    _check_cavity(basis, cavity)
    return np.diag(basis.occupations()[:, cavity].astype(float))
