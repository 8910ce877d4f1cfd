"""W/NOON event detection in three-cavity chains, and entangled-pair transfer probability.

W and NOON events are read off the k-photon single-site probabilities
p(|k00>), p(|0k0>), p(|00k>), conditioned on the state being in the k-photon
sector so that thresholds mean the same thing for Fock and weak coherent
inputs:

* W: all three are equal and nonzero.
* NOON: p(|0k0>) sits at a local minimum at the same instant (to within
  ``CLUSTER_TOL``) as the edge probabilities p(|k00>) = p(|00k>) sit at a
  local maximum, with the edges strictly above the middle. The reported time
  is that of the edge maximum.

Probabilities and their time derivatives are evaluated in closed form from
the sector eigendecomposition, so crossings and extrema are refined with
Brent's method on exact functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import PeriodUnavailableError
from .evolution import sector_evolver
from .spectral import ModelParams, build_spectral, evolution_period, single_particle_propagator
from .states import EntangledPairSpec, PureState, concurrence, entangled_pair_state

DETECTION_TOL = 1e-8
POINTS_PER_PERIOD = 4001
MAX_WINDOW_DIVISOR = 8
CLUSTER_TOL = 1e-6
REFERENCE_TRANSFER_PARAMS = ModelParams(4, 1.0, 0.5)


@dataclass(frozen=True)
class DetectionEvent:
    time: float
    probability: float  # p(|k00>) at the event, unconditioned
    conditional_probability: float  # same, conditioned on the k-photon sector
    residual: float
    at_initial_time: bool


@dataclass(frozen=True)
class DetectionReport:
    event_kind: Literal["W", "NOON"]
    photon_number: int
    period: float
    window: float
    tol: float
    events: tuple[DetectionEvent, ...]

    @property
    def found(self) -> bool:
        return bool(self.events)

    @property
    def times(self) -> list[float]:
        return [e.time for e in self.events]

    @property
    def probability_at_event(self) -> list[float]:
        return [e.probability for e in self.events]

    @property
    def condition_residual(self) -> float:
        return max((e.residual for e in self.events), default=0.0)


class _EdgeMiddleTrack:
    """p(|k00>), p(|0k0>), p(|00k>) and their time derivatives."""

    def __init__(self, state: PureState, params: ModelParams, k: int):
        ev = sector_evolver(params, k)
        self.weight = state.sector_weight(k)
        vec = state.sectors.get(k, np.zeros(ev.basis.dim))
        scale = 1.0 / math.sqrt(self.weight) if self.weight > 0 else 0.0
        labels = [(k, 0, 0), (0, k, 0), (0, 0, k)]
        rows = [ev.basis.index(lab) for lab in labels]
        self.lam = ev.eigenvalues
        self.weights = ev.eigenvectors[rows, :] * (ev.eigenvectors.T @ vec * scale)

    def _amps(self, t, order: int) -> np.ndarray:
        phase = np.exp(-1j * np.multiply.outer(np.asarray(t, dtype=float), self.lam))
        return (phase * (-1j * self.lam) ** order) @ self.weights.T

    def probs(self, t) -> np.ndarray:
        return np.abs(self._amps(t, 0)) ** 2

    def d1(self, t) -> np.ndarray:
        a, da = self._amps(t, 0), self._amps(t, 1)
        return 2.0 * np.real(np.conj(a) * da)


def _roots(func: Callable[[float], float], grid: np.ndarray, values: np.ndarray) -> list[float]:
    out = []
    for i in range(grid.size - 1):
        a, b = values[i], values[i + 1]
        if a == 0.0:
            out.append(float(grid[i]))
        elif a * b < 0.0:
            out.append(brentq(func, grid[i], grid[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps))
    return out


def _observable_window(track: _EdgeMiddleTrack, period: float) -> float:
    # smallest T/q over which the tracked probabilities repeat
    probe = np.linspace(0.0, period, 97, endpoint=False)
    base = track.probs(probe)
    for q in range(MAX_WINDOW_DIVISOR, 1, -1):
        if np.max(np.abs(track.probs(probe + period / q) - base)) < 1e-9:
            return period / q
    return period


def _scan_setup(state: PureState, params: ModelParams, k: int, points_per_period: int):
    if params.n != 3 or state.n != 3:
        raise ValueError("W/NOON detection is defined for three-cavity chains")
    if k < 1:
        raise ValueError(f"photon number must be positive, got {k}")
    period = evolution_period(build_spectral(params))
    if period is None:
        raise PeriodUnavailableError("spectrum is incommensurate; no scan window")
    if period == 0.0:
        raise PeriodUnavailableError("spectrum is degenerate; probabilities are stationary")
    track = _EdgeMiddleTrack(state, params, k)
    window = _observable_window(track, period) if track.weight > 0 else period
    npts = max(64, int(math.ceil(points_per_period * window / period)))
    h = window / (npts - 1)
    # pad one step either side so extrema sitting exactly on t = 0 are bracketed
    grid = np.linspace(-h, window + h, npts + 2)
    return track, period, window, grid


def _fold(times: list[float], window: float) -> list[float]:
    """Map candidate times into [0, window), sorted."""
    ttol = CLUSTER_TOL * max(1.0, window)
    folded = []
    for t in times:
        t = t % window
        if window - t < ttol:
            t = 0.0
        folded.append(t)
    return sorted(folded)


def _best_per_cluster(scored: list[tuple[float, float]], window: float) -> list[tuple[float, float]]:
    # candidates closer than CLUSTER_TOL are one event; keep the smallest residual
    ttol = CLUSTER_TOL * max(1.0, window)
    clusters: list[list[tuple[float, float]]] = []
    for t, res in sorted(scored):
        if clusters and t - clusters[-1][-1][0] <= ttol:
            clusters[-1].append((t, res))
        else:
            clusters.append([(t, res)])
    return [min(c, key=lambda tr: tr[1]) for c in clusters]


def _report(kind, k, track, period, window, tol, accepted) -> DetectionReport:
    ttol = CLUSTER_TOL * max(1.0, window)
    events = tuple(
        DetectionEvent(
            time=t,
            probability=float(track.probs(t)[0] * track.weight),
            conditional_probability=float(track.probs(t)[0]),
            residual=float(res),
            at_initial_time=t < ttol,
        )
        for t, res in accepted
    )
    return DetectionReport(kind, k, period, window, tol, events)


def find_w_times(
    state: PureState,
    params: ModelParams,
    photon_number: int,
    tol: float = DETECTION_TOL,
    points_per_period: int = POINTS_PER_PERIOD,
) -> DetectionReport:
    """Times in one repeat window where the three k-photon site probabilities are equal and nonzero."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    track, period, window, grid = _scan_setup(state, params, photon_number, points_per_period)
    if track.weight == 0.0:
        return _report("W", photon_number, track, period, window, tol, [])

    f = lambda t: float(np.subtract(*track.probs(t)[:2]))
    df = lambda t: float(np.subtract(*track.d1(t)[:2]))
    p, dp = track.probs(grid), track.d1(grid)
    crossings = _roots(f, grid, p[:, 0] - p[:, 1])
    touches = [t for t in _roots(df, grid, dp[:, 0] - dp[:, 1]) if abs(f(t)) < tol]
    # a sign change beside a touching zero is the same double root, located poorly
    ttol = CLUSTER_TOL * max(1.0, window)
    crossings = [c for c in crossings if all(abs(c - t) > ttol for t in touches)]

    scored = []
    for t in _fold(crossings + touches, window):
        pr = track.probs(t)
        scored.append((t, max(abs(pr[0] - pr[1]), abs(pr[1] - pr[2]), abs(pr[0] - pr[2]))))
    accepted = [
        (t, res) for t, res in _best_per_cluster(scored, window)
        if res < tol and track.probs(t).min() > tol
    ]
    return _report("W", photon_number, track, period, window, tol, accepted)


def find_noon_times(
    state: PureState,
    params: ModelParams,
    photon_number: int,
    tol: float = DETECTION_TOL,
    points_per_period: int = POINTS_PER_PERIOD,
) -> DetectionReport:
    """Times where the middle site is at a minimum while equal edges peak above it."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    track, period, window, grid = _scan_setup(state, params, photon_number, points_per_period)
    if track.weight == 0.0:
        return _report("NOON", photon_number, track, period, window, tol, [])

    delta = 0.25 * (grid[1] - grid[0])
    d1_grid = track.d1(grid)

    def extrema(col: int, sign: float) -> list[float]:
        # sign=+1 keeps minima, -1 maxima; judged from values a quarter step
        # away since minima may be flat to high order (cos^4 at its zero)
        roots = _roots(lambda t: float(track.d1(t)[col]), grid, d1_grid[:, col])
        out = []
        for t in _fold(roots, window):
            here, near = track.probs(t)[col], track.probs([t - delta, t + delta])[:, col]
            if sign * (near - here).min() >= 0.0:
                out.append(t)
        return out

    ttol = CLUSTER_TOL * max(1.0, window)
    middle_minima = extrema(1, +1.0)
    scored = []
    for t in extrema(0, -1.0):
        # distance on the circle of length `window`
        if any(min(abs(t - m), window - abs(t - m)) <= ttol for m in middle_minima):
            pr = track.probs(t)
            scored.append((t, abs(pr[0] - pr[2])))
    accepted = [
        (t, res) for t, res in _best_per_cluster(scored, window)
        if res < tol and np.subtract(*track.probs(t)[:2]) > tol
    ]
    return _report("NOON", photon_number, track, period, window, tol, accepted)


@dataclass(frozen=True)
class TransferResult:
    t: float
    concurrence: float
    probability: float


def transfer_probability_closed_form(t, c):
    """Probability that the pair state on sites 1-2 reappears on sites 3-4 (n=4, omega=1, J=0.5)."""
    t = np.asarray(t, dtype=float)
    c = np.asarray(c, dtype=float)
    if np.any((c < 0) | (c > 1)):
        raise ValueError("concurrence must lie in [0, 1]")
    slow = np.sin(t / 4.0) ** 2
    fast = math.sqrt(5.0) * t / 4.0
    return 0.2 * slow * (5.0 * c**2 * np.cos(fast) ** 2 + 4.0 * np.sin(fast) ** 2)


def transfer_probability_numeric(theta: float, params: ModelParams, t: float) -> TransferResult:
    """|<pair on last two sites|psi(t)>|^2 for the pair started on the first two sites."""
    spec = EntangledPairSpec(theta)
    psi0 = entangled_pair_state(params.n, spec, "first").sectors[1]
    target = entangled_pair_state(params.n, spec, "last").sectors[1]
    u = single_particle_propagator(build_spectral(params), t)
    p = abs(np.vdot(target, u @ psi0)) ** 2
    return TransferResult(float(t), concurrence(spec), float(p))


def peak_transfer_search(
    c: float,
    horizon: float = 120.0,
    params: ModelParams = REFERENCE_TRANSFER_PARAMS,
    step: float = 0.01,
) -> TransferResult:
    """Maximize the closed-form transfer probability over t in [0, horizon].

    Grid scan followed by golden-section refinement around the best grid point;
    ties go to the earliest time.
    """
    if params != REFERENCE_TRANSFER_PARAMS:
        raise ValueError("closed-form transfer probability is derived for n=4, omega=1, J=0.5")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    npts = max(3, int(math.ceil(horizon / step)) + 1)
    grid = np.linspace(0.0, horizon, npts)
    vals = transfer_probability_closed_form(grid, c)
    i = int(np.flatnonzero(vals >= vals.max() - 1e-12)[0])
    t_best, p_best = float(grid[i]), float(vals[i])
    if 0 < i < npts - 1:
        res = minimize_scalar(
            lambda t: -float(transfer_probability_closed_form(t, c)),
            bracket=(grid[i - 1], grid[i], grid[i + 1]),
            method="golden",
            tol=1e-12,
        )
        if -res.fun >= p_best:
            t_best, p_best = float(res.x), float(-res.fun)
    return TransferResult(t_best, float(c), p_best)
