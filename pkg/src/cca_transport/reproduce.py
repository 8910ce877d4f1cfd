"""Canned scenarios regenerating the data behind each figure and table.

Every target uses omega = 1 and J = 0.5 and returns ``(header, rows)`` ready
for :func:`cca_transport.output.write_csv`.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .detection import (
    find_noon_times,
    find_w_times,
    transfer_probability_closed_form,
)
from .evolution import closed_form_survival, probability_series, survival_probability
from .fock_space import enumerate_sector
from .lindblad import LossParams, transfer_sweep
from .output import occupation_label
from .spectral import ModelParams, build_spectral, evolution_period
from .states import fock_product_state, weak_coherent_product

PARAMS3 = ModelParams(3, 1.0, 0.5)
PARAMS4 = ModelParams(4, 1.0, 0.5)
GRID_POINTS = 2001
PEAK_TRANSFER_TIME = 106.7957

COHERENT_CASES = {
    "case1": (0.1j, 0.1j, 0.1j),
    "case2": (0.01j, 0.1j, 0.01j),
    "case3": (0.1j, 0.01j, 0.1j),
}


def fig11_thetas(points: int = 181) -> np.ndarray:
    """Midpoint grid on (0, pi/2); pi/4 is a grid point whenever ``points`` is odd."""
    return (np.arange(points) + 0.5) * (math.pi / 2) / points


def _period() -> float:
    return evolution_period(build_spectral(PARAMS3))


def _series_table(states: dict, labels) -> tuple[list[str], list[list]]:
    times = np.linspace(0.0, _period(), GRID_POINTS)
    header = ["t"]
    columns = []
    for name, state in states.items():
        series = probability_series(state, PARAMS3, times, labels)
        for j, lab in enumerate(series.labels):
            header.append(f"{name}_p{occupation_label(lab)}" if name else f"p{occupation_label(lab)}")
            columns.append(series.probabilities[:, j])
    rows = [[t, *(c[i] for c in columns)] for i, t in enumerate(times)]
    return header, rows


def _site_labels(k: int):
    return [(k, 0, 0), (0, k, 0), (0, 0, k)]


def fig1():
    times = np.linspace(0.0, 2 * _period(), GRID_POINTS)
    cols = [survival_probability((m, 0, 0), PARAMS3, times) for m in range(1, 5)]
    return ["t", "P31", "P32", "P33", "P34"], [[t, *(c[i] for c in cols)] for i, t in enumerate(times)]


def fig2():
    times = np.linspace(0.0, 2 * _period(), GRID_POINTS)
    p = closed_form_survival(3000, PARAMS3, times)
    return ["t", "P3_3000"], [[t, v] for t, v in zip(times, p)]


def _coherent_fig(k: int):
    states = {name: weak_coherent_product(a) for name, a in COHERENT_CASES.items()}
    return _series_table(states, _site_labels(k))


def fig3():
    return _coherent_fig(1)


def fig4():
    states = {name: weak_coherent_product(a) for name, a in COHERENT_CASES.items()}
    return _series_table(states, enumerate_sector(3, 2).states)


def fig5():
    return _coherent_fig(3)


def fig6():
    states = {
        "alpha0.1i": weak_coherent_product((0.1j,) * 3),
        "alpha0.5i": weak_coherent_product((0.5j,) * 3),
    }
    return _series_table(states, _site_labels(1))


def fig7():
    return _series_table({"": fock_product_state(3, (0, 1, 0))}, _site_labels(1))


def fig8():
    return _series_table({"": fock_product_state(3, (0, 2, 0))}, enumerate_sector(3, 2).states)


def fig9():
    times = np.linspace(0.0, 120.0, 1201)
    rows = []
    for c in np.linspace(0.0, 1.0, 11):
        p = transfer_probability_closed_form(times, c)
        rows.extend([t, c, v] for t, v in zip(times, p))
    return ["t", "C", "p"], rows


def fig10():
    cs = np.linspace(0.0, 1.0, 101)
    p = transfer_probability_closed_form(PEAK_TRANSFER_TIME, cs)
    return ["t", "C", "p"], [[PEAK_TRANSFER_TIME, c, v] for c, v in zip(cs, p)]


def fig11():
    gamma = 0.1
    thetas = fig11_thetas()
    times = [10.0, 100.0]
    values, _ = transfer_sweep(thetas, PARAMS3, LossParams(gamma), times)
    rows = [[t, th, gamma, values[i, b]] for i, t in enumerate(times) for b, th in enumerate(thetas)]
    return ["t", "theta", "gamma", "p"], rows


def detection_rows(state, photons) -> list[list]:
    rows = []
    for k in photons:
        for finder in (find_w_times, find_noon_times):
            report = finder(state, PARAMS3, k)
            if not report.found:
                rows.append([report.event_kind, k, "none", None])
            for ev in report.events:
                rows.append([report.event_kind, k, ev.time, ev.probability])
    return rows


def table1():
    rows = []
    for name, alphas in COHERENT_CASES.items():
        rows.extend([name, *r] for r in detection_rows(weak_coherent_product(alphas), (1, 2, 3)))
    return ["case", "kind", "photons", "time", "probability"], rows


def table2():
    return ["kind", "photons", "time", "probability"], detection_rows(fock_product_state(3, (0, 1, 0)), (1,))


def table3():
    return ["kind", "photons", "time", "probability"], detection_rows(fock_product_state(3, (0, 2, 0)), (2,))


TARGETS: dict[str, Callable[[], tuple[list[str], list[list]]]] = {
    "fig1": fig1,
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
    "fig6": fig6,
    "fig7": fig7,
    "fig8": fig8,
    "fig9": fig9,
    "fig10": fig10,
    "fig11": fig11,
    "table1": table1,
    "table2": table2,
    "table3": table3,
}
