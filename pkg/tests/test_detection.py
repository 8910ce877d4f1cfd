import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cca_transport.detection import (
    REFERENCE_TRANSFER_PARAMS,
    find_noon_times,
    find_w_times,
    peak_transfer_search,
    transfer_probability_closed_form,
    transfer_probability_numeric,
)
from cca_transport.errors import PeriodUnavailableError
from cca_transport.spectral import ModelParams, build_spectral, single_particle_propagator
from cca_transport.states import fock_product_state, weak_coherent_product

P3 = ModelParams(3, 1.0, 0.5)
SQ2 = math.sqrt(2.0)
NOON_TIME = math.pi / SQ2
WINDOW = SQ2 * math.pi

CASES = {
    "case1": (0.1j, 0.1j, 0.1j),
    "case2": (0.01j, 0.1j, 0.01j),
    "case3": (0.1j, 0.01j, 0.1j),
}


def _contains(times, target, tol=1e-3):
    return any(abs(t - target) < tol for t in times)


def test_single_photon_middle_input_events():
    state = fock_product_state(3, (0, 1, 0))
    w = find_w_times(state, P3, 1)
    noon = find_noon_times(state, P3, 1)
    assert w.times == pytest.approx([1.3511, 3.0919], abs=1e-3)
    assert noon.times == pytest.approx([NOON_TIME], abs=1e-3)
    assert w.probability_at_event == pytest.approx([1 / 3, 1 / 3], abs=1e-9)
    assert noon.probability_at_event == pytest.approx([0.5], abs=1e-9)
    assert w.period == pytest.approx(2 * WINDOW, rel=1e-12)
    assert w.window == pytest.approx(WINDOW, rel=1e-9)


def test_two_photon_middle_input_events():
    state = fock_product_state(3, (0, 2, 0))
    assert find_w_times(state, P3, 2).times == pytest.approx([1.3511, 3.0919], abs=1e-3)
    noon = find_noon_times(state, P3, 2)
    assert noon.times == pytest.approx([NOON_TIME], abs=1e-3)
    assert noon.probability_at_event == pytest.approx([0.25], abs=1e-9)


@pytest.mark.parametrize("case", sorted(CASES))
def test_coherent_three_photon_w_time(case):
    state = weak_coherent_product(CASES[case])
    assert _contains(find_w_times(state, P3, 3).times, 1.7408)


@pytest.mark.parametrize("case", sorted(CASES))
def test_coherent_two_photon_events_absent(case):
    state = weak_coherent_product(CASES[case])
    assert not find_w_times(state, P3, 2).found
    assert not find_noon_times(state, P3, 2).found


def test_coherent_single_photon_entries():
    c2 = weak_coherent_product(CASES["case2"])
    c3 = weak_coherent_product(CASES["case3"])
    assert _contains(find_w_times(c2, P3, 1).times, 1.3612)
    assert _contains(find_w_times(c3, P3, 1).times, 0.8679)
    assert _contains(find_noon_times(c2, P3, 1).times, NOON_TIME)
    c3_noon = find_noon_times(c3, P3, 1)
    assert c3_noon.found
    assert all(min(t % WINDOW, WINDOW - t % WINDOW) < 1e-3 for t in c3_noon.times)
    assert all(e.at_initial_time for e in c3_noon.events)


def test_uniform_coherent_input_is_w_at_start():
    report = find_w_times(weak_coherent_product(CASES["case1"]), P3, 1)
    assert report.times == pytest.approx([0.0], abs=1e-9)
    assert report.events[0].at_initial_time
    assert not find_noon_times(weak_coherent_product(CASES["case1"]), P3, 1).found


def test_events_satisfy_condition_within_tolerance():
    for state, k in [(fock_product_state(3, (0, 1, 0)), 1), (weak_coherent_product(CASES["case2"]), 1)]:
        for finder in (find_w_times, find_noon_times):
            report = finder(state, P3, k)
            assert report.found
            assert report.condition_residual < report.tol
            assert all(0 <= e.time < report.window for e in report.events)


def test_noon_conditional_probability_on_edges_is_half_for_fock_input():
    ev = find_noon_times(fock_product_state(3, (0, 1, 0)), P3, 1).events[0]
    assert ev.conditional_probability == pytest.approx(0.5, abs=1e-9)


def test_grid_refinement_is_stable():
    state = weak_coherent_product(CASES["case3"])
    for finder in (find_w_times, find_noon_times):
        coarse = finder(state, P3, 1)
        fine = finder(state, P3, 1, points_per_period=8001)
        assert len(coarse.times) == len(fine.times)
        np.testing.assert_allclose(coarse.times, fine.times, atol=10 * coarse.tol)


def test_empty_sector_reports_nothing():
    state = fock_product_state(3, (0, 1, 0))
    assert not find_w_times(state, P3, 2).found
    assert not find_noon_times(state, P3, 2).found


def test_detection_argument_validation():
    state = fock_product_state(3, (0, 1, 0))
    with pytest.raises(ValueError):
        find_w_times(fock_product_state(4, (0, 1, 0, 0)), ModelParams(4), 1)
    with pytest.raises(ValueError):
        find_w_times(state, P3, 0)
    with pytest.raises(ValueError):
        find_noon_times(state, P3, 1, tol=0.0)


def test_stationary_spectrum_has_no_window():
    # three-site gaps are always in ratio 1:2, so the only failure mode here is J = 0
    with pytest.raises(PeriodUnavailableError):
        find_w_times(fock_product_state(3, (0, 1, 0)), ModelParams(3, 1.0, 0.0), 1)


# closed-form transfer probability

def test_transfer_closed_form_examples():
    assert transfer_probability_closed_form(0.0, 1.0) == pytest.approx(0.0, abs=1e-15)
    t = 2 * math.pi
    fast = math.sqrt(5) * t / 4
    expected = 0.2 * (5 * math.cos(fast) ** 2 + 4 * math.sin(fast) ** 2)
    assert transfer_probability_closed_form(t, 1.0) == pytest.approx(expected, abs=1e-14)
    with pytest.raises(ValueError):
        transfer_probability_closed_form(1.0, 1.5)


@given(t=st.floats(0, 200), c1=st.floats(0, 1), c2=st.floats(0, 1))
@settings(max_examples=100, deadline=None)
def test_transfer_is_nondecreasing_in_concurrence(t, c1, c2):
    lo, hi = sorted((c1, c2))
    assert transfer_probability_closed_form(t, lo) <= transfer_probability_closed_form(t, hi) + 1e-15


def test_transfer_numeric_matches_closed_form_grid():
    thetas = np.linspace(0.01, math.pi / 2 - 0.01, 12)
    times = np.linspace(0, 120, 15)
    for th in thetas:
        for t in times:
            r = transfer_probability_numeric(th, REFERENCE_TRANSFER_PARAMS, t)
            assert r.probability == pytest.approx(
                float(transfer_probability_closed_form(t, r.concurrence)), abs=1e-9
            )


def test_transfer_numeric_small_theta_limit():
    # as theta -> 0 the pair is a single photon on site 2 moving to site 4
    t = 7.3
    u = single_particle_propagator(build_spectral(REFERENCE_TRANSFER_PARAMS), t)
    r = transfer_probability_numeric(1e-9, REFERENCE_TRANSFER_PARAMS, t)
    assert r.probability == pytest.approx(abs(u[3, 1]) ** 2, abs=1e-12)


def test_peak_search_full_concurrence():
    r = peak_transfer_search(1.0)
    assert r.t == pytest.approx(106.7957, abs=1e-3)
    assert r.probability >= 0.9999


def test_peak_search_zero_concurrence_bound():
    r = peak_transfer_search(0.0)
    assert r.probability <= 0.8 + 1e-6


def test_peak_search_rejects_other_params():
    with pytest.raises(ValueError):
        peak_transfer_search(1.0, params=ModelParams(4, 1.0, 0.3))
    with pytest.raises(ValueError):
        peak_transfer_search(1.0, horizon=0.0)
