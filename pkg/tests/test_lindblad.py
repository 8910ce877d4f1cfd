import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cca_transport.detection import transfer_probability_closed_form
from cca_transport.errors import NumericalGuardError
from cca_transport.lindblad import (
    DensityMatrix,
    LossParams,
    dissipative_transfer_probability,
    initial_density,
    integrate,
    lindblad_rhs,
    subspace_labels,
    transfer_sweep,
)
from cca_transport.reproduce import fig11_thetas
from cca_transport.spectral import ModelParams, build_spectral, single_particle_propagator

P3 = ModelParams(3, 1.0, 0.5)


def _diag(*entries):
    return np.diag(np.array(entries, dtype=complex))


def test_subspace_labels():
    assert subspace_labels(3) == [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]


def test_initial_density_structure():
    th = 0.3
    rho = initial_density(th, 3).matrix
    s, c = math.sin(th), math.cos(th)
    expected = np.zeros((4, 4))
    expected[1:3, 1:3] = [[s * s, s * c], [s * c, c * c]]
    np.testing.assert_allclose(rho, expected, atol=1e-15)


def test_rhs_is_traceless_without_loss():
    out = lindblad_rhs(initial_density(0.7, 3), P3, LossParams(0.0))
    assert abs(np.trace(out)) < 1e-15
    np.testing.assert_allclose(out, out.conj().T, atol=1e-15)


def test_rhs_decay_of_single_site_without_hopping():
    out = lindblad_rhs(_diag(0, 1, 0, 0), ModelParams(3, 1.0, 0.0), LossParams(0.2))
    np.testing.assert_allclose(np.diag(out).real, [0.2, -0.2, 0, 0], atol=1e-15)


def _random_density(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


@given(seed=st.integers(0, 2**32 - 1), gamma=st.floats(0, 2))
@settings(max_examples=30, deadline=None)
def test_rhs_preserves_trace_and_hermiticity(seed, gamma):
    rho = _random_density(np.random.default_rng(seed), 5)
    out = lindblad_rhs(rho, ModelParams(4), LossParams(gamma))
    assert abs(np.trace(out)) < 1e-12
    np.testing.assert_allclose(out, out.conj().T, atol=1e-12)


def test_rhs_shape_check():
    with pytest.raises(ValueError):
        lindblad_rhs(np.eye(3), P3, LossParams(0.1))


def test_uncoupled_site_decays_exponentially():
    gamma = 0.3
    times = np.linspace(0, 5, 11)
    traj = integrate(_diag(0, 0, 1, 0), ModelParams(3, 1.0, 0.0), LossParams(gamma), 5.0, 1e-3, times)
    pops = traj.states[:, 2, 2].real
    np.testing.assert_allclose(pops, np.exp(-gamma * times), atol=1e-10)
    np.testing.assert_allclose(traj.states[:, 0, 0].real, 1 - np.exp(-gamma * times), atol=1e-10)


def test_zero_duration_returns_initial_state():
    rho0 = initial_density(0.4, 3)
    traj = integrate(rho0, P3, LossParams(0.1), 0.0)
    np.testing.assert_allclose(traj.states[-1], rho0.matrix, atol=0)


def test_guard_trips_on_unstable_step():
    with pytest.raises(NumericalGuardError):
        integrate(initial_density(0.4, 3), ModelParams(3, 1.0, 5.0), LossParams(0.1), 50.0, dt=1.0)


def test_integrate_argument_validation():
    rho0 = initial_density(0.4, 3)
    with pytest.raises(ValueError):
        integrate(rho0, P3, LossParams(0.1), 1.0, dt=0.0)
    with pytest.raises(ValueError):
        integrate(rho0, P3, LossParams(0.1), 1.0, sample_times=[0.5, 0.2])
    with pytest.raises(ValueError):
        integrate(rho0, P3, LossParams(0.1), 1.0, sample_times=[2.0])
    with pytest.raises(ValueError):
        LossParams(-0.1)


def test_trajectory_invariants_and_monotone_excitation():
    times = np.linspace(0, 60, 121)
    traj = integrate(initial_density(0.9, 3), P3, LossParams(0.1), 60.0, 1e-3, times)
    d = traj.diagnostics()
    assert d["max_trace_drift"] < 1e-10
    assert d["max_hermiticity_error"] < 1e-12
    assert d["min_eigenvalue"] > -1e-10
    excitation = 1 - traj.states[:, 0, 0].real
    assert np.all(np.diff(excitation) <= 1e-12)
    assert traj.density(-1).site_populations().sum() == pytest.approx(excitation[-1], abs=1e-12)


def test_lossless_populations_match_unitary_evolution():
    times = np.linspace(0, 100, 41)
    spec = build_spectral(P3)
    for th in (0.2, math.pi / 4, 1.3):
        traj = integrate(initial_density(th, 3), P3, LossParams(0.0), 100.0, 1e-3, times)
        psi0 = initial_density(th, 3).matrix[1:, 1:]
        for i, t in enumerate(times):
            u = single_particle_propagator(spec, t)
            expected = np.diag(u @ psi0 @ u.conj().T).real
            np.testing.assert_allclose(traj.states[i].diagonal().real[1:], expected, atol=1e-8)


def test_lossless_four_site_transfer_matches_closed_form():
    params = ModelParams(4, 1.0, 0.5)
    th = math.pi / 4
    for t in (5.0, 30.0):
        p = dissipative_transfer_probability(th, params, LossParams(0.0), t)
        assert p == pytest.approx(float(transfer_probability_closed_form(t, 1.0)), abs=1e-8)


def test_fig11_argmax_and_decay():
    thetas = fig11_thetas()
    step = thetas[1] - thetas[0]
    values, traj = transfer_sweep(thetas, P3, LossParams(0.1), [10.0, 100.0])
    for row in values:
        assert abs(thetas[int(np.argmax(row))] - math.pi / 4) <= step
    assert values[0].max() > values[1].max()
    assert traj.min_eigenvalue > -1e-8


def test_transfer_grows_with_concurrence_below_quarter_pi():
    thetas = np.linspace(0.05, math.pi / 4, 12)
    values, _ = transfer_sweep(thetas, P3, LossParams(0.1), [10.0])
    assert np.all(np.diff(values[0]) > 0)


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(_diag(0.5, 0.5, 0.1, 0))
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[0.5, 0.1j], [0.1j, 0.5]]))
    bad = _diag(0.5, 0.5, 0, 0)
    bad[0, 1] = 0.3
    with pytest.raises(ValueError):
        DensityMatrix(bad)
    with pytest.raises(ValueError):
        DensityMatrix(_diag(1.2, -0.2, 0, 0))
    assert DensityMatrix(_diag(0, 0.25, 0.75, 0)).n == 3
