import math

import numpy as np
import pytest

from pbl.exceptions import AlignmentError, ConfigurationError, InsufficientSupportError
from pbl.models.results import BlowUp
from pbl.services import closed_form
from pbl.services.coefficients import CertifiedBounds, envelope_for, make_gamma
from pbl.services.integrator import (
    DriftSpec,
    flow_states,
    integrate,
    pullback_grid,
    pullback_state,
    pullback_states,
    self_convergence,
    strong_order,
)


def pitchfork(beta, lam=1.0, delta=0.0, **kw):
    return DriftSpec(family="pitchfork", lam=lam, delta=delta, beta=beta, **kw)


def test_linear_growth(omega_zero):
    traj = integrate(DriftSpec.from_expression("x"), omega_zero, 0.0, 1.0, 1.0, step=1e-3)
    assert traj.status == "complete"
    assert traj.final == pytest.approx(math.e, abs=1e-4)
    assert traj.times[0] == 0.0 and traj.times[-1] == pytest.approx(1.0)


def test_reverse_time(omega_zero):
    traj = integrate(DriftSpec.from_expression("x"), omega_zero, 1.0, 0.0, math.e, step=1e-3)
    assert traj.final == pytest.approx(1.0, abs=1e-4)
    assert traj.times[-1] < traj.times[0]


def test_pitchfork_equilibrium(omega_zero, beta_one):
    assert integrate(pitchfork(beta_one), omega_zero, 0.0, 20.0, 0.5).final == pytest.approx(1.0, abs=1e-4)


def test_matches_closed_form_on_sampled_path(omega7, beta_periodic):
    drift = pitchfork(beta_periodic, lam=1.0, delta=0.5)
    numeric = integrate(drift, omega7, 0.0, 5.0, 0.5).final
    exact = closed_form.exact_pitchfork(1.0, 0.5, beta_periodic, omega7, 0.0, 5.0, 0.5)
    assert numeric == pytest.approx(exact, abs=1e-2)


def test_transcritical_blowup(omega_zero, beta_one):
    drift = DriftSpec(family="transcritical", lam=1.0, beta=beta_one)
    traj = integrate(drift, omega_zero, 0.0, 3.0, -1.0, step=1e-3)
    assert traj.blew_up
    assert np.all(np.isfinite(traj.states))
    assert traj.blowup.t_star == pytest.approx(math.log(2.0), abs=0.02)
    exact = closed_form.exact_transcritical(1.0, 0.0, beta_one, omega_zero, 0.0, 3.0, -1.0)
    assert isinstance(exact, BlowUp)
    assert abs(exact.t_star - traj.blowup.t_star) < 0.02


def test_blowup_is_reported_per_column(omega_zero, beta_one):
    drift = DriftSpec(family="transcritical", lam=1.0, beta=beta_one)
    finals = flow_states(drift, omega_zero, 0.0, 3.0, [0.5, -1.0])
    assert finals[0] == pytest.approx(1.0, abs=0.1)
    assert isinstance(finals[1], BlowUp)


def test_comparison_with_linear_envelope(omega7, beta_one):
    envelope = envelope_for(1.0, CertifiedBounds(1.0, 1.0, 0.0, 0.0))
    traj = integrate(pitchfork(beta_one, delta=0.5), omega7, -5.0, 5.0, 0.8)
    for t, x in zip(traj.times[::1000], traj.states[::1000]):
        y = closed_form.linear_solution(envelope.nu, 0.5, envelope.g, envelope.h, omega7, -5.0, t, 0.8)
        assert abs(x) <= y


def test_pullback_grid_matches_single_runs(omega7, beta_periodic):
    drift = pitchfork(beta_periodic, delta=0.5)
    grid = pullback_grid(drift, omega7, 0.5, [1.0, 2.0, 4.0], [-1.0, 2.0])
    for t, row in zip([1.0, 2.0, 4.0], grid):
        single = pullback_states(drift, omega7, 0.5, t, [-1.0, 2.0])
        np.testing.assert_allclose(row, single, rtol=1e-12)


def test_step_alignment(omega_zero, beta_one):
    with pytest.raises(AlignmentError):
        integrate(pitchfork(beta_one), omega_zero, 0.0, 1.0, 0.5, step=0.015)
    with pytest.raises(AlignmentError):
        integrate(pitchfork(beta_one), omega_zero, 0.0, 1.0, 0.5, step=0.003)


def test_window_outside_support(omega7, beta_one):
    with pytest.raises(InsufficientSupportError) as info:
        integrate(pitchfork(beta_one), omega7, 0.0, 50.0, 0.5)
    assert info.value.required_window[1] >= 50.0


def test_strong_order():
    assert strong_order([1e-2, 2.5e-3, 6.25e-4], [0.1, 0.05, 0.025]) == pytest.approx(2.0)
    with pytest.raises(ConfigurationError):
        strong_order([1e-2], [0.1])


def test_self_convergence_order(omega_zero):
    report = self_convergence(DriftSpec.from_expression("x"), omega_zero, 0.0, 1.0, 1.0, [0.01, 0.005, 0.0025], math.e)
    assert report["steps"] == [0.01, 0.005, 0.0025]
    assert report["errors"][0] > report["errors"][-1]
    assert report["order"] > 1.5


def test_drift_validation(beta_one):
    with pytest.raises(ConfigurationError):
        DriftSpec(family="pitchfork", lam=1.0, beta=beta_one, gamma=make_gamma("zero", variant="transcritical"))
    with pytest.raises(ConfigurationError):
        DriftSpec(family="transcritical", lam=1.0, beta=beta_one, forcing=lambda t: 0.0 * t)
    with pytest.raises(ConfigurationError):
        DriftSpec(family="custom")
    with pytest.raises(ConfigurationError):
        DriftSpec(family="pitchfork", lam=1.0)


def test_period_of_periodic_drift(beta_periodic):
    assert pitchfork(beta_periodic).period == pytest.approx(2.0 * math.pi)
    assert DriftSpec.from_expression("x").period is None


def test_pullback_state_matches_closed_form(omega7, beta_periodic):
    drift = pitchfork(beta_periodic, lam=1.0, delta=0.5)
    value = pullback_state(drift, omega7, 0.5, 10.0, 0.8, 1e-3)
    exact = closed_form.exact_pullback_pitchfork(1.0, 0.5, beta_periodic, omega7, 0.5, 10.0, 0.8)
    assert value == pytest.approx(exact, abs=1e-2)
    assert pullback_state(drift, omega7, 0.5, 0.0, 0.8) == 0.8
    with pytest.raises(ConfigurationError):
        pullback_state(drift, omega7, 0.5, -1.0, 0.8)
