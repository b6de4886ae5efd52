import math

import numpy as np
import pytest

from pbl.exceptions import ConfigurationError, CoverageError
from pbl.services import closed_form, cocycle
from pbl.services.cocycle import CocycleHandle, closed_form_handle, integrator_handle
from pbl.services.integrator import DriftSpec
from pbl.services.wiener import TimeGrid, shift, zero_path


@pytest.fixture
def pitchfork7(beta_periodic):
    return closed_form_handle("pitchfork", 1.0, 0.5, beta_periodic)


@pytest.fixture
def pitchfork0(beta_one):
    return closed_form_handle("pitchfork", 1.0, 0.0, beta_one)


def test_identity_axiom_is_checked():
    with pytest.raises(ConfigurationError):
        CocycleHandle(
            flow=lambda path, t0, t1, xs, offset: [x + 1.0 for x in xs],
            family="custom", kind="integrator", coefficients={}, tolerance=1e-6,
        )
    with pytest.raises(ConfigurationError):
        closed_form_handle("custom", 1.0, 0.0)


def test_cocycle_law_closed_form(pitchfork7, omega7):
    report = cocycle.check_cocycle_law(pitchfork7, omega7, 0.5, 2.0, 1.5, 0.8)
    assert report.verdict == "pass"
    assert report.residual < 1e-10


def test_cocycle_law_integrator(omega7, beta_periodic):
    handle = integrator_handle(DriftSpec(family="pitchfork", lam=1.0, delta=0.5, beta=beta_periodic))
    report = cocycle.check_cocycle_law(handle, omega7, 0.5, 2.0, 1.5, 0.8)
    assert report.passed
    assert report.residual < 1e-9


def test_cocycle_law_with_blowup(omega7, beta_periodic):
    handle = closed_form_handle("transcritical", 1.0, 0.5, beta_periodic)
    report = cocycle.check_cocycle_law(handle, omega7, 0.0, 2.0, 1.5, -5.0)
    assert report.verdict == "pass"
    assert report.residual == 0.0


def test_handle_matches_phi(pitchfork7, omega7, beta_periodic):
    direct = closed_form.pitchfork_phi(1.0, 0.5, beta_periodic, omega7, 2.0, 0.5, 0.8)
    assert pitchfork7(2.0, 0.5, omega7, 0.8) == direct
    assert pitchfork7(0.0, 0.5, omega7, 0.8) == 0.8


def test_quasi_solution_identity(pitchfork7, omega7, beta_periodic):
    generator = closed_form.pitchfork_generator(1.0, 0.5, beta_periodic)
    report = cocycle.check_quasi_solution(pitchfork7, generator, omega7, [(1.0, 0.0), (2.0, -1.0), (0.5, 3.0)])
    assert report.verdict == "pass"
    assert len(report.details["samples"]) == 3


def test_zero_is_a_quasi_solution(pitchfork7, omega7):
    report = cocycle.check_quasi_solution(pitchfork7, closed_form.zero_generator, omega7, [(1.0, 0.0)])
    assert report.residual == 0.0


def test_periodic_cocycle(pitchfork7, omega7):
    assert pitchfork7.period == pytest.approx(2.0 * math.pi)
    report = cocycle.check_periodic_cocycle(pitchfork7, omega7, 0.3, 2.0, pitchfork7.period, 0.8)
    assert report.verdict == "pass"


def test_pullback_limit_reaches_equilibrium(pitchfork0, omega_zero):
    result = cocycle.pullback_limit(pitchfork0, omega_zero, 0.0, 3.0)
    assert result.converged
    assert result.limit == pytest.approx(1.0, abs=1e-8)
    assert result.history[0][0] == 5.0


def test_pullback_limit_reports_divergence(omega_zero, beta_one):
    handle = closed_form_handle("transcritical", 1.0, 0.0, beta_one)
    result = cocycle.pullback_limit(handle, omega_zero, 0.0, -5.0)
    assert result.diverged
    assert not result.converged
    assert result.limit is None


def test_pullback_schedule_must_increase(pitchfork0, omega_zero):
    with pytest.raises(ConfigurationError):
        cocycle.pullback_limit(pitchfork0, omega_zero, 0.0, 1.0, schedule=[10.0, 5.0])


def test_pullback_compact(pitchfork0, omega_zero):
    report = cocycle.pullback_compact(pitchfork0, omega_zero, 0.0, (0.1, 3.0))
    assert report.verdict == "pass"
    np.testing.assert_allclose(report.details["limits"], [1.0, 1.0], atol=1e-6)


def test_attractor_endpoints_zero_noise(pitchfork0, omega_zero):
    interval = cocycle.attractor_endpoints(pitchfork0, lambda tau, path: 3.0, omega_zero, 0.0)
    assert interval.upper == pytest.approx(1.0, abs=1e-6)
    assert interval.lower == pytest.approx(-1.0, abs=1e-6)
    assert interval.iterations == len(interval.schedule)


def test_attractor_endpoints_match_quasi_solutions(pitchfork7, omega7, beta_periodic):
    interval = cocycle.attractor_endpoints(pitchfork7, lambda tau, path: 3.0, omega7, 0.0)
    x_plus = closed_form.quasi_pitchfork(1.0, 0.5, beta_periodic, omega7, 0.0).x_plus
    assert interval.upper == pytest.approx(x_plus, rel=1e-6)
    assert interval.lower == pytest.approx(-x_plus, rel=1e-6)
    assert all(b <= a for a, b in zip(interval.upper_history, interval.upper_history[1:]))


def test_attractor_invariance(pitchfork7, omega7):
    def interval_at(tau, path):
        return cocycle.attractor_endpoints(pitchfork7, lambda at, p: 3.0, path, tau)

    report = cocycle.check_invariance(pitchfork7, interval_at, omega7, 0.0, 1.0, tol=1e-5)
    assert report.verdict == "pass"


def test_temperedness_of_bounded_profile():
    ts = np.linspace(-100.0, 0.0, 1001)
    report = cocycle.temperedness_check(ts, np.ones_like(ts), 1.0, (-100.0, 0.0))
    assert report.verdict == "pass"
    assert report.details["decreasing"]


def test_temperedness_detects_exponential_growth():
    ts = np.linspace(-100.0, 0.0, 1001)
    report = cocycle.temperedness_check(ts, np.exp(-2.0 * ts), 1.0, (-100.0, 0.0))
    assert report.verdict == "fail"


def test_temperedness_needs_coverage():
    ts = np.linspace(-50.0, 0.0, 11)
    with pytest.raises(CoverageError):
        cocycle.temperedness_check(ts, np.ones_like(ts), 1.0, (-100.0, 0.0))


def test_tempered_profile_of_quasi_solution(pitchfork7, omega7, beta_periodic):
    generator = closed_form.pitchfork_generator(1.0, 0.5, beta_periodic)
    ts = np.arange(-20.0, 0.01, 5.0)
    values = cocycle.tempered_profile(generator, omega7, 0.0, ts)
    assert values.shape == ts.shape
    assert values[-1] == pytest.approx(generator(0.0, omega7))
    assert values[0] == pytest.approx(generator(-20.0, shift(omega7, -20.0)))


def test_stability_of_zero(omega_zero, beta_one):
    stable = cocycle.stability_probe(closed_form_handle("pitchfork", -1.0, 0.0, beta_one), omega_zero, 0.0, eps_grid=(0.1,))
    assert stable["verdict"] == "asymptotically_stable"
    assert cocycle.is_stable(stable["verdict"])

    unstable = cocycle.stability_probe(closed_form_handle("pitchfork", 1.0, 0.0, beta_one), omega_zero, 0.0, eps_grid=(0.1,))
    assert unstable["verdict"] == "unstable"
    assert unstable["deltas"]["0.1"] is None
    assert not cocycle.is_stable(unstable["verdict"])


@pytest.fixture(scope="module")
def long_zero_path():
    return zero_path(TimeGrid.span(-3000.0, 10.0, 0.01))


@pytest.mark.parametrize("lam", [0.01, 0.1])
def test_slow_instability_extends_the_horizon(lam, long_zero_path, beta_one):
    stability = cocycle.stability_probe(closed_form_handle("pitchfork", lam, 0.0, beta_one), long_zero_path, 0.0)
    assert stability["verdict"] == "unstable"
    assert stability["schedule"][-1] > 40.0
    assert not cocycle.is_stable(stability["verdict"])


def test_horizon_stays_put_when_zero_attracts(omega_zero, beta_one):
    stability = cocycle.stability_probe(closed_form_handle("pitchfork", -1.0, 0.0, beta_one), omega_zero, 0.0)
    assert stability["schedule"] == [5.0, 10.0, 20.0, 40.0]

def test_stability_domain_is_validated(pitchfork0, omega_zero):
    with pytest.raises(ConfigurationError):
        cocycle.stability_probe(pitchfork0, omega_zero, 0.0, domain="negative")
