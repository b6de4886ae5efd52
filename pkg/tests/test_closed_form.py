import math

import numpy as np
import pytest
from scipy import optimize

from pbl.exceptions import DomainError, IncompatibleCoefficientsError
from pbl.models.results import BlowUp
from pbl.services import closed_form
from pbl.services.coefficients import CertifiedBounds, constant_fn, make_beta
from pbl.services.quadrature import QuadratureSpec


# ----- pitchfork -----

def test_zero_is_fixed(omega7, beta_periodic):
    assert closed_form.exact_pitchfork(1.0, 0.5, beta_periodic, omega7, 0.0, 5.0, 0.0) == 0.0
    assert closed_form.exact_transcritical(1.0, 0.5, beta_periodic, omega7, 0.0, 5.0, 0.0) == 0.0


def test_pitchfork_equilibrium(omega_zero, beta_one):
    assert closed_form.exact_pitchfork(1.0, 0.7, beta_one, omega_zero, 0.0, 20.0, 0.3) == pytest.approx(1.0, abs=1e-6)


def test_pullback_pitchfork(omega_zero, beta_one):
    assert closed_form.exact_pullback_pitchfork(4.0, 0.0, beta_one, omega_zero, 0.0, 20.0, 1.0) == pytest.approx(2.0, abs=1e-6)
    assert closed_form.exact_pullback_pitchfork(4.0, 0.0, beta_one, omega_zero, 3.0, 0.0, 0.7) == 0.7
    assert closed_form.exact_pullback_pitchfork(4.0, 0.0, beta_one, omega_zero, 3.0, 10.0, 0.0) == 0.0


def test_pitchfork_is_odd(omega7, beta_periodic):
    up = closed_form.exact_pitchfork(1.0, 0.5, beta_periodic, omega7, 0.0, 5.0, 0.5)
    down = closed_form.exact_pitchfork(1.0, 0.5, beta_periodic, omega7, 0.0, 5.0, -0.5)
    assert down == -up
    assert up > 0


def test_pitchfork_flow_property(omega7, beta_periodic):
    direct = closed_form.exact_pitchfork(1.0, 0.5, beta_periodic, omega7, -3.0, 5.0, 0.5)
    mid = closed_form.exact_pitchfork(1.0, 0.5, beta_periodic, omega7, -3.0, 1.25, 0.5)
    composed = closed_form.exact_pitchfork(1.0, 0.5, beta_periodic, omega7, 1.25, 5.0, mid)
    assert composed == pytest.approx(direct, rel=1e-9)


@pytest.mark.parametrize("lam,b,expected", [(1.0, 4.0, 0.5), (0.1, 1.0, math.sqrt(0.1)), (4.0, 1.0, 2.0)])
def test_quasi_pitchfork_constant_beta(omega_zero, lam, b, expected):
    q = closed_form.quasi_pitchfork(lam, 0.3, make_beta("constant", {"b": b}), omega_zero, 0.0)
    assert q.x_plus == pytest.approx(expected, rel=1e-7)
    assert q.x_minus == -q.x_plus


@pytest.mark.parametrize("tau,expected", [(0.0, 1.0 / math.sqrt(3.0)), (math.pi / 2, 1.0 / math.sqrt(5.0))])
def test_quasi_pitchfork_periodic_beta(omega_zero, beta_periodic, tau, expected):
    q = closed_form.quasi_pitchfork(0.5, 0.0, beta_periodic, omega_zero, tau, QuadratureSpec(rel_tol=1e-10))
    assert q.x_plus == pytest.approx(expected, rel=1e-7)


def test_quasi_pitchfork_increases_with_lambda(omega_zero, beta_one):
    values = [closed_form.quasi_pitchfork(lam, 0.0, beta_one, omega_zero, 0.0).x_plus for lam in (0.2, 0.5, 1.0, 2.0)]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_quasi_pitchfork_is_stable_under_refinement(omega7, beta_periodic):
    coarse = closed_form.quasi_pitchfork(1.0, 0.5, beta_periodic, omega7, 0.0, QuadratureSpec(rel_tol=1e-8))
    fine = closed_form.quasi_pitchfork(1.0, 0.5, beta_periodic, omega7, 0.0, QuadratureSpec(rel_tol=1e-12))
    assert fine.truncation >= coarse.truncation
    assert coarse.x_plus == pytest.approx(fine.x_plus, rel=1e-8)


def test_quasi_pitchfork_needs_positive_lambda(omega_zero, beta_one):
    with pytest.raises(DomainError):
        closed_form.quasi_pitchfork(0.0, 0.0, beta_one, omega_zero, 0.0)


def test_pullback_converges_to_quasi_solution(omega7, beta_periodic):
    q = closed_form.quasi_pitchfork(1.0, 0.5, beta_periodic, omega7, 0.0)
    pulled = closed_form.exact_pullback_pitchfork(1.0, 0.5, beta_periodic, omega7, 0.0, 40.0, 2.0)
    assert pulled == pytest.approx(q.x_plus, rel=1e-6)


# ----- sandwich -----

def test_sandwich_bounds(omega_zero):
    lower, upper = closed_form.sandwich_bounds(1.0, 0.0, CertifiedBounds(1.0, 3.0, 0.0, 0.0), omega_zero)
    assert lower == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-9)
    assert upper == pytest.approx(1.0, rel=1e-9)


def test_degenerate_band_matches_quasi_pitchfork(omega_zero, beta_one):
    lower, upper = closed_form.sandwich_bounds(1.0, 0.0, CertifiedBounds(1.0, 1.0, 0.0, 0.0), omega_zero)
    assert lower == upper
    assert upper == pytest.approx(closed_form.quasi_pitchfork(1.0, 0.0, beta_one, omega_zero, 0.0).x_plus, rel=1e-9)


def test_sandwich_contains_quasi_solution(omega7, beta_periodic):
    bounds = CertifiedBounds(beta_periodic.beta_0, beta_periodic.beta_1, 0.0, 0.0)
    for tau in (-2.0, 0.0, 3.0):
        lower, upper = closed_form.sandwich_bounds(1.0, 0.5, bounds, omega7, tau)
        x_plus = closed_form.quasi_pitchfork(1.0, 0.5, beta_periodic, omega7, tau).x_plus
        assert lower <= x_plus <= upper


def test_sandwich_rejects_incompatible_band(omega_zero):
    with pytest.raises(IncompatibleCoefficientsError):
        closed_form.sandwich_bounds(1.0, 0.0, CertifiedBounds(1.0, 2.0, 0.0, 1.0), omega_zero)


# ----- transcritical -----

@pytest.mark.parametrize("lam", [2.0, 0.1, -1.0, -0.1])
def test_quasi_transcritical_constant_beta(omega_zero, beta_one, lam):
    q = closed_form.quasi_transcritical(lam, 0.4, beta_one, omega_zero, 0.0)
    assert q.value == pytest.approx(lam, rel=1e-7)


def test_quasi_transcritical_undefined_at_zero(omega_zero, beta_one):
    with pytest.raises(DomainError):
        closed_form.quasi_transcritical(0.0, 0.0, beta_one, omega_zero, 0.0)


def test_transcritical_equilibrium(omega_zero, beta_one):
    assert closed_form.exact_transcritical(1.0, 0.0, beta_one, omega_zero, 0.0, 20.0, 1.0) == pytest.approx(1.0, abs=1e-6)
    assert closed_form.exact_transcritical(1.0, 0.0, beta_one, omega_zero, 0.0, 20.0, 0.2) == pytest.approx(1.0, abs=1e-6)


def test_transcritical_blowup_matches_denominator_root(omega_zero, beta_one):
    result = closed_form.exact_transcritical(1.0, 0.0, beta_one, omega_zero, 0.0, 5.0, -0.5)
    assert isinstance(result, BlowUp)
    root = optimize.brentq(lambda t: math.exp(-t) - 0.5 * (1.0 - math.exp(-t)), 0.0, 5.0)
    assert root == pytest.approx(math.log(3.0), rel=1e-12)
    lo, hi = result.bracket
    assert lo <= root <= hi
    assert hi - lo == pytest.approx(omega_zero.step)


def test_positive_start_never_blows_up(omega7, beta_periodic):
    for x0 in (1e-3, 1.0, 50.0):
        value = closed_form.exact_transcritical(-1.0, 0.5, beta_periodic, omega7, -10.0, 15.0, x0)
        assert not isinstance(value, BlowUp)
        assert value > 0


def test_transcritical_bracket_collapses_without_gamma(omega7, beta_periodic):
    lower, upper = closed_form.transcritical_bracket(1.0, 0.5, beta_periodic, (0.0, 0.0), omega7, 0.0)
    value = closed_form.quasi_transcritical(1.0, 0.5, beta_periodic, omega7, 0.0).value
    assert lower == upper == value


# ----- linear envelope -----

def test_linear_decay(omega_zero):
    zero = constant_fn(0.0)
    assert closed_form.linear_solution(1.0, 0.5, zero, zero, omega_zero, 2.0, 3.0, 2.0) == pytest.approx(
        2.0 * math.exp(-1.0), rel=1e-12
    )


def test_linear_forcing_limit(omega_zero):
    value = closed_form.linear_solution(1.0, 0.0, constant_fn(0.0), constant_fn(3.0), omega_zero, -40.0, 0.0, 0.0)
    assert value == pytest.approx(3.0, rel=1e-9)


def test_linear_xi(omega_zero):
    zero = constant_fn(0.0)
    assert closed_form.linear_xi(1.0, 0.0, zero, constant_fn(3.0), omega_zero, 0.0) == pytest.approx(3.0, rel=1e-8)
    assert closed_form.linear_xi(1.0, 0.0, zero, zero, omega_zero, 0.0) == 0.0


def test_linear_xi_is_periodic_with_periodic_forcing(omega_zero):
    h = lambda t: 1.0 + 0.5 * np.sin(t)
    zero = constant_fn(0.0)
    a = closed_form.linear_xi(1.0, 0.0, zero, h, omega_zero, 0.7, QuadratureSpec(rel_tol=1e-12), 1.5)
    b = closed_form.linear_xi(1.0, 0.0, zero, h, omega_zero, 0.7 + 2.0 * math.pi, QuadratureSpec(rel_tol=1e-12), 1.5)
    assert a == pytest.approx(b, rel=1e-9)


def test_trace_branch_signs(omega7, beta_periodic):
    taus = np.arange(-2.0, 2.01, 1.0)
    plus = closed_form.trace(closed_form.pitchfork_generator(1.0, 0.5, beta_periodic), omega7, taus, "plus", 1.0)
    minus = closed_form.trace(
        closed_form.pitchfork_generator(1.0, 0.5, beta_periodic, branch="minus"), omega7, taus, "minus", 1.0
    )
    assert len(plus) == 5
    assert np.all(plus.values > 0)
    np.testing.assert_array_equal(minus.values, -plus.values)
    assert plus.seed == 7
