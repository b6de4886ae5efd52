import math

import numpy as np
import pytest

from pbl.exceptions import ConfigurationError, IncompatibleCoefficientsError
from pbl.services.coefficients import (
    beta_descriptor,
    envelope_for,
    gamma_descriptor,
    load_coefficients,
    make_beta,
    make_envelope,
    make_gamma,
    parse_beta_flag,
    parse_gamma_flag,
    validate_pairing,
    young_constant,
)

TWO_PI = 2.0 * math.pi


def test_constant_beta_bounds():
    beta = make_beta("constant", {"b": 1.0})
    assert (beta.beta_0, beta.beta_1) == (1.0, 1.0)
    assert beta(3.7) == 1.0
    assert beta.recurrence_class == "constant"


def test_periodic_beta_bounds_and_period():
    beta = make_beta("periodic", {"a": 2.0, "b": 1.0, "T": TWO_PI})
    assert (beta.beta_0, beta.beta_1) == (1.0, 3.0)
    assert beta.period == pytest.approx(TWO_PI)
    ts = np.linspace(-50.0, 50.0, 1001)
    np.testing.assert_allclose(beta(ts), beta(ts + TWO_PI), atol=1e-12)


def test_quasi_periodic_beta_bounds():
    beta = make_beta("quasi_periodic", {"a": 3.0, "b": 1.0, "c": 1.0})
    assert (beta.beta_0, beta.beta_1) == (1.0, 5.0)
    assert beta.period is None
    assert beta.recurrence_class == "almost_periodic"


def test_almost_automorphic_beta_stays_in_band():
    beta = make_beta("almost_automorphic", {"a": 3.0, "b": 1.0})
    values = beta(np.linspace(-200.0, 200.0, 20001))
    assert values.min() >= beta.beta_0
    assert values.max() <= beta.beta_1


@pytest.mark.parametrize("kind, params", [
    ("constant", {"b": 0.0}),
    ("periodic", {"a": 1.0, "b": 1.0, "T": 1.0}),
    ("quasi_periodic", {"a": 2.0, "b": 1.0, "c": 1.0}),
    ("nonsense", {}),
])
def test_invalid_beta(kind, params):
    with pytest.raises(ConfigurationError):
        make_beta(kind, params)


def test_custom_beta_must_stay_in_declared_band():
    beta = make_beta("custom", {"expr": "2 + sin(t)", "beta_0": 1.0, "beta_1": 3.0})
    assert beta(0.0) == pytest.approx(2.0)
    with pytest.raises(ConfigurationError):
        make_beta("custom", {"expr": "2 + sin(t)", "beta_0": 1.5, "beta_1": 3.0})


def test_custom_expression_rejects_arbitrary_code():
    with pytest.raises(ConfigurationError):
        make_beta("custom", {"expr": "__import__('os').getcwd()", "beta_0": 1.0, "beta_1": 1.0})


def test_beta_minus_shifts_bounds():
    beta = make_beta("periodic", {"a": 2.0, "b": 1.0, "T": TWO_PI}).minus(0.5)
    assert (beta.beta_0, beta.beta_1) == (0.5, 2.5)
    assert beta(0.0) == pytest.approx(1.5)
    assert beta.period == pytest.approx(TWO_PI)


def test_zero_gamma():
    gamma = make_gamma("zero")
    assert gamma(1.0, 5.0) == 0.0
    assert (gamma.c_1, gamma.c_2) == (0.0, 0.0)


def test_cubic_profile_value():
    gamma = make_gamma("cubic_profile", {"c": 0.3})
    assert gamma(5.0, 2.0) == pytest.approx(2.4)


def test_profile_band_from_constants():
    gamma = make_gamma("quadratic_profile", {"c_1": 0.1, "c_2": 0.3}, variant="transcritical")
    assert (gamma.c_1, gamma.c_2) == pytest.approx((0.1, 0.3))
    values = gamma.profile(np.linspace(0.0, TWO_PI, 101))
    assert values.min() >= 0.1 - 1e-12
    assert values.max() <= 0.3 + 1e-12


def test_profile_variant_mismatch():
    with pytest.raises(ConfigurationError):
        make_gamma("quadratic_profile", {"c": 0.2}, variant="pitchfork")


def test_pairing_pass_through():
    beta = make_beta("periodic", {"a": 2.0, "b": 1.0, "T": TWO_PI})
    gamma = make_gamma("cubic_profile", {"c_1": 0.1, "c_2": 0.3})
    assert tuple(validate_pairing(beta, gamma)) == pytest.approx((1.0, 3.0, 0.1, 0.3))


def test_pairing_rejects_large_gamma():
    beta = make_beta("periodic", {"a": 2.0, "b": 1.0, "T": TWO_PI})
    gamma = make_gamma("cubic_profile", {"c_1": 0.5, "c_2": 1.2})
    with pytest.raises(IncompatibleCoefficientsError, match="c₂ < β₀"):
        validate_pairing(beta, gamma)


def test_beta_flag():
    beta = parse_beta_flag("periodic:2,1,6.2831853")
    assert beta.kind == "periodic"
    assert beta.period == pytest.approx(6.2831853)
    assert beta_descriptor("constant:4") == {"kind": "constant", "b": 4.0}


@pytest.mark.parametrize("flag", ["periodic:2,1", "unknown:1", "constant:x"])
def test_bad_beta_flag(flag):
    with pytest.raises(ConfigurationError):
        parse_beta_flag(flag)


def test_gamma_flag():
    assert gamma_descriptor("zero") == {"kind": "zero"}
    assert gamma_descriptor("quadratic_profile:0.1,0.3") == {"kind": "quadratic_profile", "c_1": 0.1, "c_2": 0.3}
    gamma = parse_gamma_flag("cubic_profile:0.3")
    assert gamma.c_2 == pytest.approx(0.3)


def test_load_coefficients_descriptor():
    beta, gamma = load_coefficients(
        {"beta": {"kind": "periodic", "a": 2, "b": 1, "T": 6.2831853}, "gamma": {"kind": "zero"}}
    )
    assert beta.beta_0 == 1.0
    assert gamma.is_zero


def test_young_constant_dominates_polynomial():
    lam, beta_0, c_2 = 1.0, 1.0, 0.3
    c = young_constant(lam, beta_0, c_2)
    xs = np.linspace(0.0, 10.0, 10001)
    # (λ+1)|x| − ½(β₀−c₂)|x|³ ≤ c
    assert np.max((lam + 1.0) * xs - 0.5 * (beta_0 - c_2) * xs ** 3) <= c


def test_envelope_for():
    beta = make_beta("constant", {"b": 1.0})
    envelope = envelope_for(1.0, validate_pairing(beta, make_gamma("zero")))
    assert envelope.nu == 1.0
    assert envelope.forcing(3.0) == pytest.approx(envelope.forcing_bound)


def test_envelope_rejects_negative_h():
    with pytest.raises(ConfigurationError):
        make_envelope(1.0, h=lambda t: np.full(np.shape(t), -1.0))
