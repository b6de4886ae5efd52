"""
기본 격자 ([-200, 50], step 1e-3) 위의 end-to-end 검증 (수 분 소요)

    pytest -m slow
"""
import json
import math

import numpy as np
import pytest

from pbl.main import run
from pbl.services import bifurcation, closed_form, cocycle
from pbl.services.bifurcation import RecurrenceParams, SweepOptions
from pbl.services.coefficients import make_beta, make_gamma
from pbl.services.path_cache import path_cache
from pbl.services.wiener import TimeGrid

pytestmark = pytest.mark.slow

SEEDS = [7, 11, 13]
PERIODIC = "periodic:2,1,6.283185307179586"


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


@pytest.fixture(autouse=True)
def fresh_cache():
    yield
    path_cache.clear()


@pytest.fixture
def periodic_beta():
    return make_beta("periodic", {"a": 2.0, "b": 1.0, "T": 2.0 * math.pi})


def test_integrator_agrees_with_closed_form(tmp_path):
    out = tmp_path / "integrate"
    code = run(["integrate", "--beta", PERIODIC, "--lambda", "1", "--delta", "0.5", "--seed", "7",
                "--x0", "0.5", "--t-end", "5", "--output-dir", str(out)])
    assert code == 0
    checks = {c["check"]: c for c in json.loads((out / "convergence.json").read_text())["results"][0]["checks"]}
    assert checks["endpoint_error"]["residual"] <= 1e-2
    assert checks["strong_order"]["residual"] >= 0.5


@pytest.mark.parametrize("seed", SEEDS)
def test_pitchfork_bifurcation_across_seeds(seed, periodic_beta):
    lams = [-1.0, -0.1, 0.01, 0.1, 1.0]
    diagram = bifurcation.pitchfork_sweep(periodic_beta, make_gamma("zero"), 0.0, lams, [seed], SweepOptions(delta=0.5))
    assert all(row.status == "ok" for row in diagram.rows)
    for row in diagram.rows:
        if row.lam < 0:
            assert abs(row.x_plus) <= 1e-4 and abs(row.x_minus) <= 1e-4
        else:
            assert row.x_minus < 0 < row.x_plus
    magnitudes = {row.lam: abs(row.x_plus) for row in diagram.rows}
    assert magnitudes[1.0] > magnitudes[0.1] > magnitudes[0.01] > 0
    assert diagram.invariants["collapse"]["passed"]
    assert diagram.invariants["stability_exchange"]["passed"]
    assert diagram.ok


@pytest.mark.parametrize("seed", SEEDS)
@pytest.mark.parametrize("lam", [0.1, 1.0])
def test_general_gamma_respects_sandwich(seed, lam, periodic_beta):
    gamma = make_gamma("cubic_profile", {"c": 0.3})
    options = SweepOptions(delta=0.5, stability=False)
    for tau in (-2.0, 0.0, 2.0):
        diagram = bifurcation.pitchfork_sweep(periodic_beta, gamma, tau, [lam], [seed], options)
        row = diagram.rows[0]
        assert row.status == "ok"
        assert row.lower_bound - 1e-3 <= row.x_plus <= row.upper_bound + 1e-3
        assert row.lower_bound - 1e-3 <= -row.x_minus <= row.upper_bound + 1e-3


def test_transcritical_sign_law(periodic_beta):
    gamma = make_gamma("zero", variant="transcritical")
    diagram = bifurcation.transcritical_sweep(periodic_beta, gamma, 0.0, [-1.0, -0.1, 0.1, 1.0], [7],
                                              SweepOptions(delta=0.5))
    for row in diagram.rows:
        assert row.status == "ok"
        assert np.sign(row.x_plus) == np.sign(row.lam)
    assert diagram.invariants["sign_law"]["passed"]
    assert diagram.invariants["stability_exchange"]["passed"]


@pytest.mark.parametrize("lam", [-1.0, -0.1, 0.1, 1.0])
def test_transcritical_pullback_reaches_the_branch(lam, periodic_beta):
    handle = cocycle.closed_form_handle("transcritical", lam, 0.5, beta=periodic_beta)

    def compute(path):
        target = 0.0 if lam < 0 else closed_form.quasi_transcritical(lam, 0.5, periodic_beta, path, 0.0).value
        return target, [cocycle.pullback_limit(handle, path, 0.0, x0) for x0 in (0.5, 1.0, 2.0)]

    (target, results), _ = bifurcation.with_support(7, TimeGrid.span(-200.0, 50.0, 1e-3), compute)
    for result in results:
        assert result.converged
        assert result.limit == pytest.approx(target, abs=1e-4)


@pytest.mark.parametrize("seed", SEEDS)
def test_branch_is_tempered(seed, periodic_beta):
    path = path_cache.get_path(seed, TimeGrid.span(-200.0, 50.0, 1e-3))
    generator = closed_form.pitchfork_generator(1.0, 0.5, periodic_beta)
    ts = np.arange(-100.0, 0.5, 1.0)
    values = cocycle.tempered_profile(generator, path, 0.0, ts)
    report = cocycle.temperedness_check(ts, values, 1.0, (-100.0, 0.0))
    assert report.verdict == "pass"


def test_selftest_is_byte_identical(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    assert run(["selftest", "--output-dir", str(first)]) == 0
    assert run(["selftest", "--output-dir", str(second)]) == 0
    names = sorted(p.name for p in first.iterdir() if p.name != "manifest.json")
    assert names == sorted(p.name for p in second.iterdir() if p.name != "manifest.json")
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_quasi_periodic_beta_gives_almost_periods():
    beta = make_beta("quasi_periodic", {"a": 3.0, "b": 1.0, "c": 1.0})
    options = SweepOptions(stability=False)
    diagram = bifurcation.pitchfork_sweep(beta, make_gamma("zero"), 0.0, [1.0], [None], options)
    bifurcation.recurrence_sweep(diagram, beta, make_gamma("zero"), RecurrenceParams(), options)
    checks = diagram.recurrence[0]["checks"]
    assert checks["almost_periodic"]["details"]["hits"]
    assert checks["periodic"]["verdict"] == "fail"


def test_almost_automorphic_beta_passes_the_automorphy_check():
    beta = make_beta("almost_automorphic", {"a": 3.0, "b": 1.0})
    options = SweepOptions(stability=False)
    diagram = bifurcation.pitchfork_sweep(beta, make_gamma("zero"), 0.0, [1.0], [None], options)
    bifurcation.recurrence_sweep(diagram, beta, make_gamma("zero"), RecurrenceParams(taus=(0.0, 20.0), tau_step=0.5),
                                 options)
    entry = diagram.recurrence[0]
    assert entry["checks"]["almost_automorphic"]["verdict"] == "pass"
    assert entry["inherited"] is True
