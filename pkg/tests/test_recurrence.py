import math

import numpy as np
import pytest

from pbl.exceptions import AlignmentError, ConfigurationError, CoverageError
from pbl.models.results import QuasiSolutionTrace
from pbl.services import closed_form, recurrence
from pbl.services.coefficients import make_beta


def make_trace(fn, t_max=40.0, step=0.1, label="synthetic"):
    taus = np.arange(0, int(round(t_max / step)) + 1) * step
    return QuasiSolutionTrace(taus=taus, values=fn(taus), branch="custom", lam=1.0, seed=None, label=label)


@pytest.fixture
def periodic_trace():
    return make_trace(lambda t: np.sin(2.0 * math.pi * t / 4.0))


def test_detect_period(periodic_trace):
    report = recurrence.detect_period(periodic_trace, 4.0, 1e-9)
    assert report.verdict == "pass"
    assert report.params["T"] == 4.0
    assert recurrence.detect_period(periodic_trace, 3.0, 1e-9).verdict == "fail"


def test_detect_period_needs_aligned_shift(periodic_trace):
    with pytest.raises(AlignmentError):
        recurrence.detect_period(periodic_trace, 0.25, 1e-9)
    with pytest.raises(ConfigurationError):
        recurrence.detect_period(periodic_trace, 0.0, 1e-9)


def test_detect_period_rejects_sub_step_shift(periodic_trace):
    with pytest.raises(AlignmentError):
        recurrence.detect_period(periodic_trace, 1e-8, 1e-9)


def test_detect_period_needs_three_periods():
    short = make_trace(lambda t: np.sin(t), t_max=10.0)
    with pytest.raises(CoverageError):
        recurrence.detect_period(short, 4.0, 1e-9)


def test_almost_period_scan_finds_periods(periodic_trace):
    scan = recurrence.almost_period_scan(periodic_trace, 1e-6, (0.0, 10.0), 5.0)
    np.testing.assert_allclose(scan.hits, [4.0, 8.0])
    assert scan.max_gap == pytest.approx(4.0)
    assert scan.dense
    assert len(scan.landscape) == 100
    report = scan.report(periodic_trace)
    assert report.verdict == "pass"
    assert report.details["n_hits"] == 2


def test_almost_period_scan_without_hits():
    trace = make_trace(lambda t: t)
    scan = recurrence.almost_period_scan(trace, 1e-3, (0.0, 10.0), 5.0)
    assert scan.hits == []
    assert not scan.dense
    assert scan.report(trace).verdict == "fail"


def test_almost_period_scan_coverage(periodic_trace):
    with pytest.raises(CoverageError):
        recurrence.almost_period_scan(periodic_trace, 1e-6, (0.0, 30.0), 20.0)
    with pytest.raises(ConfigurationError):
        recurrence.almost_period_scan(periodic_trace, 1e-6, (5.0, 1.0), 5.0)


def test_automorphy_probe_on_periodic_function():
    sequence = [2.0 * math.pi * n for n in range(1, 6)]
    report = recurrence.automorphy_probe(np.sin, sequence, 1e-8)
    assert report.verdict == "pass"
    assert report.details["subsequence"] == [0, 1, 2, 3, 4]


def test_automorphy_probe_is_inconclusive_without_cluster():
    report = recurrence.automorphy_probe(lambda t: t, [10.0, 20.0, 30.0], 0.1)
    assert report.verdict == "inconclusive"
    assert report.residual is None


def test_classify_periodic_implies_almost_periodic(periodic_trace):
    report = recurrence.classify(periodic_trace, period=4.0, period_tol=1e-9)
    assert report.periodic.verdict == "pass"
    assert report.almost_periodic.verdict == "pass"
    assert report.landscape is not None
    assert set(report.to_dict()["checks"]) == {"periodic", "almost_periodic"}


def test_classify_with_automorphy(periodic_trace):
    report = recurrence.classify(
        periodic_trace,
        automorphy={"generator": np.sin, "sequence": [2.0 * math.pi * n for n in range(1, 4)], "tol": 1e-8},
    )
    assert report.periodic is None
    assert report.automorphic.verdict == "pass"


def test_zero_noise_quasi_solution_inherits_period(omega_zero):
    beta = make_beta("periodic", {"a": 2.0, "b": 1.0, "T": 4.0})
    generator = closed_form.pitchfork_generator(1.0, 0.0, beta)
    trace = closed_form.trace(generator, omega_zero, np.arange(0, 25) * 0.5, "plus", 1.0)
    assert recurrence.detect_period(trace, 4.0, 1e-8).verdict == "pass"
    assert recurrence.path_generator(generator, omega_zero)(1.5) == trace.values[3]
