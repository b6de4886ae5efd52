"""
selftest
ω ≡ 0 위의 결정론적 oracle 모음 → selftest.json, selftest_pitchfork.csv, selftest_transcritical.csv

모든 값은 seed 없이 계산되므로 같은 설정이면 산출물이 바이트 단위로 같다.
"""
from __future__ import annotations

import math
from typing import Any, Callable, Dict, List, Tuple

import numpy as np
from loguru import logger

from pbl.commands.common import CommandOutcome, output_dir, quadrature_spec, sweep_options, time_grid
from pbl.exceptions import PBLError
from pbl.models.results import CheckReport, QuasiSolutionTrace
from pbl.models.schemas import ExperimentConfig
from pbl.services import bifurcation, closed_form, cocycle, integrator, recurrence
from pbl.services.coefficients import CertifiedBounds, constant_fn, make_beta, make_gamma
from pbl.services.export import export_plot_data, write_json
from pbl.services.wiener import TimeGrid, eval_path, sample_path, shift

EXACT = 1e-12


def _oracle(check: str, params: Dict[str, Any], value: float, expected: float, tol: float,
            relative: bool = False) -> CheckReport:
    residual = abs(value - expected)
    if relative:
        residual /= abs(expected)
    return CheckReport(
        check=check,
        params=params,
        residual=residual,
        verdict="pass" if residual <= tol else "fail",
        tolerances={"tol": tol, "relative": relative},
        details={"value": value, "expected": expected},
    )


def _zero_support(config: ExperimentConfig, compute: Callable) -> Any:
    """ω ≡ 0 에서 계산 (창이 부족하면 넓힘)"""
    result, _ = bifurcation.with_support(None, time_grid(config), compute)
    return result


def _wiener_checks() -> List[CheckReport]:
    grid = TimeGrid.span(-10.0, 10.0, 0.01)
    first, second = sample_path(7, grid), sample_path(7, grid)
    same = float(np.max(np.abs(first.values - second.values)))
    return [
        _oracle("wiener_origin", {"seed": 7}, eval_path(first, 0.0), 0.0, 0.0),
        _oracle("wiener_determinism", {"seed": 7}, same, 0.0, 0.0),
        _oracle("shift_identity", {"seed": 7},
                float(np.max(np.abs(shift(first, 0.0).values - first.values))), 0.0, 0.0),
        _oracle("shift_definition", {"seed": 7, "t": 1.0, "r": 2.0},
                eval_path(shift(first, 1.0), 2.0), eval_path(first, 3.0) - eval_path(first, 1.0), EXACT),
    ]


def _closed_form_checks(config: ExperimentConfig) -> List[CheckReport]:
    spec = quadrature_spec(config)
    rule = config.tolerances.rule

    def compute(path):
        checks: List[CheckReport] = []
        for lam in (0.1, 1.0, 4.0):
            for b in (1.0, 4.0):
                beta = make_beta("constant", {"b": b})
                value = closed_form.quasi_pitchfork(lam, 0.0, beta, path, 0.0, spec).x_plus
                checks.append(_oracle("quasi_pitchfork", {"lambda": lam, "beta_0": b},
                                      value, math.sqrt(lam / b), 1e-8, relative=True))
        one = make_beta("constant", {"b": 1.0})
        for lam in (-1.0, -0.1, 0.1, 1.0):
            value = closed_form.quasi_transcritical(lam, 0.0, one, path, 0.0, spec).value
            checks.append(_oracle("quasi_transcritical", {"lambda": lam, "beta_0": 1.0},
                                  value, lam, 1e-8, relative=True))
        checks.append(_oracle("exact_pitchfork", {"lambda": 1.0, "x0": 1.0, "t": 20.0},
                              closed_form.exact_pitchfork(1.0, 0.5, one, path, 0.0, 20.0, 1.0, rule), 1.0, 1e-6))
        checks.append(_oracle("exact_pitchfork_zero", {"lambda": 1.0, "x0": 0.0, "t": 5.0},
                              closed_form.exact_pitchfork(1.0, 0.5, one, path, 0.0, 5.0, 0.0, rule), 0.0, 0.0))
        checks.append(_oracle("exact_transcritical", {"lambda": 1.0, "x0": 1.0, "t": 20.0},
                              closed_form.exact_transcritical(1.0, 0.0, one, path, 0.0, 20.0, 1.0, rule), 1.0, 1e-6))
        zero = constant_fn(0.0)
        checks.append(_oracle("linear_decay", {"nu": 1.0, "y": 2.0, "t": 1.0},
                              closed_form.linear_solution(1.0, 0.0, zero, zero, path, 0.0, 1.0, 2.0, rule),
                              2.0 * math.exp(-1.0), 1e-9))
        checks.append(_oracle("linear_xi", {"nu": 1.0, "h": 3.0},
                              closed_form.linear_xi(1.0, 0.0, zero, constant_fn(3.0), path, 0.0, spec),
                              3.0, 1e-8, relative=True))
        lower, upper = closed_form.sandwich_bounds(1.0, 0.0, CertifiedBounds(1.0, 1.0, 0.0, 0.0), path, 0.0, spec)
        checks.append(_oracle("sandwich_lower", {"lambda": 1.0}, lower, 1.0, 1e-8, relative=True))
        checks.append(_oracle("sandwich_upper", {"lambda": 1.0}, upper, 1.0, 1e-8, relative=True))
        return checks

    return _zero_support(config, compute)


def _cocycle_checks(config: ExperimentConfig) -> List[CheckReport]:
    spec = quadrature_spec(config)
    one = make_beta("constant", {"b": 1.0})
    handle = cocycle.closed_form_handle("pitchfork", 1.0, 0.0, beta=one, spec=spec)
    drift = integrator.DriftSpec(family="pitchfork", lam=1.0, beta=one, gamma=make_gamma("zero"))

    def compute(path):
        checks = [
            cocycle.check_cocycle_law(handle, path, 0.0, 1.0, 2.0, 0.7, 1e-10),
            cocycle.check_cocycle_law(handle, path, 0.0, 0.0, 0.0, 0.7, 0.0),
            cocycle.check_quasi_solution(handle, closed_form.zero_generator, path, [(1.0, 0.0), (2.0, 3.0)],
                                         0.0, label="zero"),
        ]
        limit = cocycle.pullback_limit(handle, path, 0.0, 3.0, schedule=(5.0, 10.0, 20.0))
        checks.append(_oracle("pullback_limit", {"x0": 3.0}, limit.limit, 1.0, 1e-6))
        interval = cocycle.attractor_endpoints(handle, lambda at, p: 3.0, path, 0.0)
        checks.append(_oracle("attractor_upper", {"lambda": 1.0}, interval.upper, 1.0, 1e-6))
        checks.append(_oracle("attractor_lower", {"lambda": 1.0}, interval.lower, -1.0, 1e-6))
        trajectory = integrator.integrate(drift, path, 0.0, 20.0, 0.5, 1e-3)
        checks.append(_oracle("integrator_equilibrium", {"lambda": 1.0, "x0": 0.5, "t_end": 20.0},
                              trajectory.final, 1.0, 1e-4))
        return checks

    return _zero_support(config, compute)


def _recurrence_checks() -> List[CheckReport]:
    taus = np.arange(0.0, 40.0 + 0.05, 0.1)
    flat = QuasiSolutionTrace(taus=taus, values=np.ones_like(taus), branch="plus", lam=1.0, seed=None,
                              label="constant")
    return [recurrence.detect_period(flat, 4.0, EXACT)]


def _sweep_checks(config: ExperimentConfig, out) -> Tuple[List[CheckReport], list]:
    options = sweep_options(config, stability=True)
    one = make_beta("constant", {"b": 1.0})
    checks: List[CheckReport] = []
    files = []

    diagram = bifurcation.pitchfork_sweep(one, make_gamma("zero"), 0.0, [-1.0, -0.1, 0.1, 1.0], [None], options)
    files.extend(export_plot_data(diagram, out, "selftest_pitchfork").values())
    for row in diagram.rows:
        expected = math.sqrt(row.lam) if row.lam > 0 else 0.0
        checks.append(_oracle("pitchfork_branch", {"lambda": row.lam}, row.x_plus, expected, 1e-4))
        checks.append(_oracle("pitchfork_branch_minus", {"lambda": row.lam}, row.x_minus, -expected, 1e-4))
    checks.append(_invariant("pitchfork_exchange", diagram, "stability_exchange"))

    diagram = bifurcation.transcritical_sweep(one, make_gamma("zero", variant="transcritical"), 0.0,
                                              [-1.0, 1.0], [None], options)
    files.extend(export_plot_data(diagram, out, "selftest_transcritical").values())
    for row in diagram.rows:
        checks.append(_oracle("transcritical_branch", {"lambda": row.lam}, row.x_plus, row.lam, 1e-4))
    checks.append(_invariant("transcritical_exchange", diagram, "stability_exchange"))
    return checks, files


def _invariant(check: str, diagram: bifurcation.BifurcationDiagram, name: str) -> CheckReport:
    invariant = diagram.invariants.get(name, {})
    return CheckReport(
        check=check,
        params={"scenario": diagram.scenario},
        residual=None,
        verdict="pass" if invariant.get("passed") else "fail",
        details=invariant,
    )


def run(config: ExperimentConfig) -> CommandOutcome:
    out = output_dir(config)
    checks: List[CheckReport] = []
    files = []
    groups = [
        ("wiener", _wiener_checks),
        ("closed_form", lambda: _closed_form_checks(config)),
        ("cocycle", lambda: _cocycle_checks(config)),
        ("recurrence", _recurrence_checks),
    ]
    for name, group in groups:
        try:
            found = group()
        except PBLError as e:
            logger.error(f"❌ Selftest group {name} aborted: {e.detail}")
            found = [CheckReport(check=name, params={}, residual=None, verdict="fail", details=e.to_dict())]
        checks.extend(found)
        logger.info(f"🧪 {name}: {sum(c.passed for c in found)}/{len(found)} passed")

    try:
        found, written = _sweep_checks(config, out)
        files.extend(written)
    except PBLError as e:
        logger.error(f"❌ Selftest sweeps aborted: {e.detail}")
        found = [CheckReport(check="bifurcation", params={}, residual=None, verdict="fail", details=e.to_dict())]
    checks.extend(found)

    failed = [c for c in checks if not c.passed]
    for check in failed:
        logger.warning(f"⚠️ {check.check} {check.params}: residual {check.residual}")
    report = {"checks": [c.to_dict() for c in checks], "passed": not failed, "count": len(checks)}
    files.append(write_json(report, out / "selftest.json"))
    logger.info(f"✅ Selftest: {len(checks) - len(failed)}/{len(checks)} passed")
    return CommandOutcome(exit_code=0 if not failed else 1, files=files, report=report)
