"""
attractor
A(τ, ω) = [x₋, x*] 끝점, sandwich bounds, 불변성, temperedness → attractor.json
"""
from __future__ import annotations

from typing import Any, Dict, List

import numpy as np
from loguru import logger

from pbl.commands.common import CommandOutcome, coefficients, output_dir, sweep_options, time_grid
from pbl.models.results import CheckReport
from pbl.models.schemas import ExperimentConfig
from pbl.services import bifurcation, closed_form, cocycle
from pbl.services.coefficients import validate_pairing
from pbl.services.export import write_json
from pbl.services.wiener import WienerPath

BOUND_SLACK = 1e-3
UNIQUENESS_TOL = 1e-4
TEMPERED_WINDOW = (-100.0, 0.0)


def _bounds_check(interval, lower: float, upper: float, params: Dict[str, Any]) -> CheckReport:
    """sandwich bounds (1e-3 여유) 안에 |x₋|, |x*|가 있는지"""
    worst = 0.0
    for value in (abs(interval.lower), abs(interval.upper)):
        worst = max(worst, lower - value, value - upper)
    return CheckReport(
        check="sandwich_bounds",
        params=params,
        residual=max(worst, 0.0),
        verdict="pass" if worst <= BOUND_SLACK else "fail",
        tolerances={"slack": BOUND_SLACK},
        details={"lower": lower, "upper": upper, "interval": interval.to_dict()},
    )


def run(config: ExperimentConfig) -> CommandOutcome:
    beta, gamma = coefficients(config, "pitchfork")
    bounds = validate_pairing(beta, gamma)
    options = sweep_options(config)
    lam, tau, delta = config.lam, config.tau, config.delta

    def compute(path: WienerPath) -> Dict[str, Any]:
        interval = bifurcation.pitchfork_attractor(lam, beta, gamma, options, path, tau)
        params = {"lambda": lam, "tau": tau, "seed": path.seed}
        checks: List[CheckReport] = []
        if lam > 0:
            lower, upper = closed_form.sandwich_bounds(lam, delta, bounds, path, tau, options.spec)
            checks.append(_bounds_check(interval, lower, upper, params))
        if gamma.is_zero and lam > 0:
            x_plus = closed_form.quasi_pitchfork(lam, delta, beta, path, tau, options.spec).x_plus
            gap = max(abs(interval.upper - x_plus), abs(interval.lower + x_plus))
            checks.append(CheckReport(
                check="uniqueness", params=params, residual=gap,
                verdict="pass" if gap <= UNIQUENESS_TOL else "fail", tolerances={"tol": UNIQUENESS_TOL},
            ))
            generator = closed_form.pitchfork_generator(lam, delta, beta, options.spec, "plus")
            ts = np.arange(TEMPERED_WINDOW[0], TEMPERED_WINDOW[1] + 0.5, 1.0)
            profile = cocycle.tempered_profile(generator, path, tau, ts)
            checks.append(cocycle.temperedness_check(ts, profile, 1.0, TEMPERED_WINDOW))
            checks.append(cocycle.temperedness_check(ts, profile, 1.0, TEMPERED_WINDOW, reciprocal=True))
        handle = bifurcation.pitchfork_handle(lam, beta, gamma, options)
        checks.append(cocycle.check_invariance(
            handle,
            lambda at, p: bifurcation.pitchfork_attractor(lam, beta, gamma, options, p, at),
            path, tau, 1.0,
            tol=max(10.0 * handle.tolerance, 10.0 * options.pullback_tol),
        ))
        return {"seed": path.seed, "interval": interval.to_dict(), "checks": [c.to_dict() for c in checks],
                "passed": all(c.passed for c in checks)}

    results = []
    for seed in config.seed_list():
        result, path = bifurcation.with_support(seed, time_grid(config), compute)
        interval = result["interval"]
        logger.info(
            f"🧲 seed={seed}: A = [{interval['lower']:.8g}, {interval['upper']:.8g}] "
            f"on [{path.grid.t_min:g}, {path.grid.t_max:g}]"
        )
        results.append(result)

    out = output_dir(config)
    report = {"lambda": lam, "tau": tau, "results": results, "passed": all(r["passed"] for r in results)}
    files = [write_json(report, out / "attractor.json")]
    return CommandOutcome(exit_code=0 if report["passed"] else 1, files=files, report=report)

