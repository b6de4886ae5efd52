"""
verify-cocycle
cocycle 법칙, quasi-solution 항등식, 선형 envelope 항등식, 주기 cocycle → checks.json
"""
from __future__ import annotations

import itertools
from typing import List, Optional

from loguru import logger

from pbl.commands.common import CommandOutcome, coefficients, output_dir, quadrature_spec, time_grid
from pbl.models.results import CheckReport
from pbl.models.schemas import ExperimentConfig
from pbl.services import closed_form, cocycle
from pbl.services.bifurcation import with_support
from pbl.services.coefficients import envelope_for, validate_pairing
from pbl.services.export import write_json
from pbl.services.integrator import DriftSpec, scheme_tolerance
from pbl.services.wiener import WienerPath

CLOSED_FORM_TOL = 1e-6
# 적분기 항등식 예산: scheme tolerance의 배수
INTEGRATOR_BUDGET = 50.0


def _generator(family: str, lam: float, delta: float, beta, spec) -> Optional[closed_form.Generator]:
    if family == "pitchfork":
        if lam > 0:
            return closed_form.pitchfork_generator(lam, delta, beta, spec, "plus")
        return closed_form.zero_generator
    if lam == 0:
        return None
    return closed_form.transcritical_generator(lam, delta, beta, spec)


def run(config: ExperimentConfig) -> CommandOutcome:
    verify = config.verify
    family = verify.family
    beta, gamma = coefficients(config, family)
    spec = quadrature_spec(config)
    lam, delta = config.lam, config.delta
    step = config.tolerances.step

    handles: List[cocycle.CocycleHandle] = []
    if verify.handle in ("closed_form", "both") and gamma.is_zero:
        handles.append(cocycle.closed_form_handle(family, lam, delta, beta=beta, spec=spec))
    if verify.handle in ("integrator", "both"):
        drift = DriftSpec(family=family, lam=lam, delta=delta, beta=beta, gamma=gamma)
        handles.append(cocycle.integrator_handle(drift, step))
    envelope = envelope_for(lam, validate_pairing(beta, gamma)) if family == "pitchfork" else None
    generator = _generator(family, lam, delta, beta, spec) if gamma.is_zero else None
    samples = list(itertools.product(verify.ts, verify.taus))

    def compute(path: WienerPath) -> List[CheckReport]:
        checks: List[CheckReport] = []
        for handle in handles:
            tol = CLOSED_FORM_TOL if handle.kind == "closed_form" else 5.0 * handle.tolerance
            for (t, s), tau in itertools.product(verify.cocycle_pairs, verify.taus):
                checks.append(cocycle.check_cocycle_law(handle, path, tau, t, s, verify.x, tol))
            if handle.period:
                checks.append(cocycle.check_periodic_cocycle(handle, path, 0.0, 1.0, handle.period, verify.x, tol))
            if generator is not None:
                identity_tol = (
                    CLOSED_FORM_TOL if handle.kind == "closed_form"
                    else INTEGRATOR_BUDGET * scheme_tolerance(step or path.step)
                )
                checks.append(cocycle.check_quasi_solution(
                    handle, generator, path, samples, identity_tol, label=f"{family}/{handle.kind}"
                ))
        if envelope is not None:
            psi = cocycle.closed_form_handle("linear_envelope", lam, delta, envelope=envelope, spec=spec)
            xi = closed_form.xi_generator(envelope, delta, spec)
            checks.append(cocycle.check_quasi_solution(psi, xi, path, samples, CLOSED_FORM_TOL, label="linear_xi"))
        return checks

    reports = []
    for seed in config.seed_list():
        checks, _ = with_support(seed, time_grid(config), compute)
        reports.extend(checks)
        logger.info(f"🔁 seed={seed}: {sum(c.passed for c in checks)}/{len(checks)} checks passed")

    out = output_dir(config)
    report = {"checks": [c.to_dict() for c in reports], "passed": all(c.passed for c in reports)}
    files = [write_json(report, out / "checks.json")]
    return CommandOutcome(exit_code=0 if report["passed"] else 1, files=files, report=report)
