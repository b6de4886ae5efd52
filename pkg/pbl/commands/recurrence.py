"""
recurrence
분기 trace의 주기 / almost-period / automorphy 검사 → trace_*.csv/.dat, landscape_*.csv, recurrence.json
"""
from __future__ import annotations

import re

from loguru import logger

from pbl.commands.common import CommandOutcome, coefficients, output_dir, sweep_options
from pbl.models.schemas import ExperimentConfig
from pbl.services import bifurcation
from pbl.services.export import export_plot_data, write_csv, write_json


def _slug(label: str) -> str:
    """trace label → 파일 이름"""
    text = label.replace("λ", "lambda").replace("=", "")
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text).strip("_")


def _params(config: ExperimentConfig) -> bifurcation.RecurrenceParams:
    rec = config.recurrence
    return bifurcation.RecurrenceParams(
        taus=tuple(rec.tau_window),
        tau_step=rec.tau_step,
        period=rec.period,
        period_tol=rec.period_tol,
        eps=rec.eps,
        window=tuple(rec.scan_window),
        density=rec.density,
        automorphy_tol=rec.automorphy_tol,
        automorphy_terms=rec.automorphy_terms,
        probes=tuple(rec.probes),
    )


def run(config: ExperimentConfig) -> CommandOutcome:
    family = config.verify.family
    beta, gamma = coefficients(config, family)
    options = sweep_options(config, stability=False)
    sweep = bifurcation.pitchfork_sweep if family == "pitchfork" else bifurcation.transcritical_sweep
    diagram = sweep(beta, gamma, config.tau, [config.lam], config.seed_list(), options)
    diagram = bifurcation.recurrence_sweep(diagram, beta, gamma, _params(config), options)

    out = output_dir(config)
    files = []
    for label, trace in diagram.traces.items():
        files.extend(export_plot_data(trace, out, f"trace_{_slug(label)}").values())
    for label, landscape in diagram.landscapes.items():
        files.append(write_csv(landscape, out / f"landscape_{_slug(label)}.csv"))

    inheritance = diagram.invariants.get("recurrence_inheritance", {"passed": True, "judged": 0})
    errors = [entry for entry in diagram.recurrence if "error" in entry]
    passed = inheritance["passed"] and not errors
    report = {
        "lambda": config.lam,
        "family": family,
        "beta_class": beta.recurrence_class,
        "entries": diagram.recurrence,
        "inheritance": inheritance,
        "passed": passed,
    }
    files.append(write_json(report, out / "recurrence.json"))
    if not diagram.recurrence:
        logger.warning(f"⚠️ No branch to classify at λ={config.lam}")
    logger.info(f"🧬 Recurrence: {inheritance['judged']} judged, passed={passed}")
    return CommandOutcome(exit_code=0 if passed else 1, files=files, report=report)
