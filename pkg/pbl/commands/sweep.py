"""
pitchfork-sweep / transcritical-sweep
λ 격자 위의 분기 그림 → diagram.csv, diagram.dat, diagram.json
"""
from __future__ import annotations

from loguru import logger

from pbl.commands.common import CommandOutcome, coefficients, output_dir, sweep_options
from pbl.models.schemas import ExperimentConfig
from pbl.services import bifurcation
from pbl.services.export import export_plot_data, write_json


def _finish(config: ExperimentConfig, diagram: bifurcation.BifurcationDiagram) -> CommandOutcome:
    out = output_dir(config)
    files = list(export_plot_data(diagram, out, "diagram").values())
    files.append(write_json(diagram, out / "diagram.json"))
    errors = [row for row in diagram.rows if row.status not in ("ok", "degenerate")]
    for row in errors:
        logger.warning(f"⚠️ λ={row.lam}, seed={row.seed}: {row.status}")
    failed = [name for name, inv in diagram.invariants.items() if not inv.get("passed", True)]
    if failed:
        logger.warning(f"⚠️ Invariants failed: {', '.join(failed)}")
    logger.info(f"✅ {diagram.scenario}: {len(diagram.rows)} rows, {len(errors)} problems")
    return CommandOutcome(exit_code=0 if diagram.ok else 1, files=files, report=diagram.to_dict())


def run_pitchfork(config: ExperimentConfig) -> CommandOutcome:
    beta, gamma = coefficients(config, "pitchfork")
    diagram = bifurcation.pitchfork_sweep(
        beta, gamma, config.tau, config.lambda_grid, config.seed_list(), sweep_options(config)
    )
    return _finish(config, diagram)


def run_transcritical(config: ExperimentConfig) -> CommandOutcome:
    beta, gamma = coefficients(config, "transcritical")
    diagram = bifurcation.transcritical_sweep(
        beta, gamma, config.tau, config.lambda_grid, config.seed_list(), sweep_options(config)
    )
    return _finish(config, diagram)
