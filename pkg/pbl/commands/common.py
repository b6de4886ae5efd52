"""
Command helpers
설정 → 서비스 객체 변환과 명령 결과 형식
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pbl.models.schemas import ExperimentConfig
from pbl.services.bifurcation import SweepOptions
from pbl.services.coefficients import BetaFn, GammaFn, load_coefficients
from pbl.services.quadrature import QuadratureSpec
from pbl.services.wiener import TimeGrid


@dataclass
class CommandOutcome:
    """명령 실행 결과: 종료 코드, 산출물, JSON 보고서"""

    exit_code: int
    files: List[Path] = field(default_factory=list)
    report: Dict[str, Any] = field(default_factory=dict)


def coefficients(config: ExperimentConfig, variant: str) -> Tuple[BetaFn, GammaFn]:
    return load_coefficients(config.coefficients, variant)


def quadrature_spec(config: ExperimentConfig) -> QuadratureSpec:
    tol = config.tolerances
    return QuadratureSpec(rel_tol=tol.rel_tol, max_truncation=tol.max_truncation, rule=tol.rule)


def time_grid(config: ExperimentConfig) -> TimeGrid:
    return TimeGrid.span(config.grid.t_min, config.grid.t_max, config.grid.step)


def sweep_options(config: ExperimentConfig, stability: Optional[bool] = None) -> SweepOptions:
    return SweepOptions(
        delta=config.delta,
        spec=quadrature_spec(config),
        schedule=tuple(config.tolerances.pullback_schedule),
        pullback_tol=config.tolerances.pullback_tol,
        step=config.tolerances.step,
        grid=time_grid(config),
        stability=config.stability if stability is None else stability,
        workers=config.workers,
    )


def output_dir(config: ExperimentConfig) -> Path:
    path = Path(config.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path
