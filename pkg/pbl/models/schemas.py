"""
Experiment configuration schemas
CLI / JSON 설정 파일 검증 (pydantic). 검증 실패는 ConfigurationError (exit 2)로 바뀐다.
"""
from __future__ import annotations

import math
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from pbl.config import settings
from pbl.exceptions import ConfigurationError

Scenario = Literal[
    "pitchfork-sweep",
    "transcritical-sweep",
    "verify-cocycle",
    "attractor",
    "recurrence",
    "integrate",
    "selftest",
]


class GridConfig(BaseModel):
    """경로 창"""
    model_config = ConfigDict(extra="forbid")

    t_min: float = Field(default_factory=lambda: settings.GRID_T_MIN)
    t_max: float = Field(default_factory=lambda: settings.GRID_T_MAX)
    step: float = Field(default_factory=lambda: settings.GRID_STEP, gt=0)

    @model_validator(mode="after")
    def _origin_inside(self):
        if not (self.t_min < 0 < self.t_max):
            raise ValueError(f"grid must satisfy t_min < 0 < t_max, got [{self.t_min}, {self.t_max}]")
        return self


class ToleranceConfig(BaseModel):
    """quadrature / pullback / 적분 설정"""
    model_config = ConfigDict(extra="forbid")

    rel_tol: float = Field(default_factory=lambda: settings.REL_TOL, gt=0)
    rule: Literal["exponential", "trapezoid"] = Field(default_factory=lambda: settings.QUADRATURE_RULE)
    max_truncation: Optional[float] = Field(default=None, gt=0)
    pullback_schedule: List[float] = Field(default_factory=lambda: list(settings.PULLBACK_SCHEDULE))
    pullback_tol: float = Field(default_factory=lambda: settings.PULLBACK_TOL, gt=0)
    step: Optional[float] = Field(default=None, gt=0)  # 적분 step (없으면 경로 step)

    @field_validator("pullback_schedule")
    @classmethod
    def _increasing(cls, v: List[float]) -> List[float]:
        if not v or any(t <= 0 for t in v) or any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("pullback schedule must be positive and strictly increasing")
        return v


class CoefficientsConfig(BaseModel):
    """β, γ descriptor (kind + 파라미터)"""
    model_config = ConfigDict(extra="forbid")

    beta: Dict[str, Any] = Field(default_factory=lambda: {"kind": "constant", "b": 1.0})
    gamma: Dict[str, Any] = Field(default_factory=lambda: {"kind": "zero"})

    @field_validator("beta", "gamma")
    @classmethod
    def _has_kind(cls, v: Dict[str, Any]) -> Dict[str, Any]:
        if "kind" not in v:
            raise ValueError("coefficient descriptor needs a 'kind'")
        return v


class RecurrenceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tau_window: Tuple[float, float] = (0.0, 400.0)
    tau_step: float = Field(default=0.05, gt=0)
    period: Optional[float] = Field(default=None, gt=0)
    period_tol: float = Field(default=1e-6, gt=0)
    eps: float = Field(default=0.05, gt=0)
    scan_window: Tuple[float, float] = (0.0, 200.0)
    density: float = Field(default=10.0, gt=0)
    automorphy_tol: float = Field(default=0.05, gt=0)
    automorphy_terms: int = Field(default=64, ge=2)
    probes: List[float] = Field(default_factory=lambda: [0.0, 1.0, math.sqrt(2.0)])


class IntegrateConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x0: float = 0.5
    t_end: float = 5.0
    steps: List[float] = Field(default_factory=lambda: [4e-3, 2e-3, 1e-3])
    family: Literal["pitchfork", "transcritical", "custom"] = "pitchfork"
    expr: Optional[str] = None  # custom a(t, x)


class VerifyConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    ts: List[float] = Field(default_factory=lambda: [1.0, 2.0, 5.0])
    taus: List[float] = Field(default_factory=lambda: [-3.0, 0.0, 3.0])
    x: float = 0.7
    family: Literal["pitchfork", "transcritical"] = "pitchfork"
    handle: Literal["closed_form", "integrator", "both"] = "both"
    cocycle_pairs: List[Tuple[float, float]] = Field(default_factory=lambda: [(1.0, 1.0), (1.0, 2.0)])


class ExperimentConfig(BaseModel):
    """실험 하나의 전체 설정 (manifest에 그대로 기록)"""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    scenario: Scenario
    coefficients: CoefficientsConfig = Field(default_factory=CoefficientsConfig)
    lambda_grid: List[float] = Field(default_factory=lambda: [-1.0, -0.1, 0.1, 1.0])
    lam: float = Field(default=1.0, alias="lambda")
    delta: float = Field(default=0.0, ge=0)
    tau: float = 0.0
    seeds: List[int] = Field(default_factory=lambda: list(settings.DEFAULT_SEEDS))
    zero_noise: bool = False  # ω ≡ 0
    grid: GridConfig = Field(default_factory=GridConfig)
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    recurrence: RecurrenceConfig = Field(default_factory=RecurrenceConfig)
    integrate: IntegrateConfig = Field(default_factory=IntegrateConfig)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)
    stability: bool = True
    workers: int = Field(default_factory=lambda: settings.WORKERS, ge=1)
    output_dir: str = "./out"

    @field_validator("seeds")
    @classmethod
    def _seeds(cls, v: List[int]) -> List[int]:
        if any(s < 0 or s >= 2 ** 63 for s in v):
            raise ValueError("seeds must be 64-bit nonnegative integers")
        return v

    @field_validator("lambda_grid")
    @classmethod
    def _grid(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("lambda grid must not be empty")
        return v

    def seed_list(self) -> List[Optional[int]]:
        """zero_noise면 [None] (ω ≡ 0)"""
        return [None] if self.zero_noise else list(self.seeds)

    def echo(self) -> Dict[str, Any]:
        """기본값까지 포함한 설정 (manifest용)"""
        return self.model_dump(mode="json", by_alias=True)


def load_config(data: Dict[str, Any]) -> ExperimentConfig:
    """dict → ExperimentConfig (pydantic 오류는 ConfigurationError)"""
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigurationError(f"invalid experiment config: {problems}")
