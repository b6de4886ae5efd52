"""
Result records for PBL
계산 결과 값 객체 (불변 dataclass) - JSON 보고서는 to_dict()로 만든다
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from pbl.exceptions import ConfigurationError

BRANCHES = ("plus", "minus", "transcritical", "linear_xi", "custom")


def _finite(value: Optional[float]) -> Optional[float]:
    """JSON용: NaN/inf → None"""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


@dataclass(frozen=True)
class BlowUp:
    """해가 유한 시간에 발산 - 예외가 아니라 값"""

    t_star: float
    bracket: Tuple[float, float]

    def to_dict(self) -> Dict[str, Any]:
        return {"status": "blew_up", "t_star": self.t_star, "bracket": list(self.bracket)}


@dataclass(frozen=True)
class Trajectory:
    """적분 궤적 (times는 적분 방향으로 정렬)"""

    times: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)
    status: str = "complete"
    blowup: Optional[BlowUp] = None

    @property
    def final(self) -> float:
        return float(self.states[-1])

    @property
    def blew_up(self) -> bool:
        return self.status == "blew_up"

    def to_frame(self):
        return pd.DataFrame({"t": self.times, "x": self.states})


@dataclass(frozen=True)
class QuasiSolutionTrace:
    """고정 경로에서 τ ↦ ξ(τ, ω) 표"""

    taus: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    branch: str
    lam: float
    seed: Optional[int]
    label: str = ""

    def __post_init__(self):
        if self.taus.shape != self.values.shape:
            raise ConfigurationError("trace taus and values must have the same length")
        if self.branch not in BRANCHES:
            raise ConfigurationError(f"unknown trace branch {self.branch!r}")
        finite = self.values[np.isfinite(self.values)]
        if self.branch == "plus" and np.any(finite <= 0):
            raise ConfigurationError("plus-branch trace must be positive")
        if self.branch == "minus" and np.any(finite >= 0):
            raise ConfigurationError("minus-branch trace must be negative")
        if self.branch == "linear_xi" and np.any(finite < 0):
            raise ConfigurationError("linear_xi trace must be nonnegative")

    @property
    def step(self) -> float:
        if self.taus.size < 2:
            raise ConfigurationError("trace needs at least two samples")
        return float(self.taus[1] - self.taus[0])

    def __len__(self) -> int:
        return int(self.taus.size)


@dataclass(frozen=True)
class AttractorInterval:
    """A(τ, ω) = [lower, upper]"""

    tau: float
    lower: float
    upper: float
    iterations: int
    residual: float
    converged: bool = True
    upper_history: List[float] = field(default_factory=list)
    lower_history: List[float] = field(default_factory=list)
    schedule: List[float] = field(default_factory=list)

    def __post_init__(self):
        if self.lower > self.upper + 1e-12 * max(1.0, abs(self.upper)):
            raise ConfigurationError(f"attractor interval is inverted: [{self.lower}, {self.upper}]")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tau": self.tau,
            "lower": self.lower,
            "upper": self.upper,
            "iterations": self.iterations,
            "residual": _finite(self.residual),
            "converged": self.converged,
            "schedule": list(self.schedule),
            "upper_history": [_finite(v) for v in self.upper_history],
            "lower_history": [_finite(v) for v in self.lower_history],
        }


@dataclass(frozen=True)
class PullbackResult:
    """pullback_limit 결과"""

    limit: Optional[float]
    converged: bool
    history: List[Tuple[float, Any]]
    diverged: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "limit": _finite(self.limit),
            "converged": self.converged,
            "diverged": self.diverged,
            "history": [
                [t, v.to_dict() if isinstance(v, BlowUp) else _finite(v)] for t, v in self.history
            ],
        }


@dataclass
class CheckReport:
    """{check, params, residual, verdict, tolerances}"""

    check: str
    params: Dict[str, Any]
    residual: Optional[float]
    verdict: str
    tolerances: Dict[str, Any] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict in ("pass", "inconclusive")

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "check": self.check,
            "params": self.params,
            "residual": _finite(self.residual),
            "verdict": self.verdict,
            "tolerances": self.tolerances,
        }
        if self.details:
            data["details"] = self.details
        return data
