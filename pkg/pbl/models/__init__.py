"""
Models package
"""
from pbl.models.results import (
    AttractorInterval,
    BlowUp,
    CheckReport,
    PullbackResult,
    QuasiSolutionTrace,
    Trajectory,
)
from pbl.models.schemas import ExperimentConfig, load_config

__all__ = [
    "AttractorInterval",
    "BlowUp",
    "CheckReport",
    "PullbackResult",
    "QuasiSolutionTrace",
    "Trajectory",
    "ExperimentConfig",
    "load_config",
]
