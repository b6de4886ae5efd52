"""
Configuration module for PBL
환경 변수(PBL_ 접두사)와 .env 파일에서 기본값을 읽는다
"""
from pydantic_settings import BaseSettings
from typing import List, Optional


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    # Grid (기본 경로 창)
    GRID_T_MIN: float = -200.0
    GRID_T_MAX: float = 50.0
    GRID_STEP: float = 1e-3

    # Quadrature
    REL_TOL: float = 1e-8
    QUADRATURE_RULE: str = "exponential"

    # Pullback
    PULLBACK_SCHEDULE: List[float] = [5.0, 10.0, 20.0, 40.0]
    PULLBACK_TOL: float = 1e-6
    MAX_PULLBACK: float = 640.0
    MAX_WINDOW: float = 5000.0
    # 인증된 꼬리 절단점이 요구하는 창의 상한
    MAX_TRUNCATION_WINDOW: float = 60000.0
    # 안정성 판정에서 pullback 시각을 늘릴 수 있는 상한
    STABILITY_HORIZON: float = 2560.0

    # Integrator
    BLOWUP_THRESHOLD: float = 1e12
    SCHEME_TOL_FACTOR: float = 1.0

    # Coefficient sampling checks
    SAMPLE_WINDOW: float = 200.0
    SAMPLE_POINTS: int = 20001

    # Experiments
    DEFAULT_SEEDS: List[int] = [7]
    WORKERS: int = 1

    # Path cache (PBL_PATH_CACHE)
    PATH_CACHE: Optional[str] = None

    # Logging / artifacts
    LOG_DIR: str = "./logs"
    LOG_LEVEL: str = "INFO"
    RECORD_TIMING: bool = False

    PROJECT_NAME: str = "PBL - Pullback Bifurcation Lab"
    VERSION: str = "1.0.0"

    class Config:
        env_file = ".env"
        env_prefix = "PBL_"
        case_sensitive = True


# Global settings instance
settings = Settings()
