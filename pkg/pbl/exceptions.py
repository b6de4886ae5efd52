"""
Exception hierarchy for PBL
모든 오류는 detail 메시지와 CLI 종료 코드(exit_code)를 가진다
"""
from typing import Optional, Tuple


class PBLError(Exception):
    """Base error (HTTPException처럼 detail + 코드)"""

    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "detail": self.detail}


class ConfigurationError(PBLError):
    """잘못된 설정/그리드/계수 (exit 2)"""

    exit_code = 2


class IncompatibleCoefficientsError(ConfigurationError):
    """표준 가정 c₂ < β₀ 위반"""


class AlignmentError(PBLError):
    """시각이 그리드 간격의 정수배가 아님"""


class OutOfSupportError(PBLError):
    """경로 그리드 밖에서 평가 요청"""


class InsufficientSupportError(PBLError):
    """경로 창이 부족함 - 더 넓은 그리드로 다시 샘플링해야 함"""

    def __init__(
        self,
        detail: str,
        required_window: Optional[Tuple[float, float]] = None,
        required_truncation: Optional[float] = None,
        truncation: bool = False,
    ):
        super().__init__(detail)
        self.required_window = required_window
        self.required_truncation = required_truncation
        # 꼬리 절단 상계에서 나온 요청인지 (MAX_TRUNCATION_WINDOW 적용)
        self.truncation = truncation

    def to_dict(self) -> dict:
        data = super().to_dict()
        data["required_window"] = list(self.required_window) if self.required_window else None
        data["required_truncation"] = self.required_truncation
        return data


class DomainError(PBLError):
    """공식의 정의역 밖 (예: λ ≤ 0 에서 x⁺)"""


class ConvergenceError(PBLError):
    """pullback 스케줄 안에서 수렴하지 않음"""


class MonotonicityViolation(PBLError):
    """단조 pullback 정리 위반 - 스킴 또는 support 버그"""


class CoverageError(PBLError):
    """trace가 요청된 τ 범위를 덮지 못함"""


class SchemeError(PBLError):
    """적분 스킴의 불변량(부호 보존 등) 위반"""
