from typing import Any, Dict, List, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class EnsembleStats(BaseModel):
    """실현 앙상블의 평가점별 평균/표준편차"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n_realizations: int = Field(..., ge=2, description="실현 개수")
    points: np.ndarray = Field(..., description="평가점 (n, 3)")
    mean: np.ndarray = Field(..., description="표본 평균")
    std: np.ndarray = Field(..., description="표본 표준편차 (ddof=1)")
    meta: Dict[str, Any] = Field(default_factory=dict, description="seed, 설정 해시 등")

    @property
    def mc_error(self) -> np.ndarray:
        """평균의 몬테카를로 표준오차"""
        return self.std / np.sqrt(self.n_realizations)


class ScalingFit(BaseModel):
    """로그-로그 (또는 로그-선형) 회귀 결과"""
    model_config = ConfigDict(frozen=True)

    variable: str = Field(..., description="독립 변수 이름")
    model: Literal["power", "log_linear"] = Field(default="power", description="회귀 모형")
    x: List[float] = Field(..., description="독립 변수 값")
    y: List[float] = Field(..., description="관측값")
    slope: float = Field(..., description="기울기")
    intercept: float = Field(..., description="절편")
    r2: float = Field(..., description="결정 계수")


class StabilityCheck(BaseModel):
    """안정성 판정 한 줄"""
    name: str
    measured: float
    predicted: float
    threshold: float
    passed: bool


class StabilityReport(BaseModel):
    """평균/표준편차 비율과 대비 판정 결과"""
    kind: str
    source_kind: str
    epsilon: float
    eta: float
    time_scale: float = Field(..., description="T_τ (blended) 또는 T (stationary)")
    n_realizations: int
    mean_center: float
    std_center: float
    mean_far_max: float
    std_far_max: float
    expected_mean_center: float = Field(..., description="이산 어레이 정확 기댓값")
    analytic_mean_center: float = Field(..., description="연속체 커널 기댓값 × ρ_s ρ_r")
    checks: List[StabilityCheck] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)
