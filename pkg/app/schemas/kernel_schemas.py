import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.constants.imaging import (
    Location,
    Monomial,
    PerturbationKind,
    Relation,
    SourceKind,
)
from app.schemas.signal_schemas import FrequencyGrid, PulseSpec, StationaryNoiseModel


class KernelModel(BaseModel):
    """연속체 커널 평가에 필요한 소스 스펙트럼 정보"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    source_kind: SourceKind = Field(..., description="소스 모델 종류")
    grid: FrequencyGrid = Field(..., description="양의 주파수 구적 격자")
    pulse: Optional[PulseSpec] = Field(default=None, description="blended 펄스")
    noise: Optional[StationaryNoiseModel] = Field(default=None, description="stationary 노이즈")
    t_tau: Optional[float] = Field(default=None, gt=0, description="지연 분포 시간 스케일 T_τ")

    @model_validator(mode="after")
    def check_components(self):
        if self.source_kind == SourceKind.BLENDED and (self.pulse is None or self.t_tau is None):
            raise ValueError("blended 커널은 pulse 와 t_tau 가 필요합니다")
        if self.source_kind == SourceKind.STATIONARY and self.noise is None:
            raise ValueError("stationary 커널은 noise 가 필요합니다")
        return self


class OrderTerm(BaseModel):
    """차수 단항식과 관계 (≃ / ≲)"""
    model_config = ConfigDict(frozen=True)

    monomial: Monomial = Field(..., description="(ε, η, |ln ε|, 시간) 지수")
    relation: Relation = Field(..., description="관계")

    def evaluate(self, epsilon: float, eta: float, time_scale: float = 1.0) -> float:
        """단항식을 주어진 값에서 평가"""
        a, b, c, d = self.monomial
        return epsilon ** a * eta ** b * abs(math.log(epsilon)) ** c * time_scale ** d

    def label(self) -> str:
        names = ("ε", "η", "|ln ε|", "T")
        parts = [f"{n}^{e:g}" for n, e in zip(names, self.monomial) if e != 0]
        return f"{self.relation.value} " + (" ".join(parts) if parts else "1")


class AsymptoticPrediction(BaseModel):
    """(형태, 위치, 소스) 조합의 평균/표준편차 차수"""
    model_config = ConfigDict(frozen=True)

    kind: PerturbationKind
    location: Location
    source_kind: SourceKind
    mean: OrderTerm
    std: OrderTerm


class QmcEstimate(BaseModel):
    """준몬테카를로 적분 결과와 오차 추정"""
    model_config = ConfigDict(frozen=True)

    value: float = Field(..., description="전체 점 추정값")
    error: float = Field(..., ge=0, description="|J_N - J_{N/2}|")
    n_points: int = Field(..., gt=0, description="사용한 점 개수")
