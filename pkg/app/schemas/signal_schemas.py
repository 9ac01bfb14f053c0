from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import trapezoid

from app.core.constants.imaging import GridKind, SourceKind


class PulseSpec(BaseModel):
    """가우시안 변조 코사인 펄스 f(t) = cos(ω0 t)·exp(-b²t²/2)"""
    model_config = ConfigDict(frozen=True)

    omega0: float = Field(..., gt=0, description="반송 주파수 ω0")
    bandwidth: float = Field(..., gt=0, description="대역폭 b")

    @model_validator(mode="after")
    def check_band(self):
        if self.bandwidth >= self.omega0:
            raise ValueError("대역폭 b 는 반송 주파수 ω0 보다 작아야 합니다")
        return self


class DelayModel(BaseModel):
    """블렌딩 소스의 랜덤 시간 지연 분포 p_τ"""
    model_config = ConfigDict(frozen=True)

    law: Literal["uniform", "triangular", "tabulated"] = Field(default="uniform", description="지연 분포")
    tau_max: float = Field(default=1.0, gt=0, description="지지 구간 [-τ_max, τ_max]")
    times: Optional[List[float]] = Field(default=None, description="표 형식 pdf 의 시간 격자")
    density: Optional[List[float]] = Field(default=None, description="표 형식 pdf 값")

    @model_validator(mode="after")
    def check_tabulated(self):
        if self.law != "tabulated":
            return self
        if not self.times or not self.density or len(self.times) != len(self.density):
            raise ValueError("tabulated 분포는 같은 길이의 times / density 가 필요합니다")
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.density, dtype=float)
        if np.any(np.diff(t) <= 0):
            raise ValueError("times 는 순증가해야 합니다")
        if np.any(p < 0):
            raise ValueError("density 는 음수가 될 수 없습니다")
        mass = float(trapezoid(p, t))
        if abs(mass - 1.0) > 1e-8:
            raise ValueError(f"density 적분이 1 이 아닙니다: {mass!r}")
        mean = float(trapezoid(p * t, t))
        if abs(mean) > 1e-8 * (t[-1] - t[0]):
            raise ValueError(f"지연 분포의 평균이 0 이 아닙니다: {mean!r}")
        return self


def check_tabulated_spectrum(omegas: Optional[List[float]], values: Optional[List[float]]) -> None:
    """표 형식 파워 스펙트럼 검증: 같은 길이, 순증가 주파수, F̂ ≥ 0"""
    if not omegas or not values or len(omegas) != len(values):
        raise ValueError("tabulated 스펙트럼은 같은 길이의 omegas / values 가 필요합니다")
    if np.any(np.diff(np.asarray(omegas, dtype=float)) <= 0):
        raise ValueError("tabulated 스펙트럼 omegas 는 순증가해야 합니다")
    if min(values) < 0:
        raise ValueError(f"파워 스펙트럼 F̂ 는 음수일 수 없습니다: {min(values)!r}")


class StationaryNoiseModel(BaseModel):
    """정상 가우시안 노이즈 소스 (파워 스펙트럼 F̂)"""
    model_config = ConfigDict(frozen=True)

    shape: Literal["gaussian_band", "flat_band", "tabulated"] = Field(default="gaussian_band", description="스펙트럼 형태")
    omega0: float = Field(..., gt=0, description="중심 주파수")
    bandwidth: float = Field(..., gt=0, description="대역폭")
    duration: float = Field(..., gt=0, description="기록 시간 T")
    omegas: Optional[List[float]] = Field(default=None, description="tabulated 스펙트럼 주파수")
    values: Optional[List[float]] = Field(default=None, description="tabulated 스펙트럼 값")

    @model_validator(mode="after")
    def check_tabulated(self):
        if self.shape == "tabulated":
            check_tabulated_spectrum(self.omegas, self.values)
        return self


class SourceModel(BaseModel):
    """소스 시간 모델 (blended 또는 stationary)"""
    model_config = ConfigDict(frozen=True)

    kind: SourceKind = Field(..., description="소스 모델 종류")
    pulse: Optional[PulseSpec] = Field(default=None, description="blended 펄스")
    delays: Optional[DelayModel] = Field(default=None, description="blended 지연 분포")
    noise: Optional[StationaryNoiseModel] = Field(default=None, description="stationary 노이즈")

    @model_validator(mode="after")
    def check_components(self):
        if self.kind == SourceKind.BLENDED and (self.pulse is None or self.delays is None):
            raise ValueError("blended 모델은 pulse 와 delays 가 필요합니다")
        if self.kind == SourceKind.STATIONARY and self.noise is None:
            raise ValueError("stationary 모델은 noise 가 필요합니다")
        return self


class FrequencyGrid(BaseModel):
    """양의 주파수 대역 구적 격자"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: GridKind = Field(..., description="격자 종류")
    omegas: np.ndarray = Field(..., description="주파수 노드 (오름차순)")
    weights: np.ndarray = Field(..., description="∫dω 구적 가중치")
    period: Optional[float] = Field(default=None, description="DFT 격자의 기록 시간 T")

    @model_validator(mode="after")
    def check_nodes(self):
        if self.omegas.ndim != 1 or self.omegas.shape != self.weights.shape or self.omegas.size == 0:
            raise ValueError("omegas / weights 형상이 올바르지 않습니다")
        if np.any(np.diff(self.omegas) <= 0):
            raise ValueError("omegas 는 순증가해야 합니다")
        if self.omegas[0] <= 0:
            raise ValueError("주파수 대역은 양수 영역에 있어야 합니다")
        if self.kind == GridKind.DFT and not self.period:
            raise ValueError("DFT 격자는 period 가 필요합니다")
        return self

    @property
    def size(self) -> int:
        return int(self.omegas.size)
