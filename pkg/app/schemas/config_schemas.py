"""실험/스윕 설정 스키마

YAML 설정 파일은 이 모델들로 검증되며, 설정 해시는 output 항목을
제외한 정규화 JSON 에서 계산됩니다.
"""

import math
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.constants.imaging import (
    BAND_HALF_WIDTH,
    DEFAULT_FREQUENCY_NODES,
    DEFAULT_OVERSAMPLING,
    SUPPORT_TO_RADIUS_FACTOR,
    GridKind,
    PerturbationKind,
    SourceKind,
)
from app.schemas.geometry_schemas import Perturbation
from app.schemas.signal_schemas import DelayModel, check_tabulated_spectrum

Point3 = Tuple[float, float, float]


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class MediumConfig(_StrictModel):
    c0: float = Field(default=1.0, gt=0, description="배경 속도 c0")


class ArrayConfig(_StrictModel):
    radius: float = Field(..., gt=0, description="측정 구 반지름 R")
    n_sources: int = Field(..., ge=1, description="소스 개수")
    n_receivers: int = Field(..., ge=1, description="수신기 개수")


class NoiseConfig(_StrictModel):
    shape: Literal["gaussian_band", "flat_band", "tabulated"] = Field(default="gaussian_band")
    duration: Optional[float] = Field(default=None, gt=0, description="기록 시간 T")
    omegas: Optional[List[float]] = Field(default=None)
    values: Optional[List[float]] = Field(default=None)

    @model_validator(mode="after")
    def check_tabulated(self):
        if self.shape == "tabulated":
            check_tabulated_spectrum(self.omegas, self.values)
        return self


class SourceConfig(_StrictModel):
    kind: SourceKind = Field(default=SourceKind.BLENDED, description="소스 모델")
    omega0: float = Field(..., gt=0, description="중심 주파수 ω0 (η = c0/ω0)")
    bandwidth: float = Field(..., gt=0, description="대역폭 b")
    delays: DelayModel = Field(default_factory=DelayModel, description="blended 지연 분포")
    noise: NoiseConfig = Field(default_factory=NoiseConfig, description="stationary 노이즈")

    @model_validator(mode="after")
    def check_band(self):
        if self.omega0 - BAND_HALF_WIDTH * self.bandwidth <= 0:
            raise ValueError(
                f"주파수 대역 [ω0-3b, ω0+3b] 가 양수 영역을 벗어납니다 (ω0={self.omega0}, b={self.bandwidth})"
            )
        if self.kind == SourceKind.STATIONARY and self.noise.duration is None:
            raise ValueError("stationary 소스는 noise.duration 이 필요합니다")
        return self


class FrequencyConfig(_StrictModel):
    kind: GridKind = Field(default=GridKind.DFT, description="주파수 격자 종류")
    n_nodes: int = Field(default=DEFAULT_FREQUENCY_NODES, ge=1, description="Gauss-Legendre 노드 수")
    period: Optional[float] = Field(default=None, gt=0, description="DFT 격자 기록 시간 (미지정 시 자동)")


class QuadratureConfig(_StrictModel):
    level: int = Field(default=2, ge=1, description="구적 레벨 (방향당 최소 노드 수)")
    resolve_eta: bool = Field(default=True, description="파장 η 해상 노드 수 적용")


class ImageConfig(_StrictModel):
    kind: Literal["probe", "points", "line", "plane", "box"] = Field(default="probe", description="평가점 구성")
    points: Optional[List[Point3]] = Field(default=None, description="kind=points 좌표")
    start: Optional[Point3] = Field(default=None, description="kind=line 시작점")
    end: Optional[Point3] = Field(default=None, description="kind=line 끝점")
    n: int = Field(default=21, ge=1, description="방향당 점 개수")
    plane: Literal["xy", "xz", "yz"] = Field(default="xy")
    half_width: float = Field(default=0.5, gt=0)
    offset: float = Field(default=0.0, description="plane 법선 방향 오프셋")
    include_probe: bool = Field(default=False, description="중심/원거리 평가점 추가")

    @model_validator(mode="after")
    def check_kind(self):
        if self.kind == "points" and not self.points:
            raise ValueError("kind=points 는 비어 있지 않은 points 목록이 필요합니다")
        if self.kind == "line" and (self.start is None or self.end is None):
            raise ValueError("kind=line 은 start / end 가 필요합니다")
        return self


class EnsembleConfig(_StrictModel):
    n_realizations: int = Field(default=100, ge=2, description="실현 개수")
    fixed_seed: bool = Field(default=False, description="모든 실현에 같은 seed 사용")


class TimeConfig(_StrictModel):
    oversampling: float = Field(default=DEFAULT_OVERSAMPLING, gt=1, description="Nyquist 대비 샘플링 배수")


class OutputConfig(_StrictModel):
    dir: Optional[str] = Field(default=None, description="출력 디렉토리 (해시 제외)")


class ExperimentConfig(_StrictModel):
    """단일 실험 설정"""
    medium: MediumConfig = Field(default_factory=MediumConfig)
    array: ArrayConfig
    perturbation: Perturbation
    source: SourceConfig
    frequency: FrequencyConfig = Field(default_factory=FrequencyConfig)
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    image: ImageConfig = Field(default_factory=ImageConfig)
    ensemble: EnsembleConfig = Field(default_factory=EnsembleConfig)
    time: TimeConfig = Field(default_factory=TimeConfig)
    seed: int = Field(default=0, ge=0, description="루트 seed")
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def check_support_inside(self):
        p = self.perturbation
        enclosing = 2.0 * (math.sqrt(sum(c * c for c in p.center)) + 0.5 * p.support_diameter)
        if SUPPORT_TO_RADIUS_FACTOR * enclosing > self.array.radius:
            raise ValueError(
                f"섭동 지지 영역(지름 {enclosing:.4g})이 R={self.array.radius} 에 비해 너무 큽니다"
            )
        return self

    @property
    def eta(self) -> float:
        return self.medium.c0 / self.source.omega0

    def hash_payload(self) -> dict:
        return self.model_dump(mode="json", exclude={"output"})


class TableConfig(_StrictModel):
    epsilons: List[float] = Field(default=[1e-4, 2e-4, 5e-4, 1e-3, 2e-3], description="ε 스윕 값 (η 고정)")
    etas: List[float] = Field(default=[0.02, 0.03, 0.05, 0.08, 0.16], description="η 스윕 값 (ε 고정)")
    epsilon_fixed: float = Field(default=1e-3, gt=0)
    eta_fixed: float = Field(default=0.05, gt=0)


class SweepConfig(_StrictModel):
    """파라미터 격자 스윕 설정"""
    mode: Literal["kernel", "ensemble", "table"] = Field(default="kernel", description="스윕 모드")
    kinds: List[PerturbationKind] = Field(
        default=[PerturbationKind.BALL, PerturbationKind.CYLINDER, PerturbationKind.DISC]
    )
    epsilons: List[float] = Field(default_factory=list, description="kernel 모드 ε 값")
    etas: List[float] = Field(default_factory=list, description="kernel 모드 η 값")
    t_tau: float = Field(default=1.0, gt=0, description="kernel 모드 std 관측량의 T_τ")
    include_std: bool = Field(default=True, description="J1/J2 (std 관측량) 계산 여부")
    variable: Literal["t_tau", "duration", "eta", "epsilon"] = Field(default="t_tau", description="ensemble 모드 변수")
    values: List[float] = Field(default_factory=list, description="ensemble 모드 변수 값")
    quadrature_level: int = Field(default=2, ge=1)
    qmc_log2_points: Optional[int] = Field(default=None, ge=4, le=24)
    table: TableConfig = Field(default_factory=TableConfig)
    experiment: Optional[ExperimentConfig] = Field(default=None, description="ensemble 모드 기본 실험")
    seed: int = Field(default=0, ge=0)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def check_mode(self):
        if not self.kinds:
            raise ValueError("kinds 는 비어 있을 수 없습니다")
        if self.mode == "kernel" and (not self.epsilons or not self.etas):
            raise ValueError("kernel 모드는 epsilons / etas 가 필요합니다")
        if self.mode == "ensemble" and (self.experiment is None or not self.values):
            raise ValueError("ensemble 모드는 experiment 와 values 가 필요합니다")
        for name, vals in (("epsilons", self.epsilons), ("etas", self.etas), ("values", self.values)):
            if any(v <= 0 for v in vals):
                raise ValueError(f"{name} 값은 양수여야 합니다")
        return self

    def hash_payload(self) -> dict:
        payload = self.model_dump(mode="json", exclude={"output"})
        if payload.get("experiment"):
            payload["experiment"].pop("output", None)
        return payload
