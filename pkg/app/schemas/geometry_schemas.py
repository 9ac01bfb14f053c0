import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core.constants.imaging import (
    CYLINDER_HALF_LENGTH,
    DISC_RADIUS,
    PerturbationKind,
)


class Perturbation(BaseModel):
    """속도 섭동 δc⁻²(x) = α·1_support(x - center)"""
    model_config = ConfigDict(frozen=True)

    kind: PerturbationKind = Field(..., description="지지 영역 형태 (Ball / Cylinder / Disc)")
    epsilon: float = Field(..., gt=0, description="반지름 또는 반두께 ε")
    alpha: float = Field(default=1.0, description="섭동 진폭 α")
    center: Tuple[float, float, float] = Field(default=(0.0, 0.0, 0.0), description="지지 영역 중심")

    @field_validator("center")
    def check_center_finite(cls, v):
        if not all(math.isfinite(c) for c in v):
            raise ValueError("center 좌표는 유한해야 합니다")
        return v

    @property
    def center_array(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    @property
    def support_diameter(self) -> float:
        """지지 영역 지름 (가장 먼 두 점 사이 거리)"""
        if self.kind == PerturbationKind.BALL:
            return 2.0 * self.epsilon
        if self.kind == PerturbationKind.CYLINDER:
            return math.hypot(2.0 * self.epsilon, 2.0 * CYLINDER_HALF_LENGTH)
        return math.hypot(2.0 * self.epsilon, 2.0 * DISC_RADIUS)

    @property
    def support_volume(self) -> float:
        if self.kind == PerturbationKind.BALL:
            return 4.0 / 3.0 * math.pi * self.epsilon ** 3
        if self.kind == PerturbationKind.CYLINDER:
            return math.pi * self.epsilon ** 2 * 2.0 * CYLINDER_HALF_LENGTH
        return 2.0 * self.epsilon * math.pi * DISC_RADIUS ** 2


class SphereArray(BaseModel):
    """측정 구면 ∂B_R 위의 소스/수신기 배치"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    radius: float = Field(..., gt=0, description="구 반지름 R")
    source_positions: np.ndarray = Field(..., description="소스 위치 (n_sources, 3)")
    receiver_positions: np.ndarray = Field(..., description="수신기 위치 (n_receivers, 3)")
    max_spacing: float = Field(..., ge=0, description="최대 최근접 이웃 간격")

    @property
    def n_sources(self) -> int:
        return int(self.source_positions.shape[0])

    @property
    def n_receivers(self) -> int:
        return int(self.receiver_positions.shape[0])

    @property
    def source_density(self) -> float:
        return self.n_sources / (4.0 * math.pi * self.radius ** 2)

    @property
    def receiver_density(self) -> float:
        return self.n_receivers / (4.0 * math.pi * self.radius ** 2)

    def is_adequate(self, eta: float) -> bool:
        """반파장(πη) 이하 간격 여부"""
        return self.max_spacing <= math.pi * eta


class QuadratureRule(BaseModel):
    """섭동 지지 영역 위의 구적 규칙"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nodes: np.ndarray = Field(..., description="구적 노드 (n, 3)")
    weights: np.ndarray = Field(..., description="구적 가중치 (n,)")
    max_spacing: float = Field(..., ge=0, description="진동 방향 최대 노드 간격")

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    @property
    def volume(self) -> float:
        return float(np.sum(self.weights))
