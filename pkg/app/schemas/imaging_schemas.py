from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.schemas.geometry_schemas import Perturbation, QuadratureRule, SphereArray
from app.schemas.signal_schemas import FrequencyGrid, SourceModel


class DataMatrix(BaseModel):
    """수신기 × 주파수 복소 데이터 d̂(x_r, ω_k)"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: FrequencyGrid = Field(..., description="주파수 격자")
    values: np.ndarray = Field(..., description="복소 데이터 (n_receivers, n_frequencies)")
    meta: Dict[str, Any] = Field(default_factory=dict, description="생성 정보")

    @model_validator(mode="after")
    def check_shape(self):
        if self.values.ndim != 2 or self.values.shape[1] != self.grid.size:
            raise ValueError(
                f"데이터 형상 {self.values.shape} 이 주파수 격자 크기 {self.grid.size} 와 맞지 않습니다"
            )
        return self

    @property
    def n_receivers(self) -> int:
        return int(self.values.shape[0])


class ImageGrid(BaseModel):
    """이미지 평가점과 실수 이미지 값"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    points: np.ndarray = Field(..., description="평가점 (n, 3)")
    values: np.ndarray = Field(..., description="이미지 값 (n,)")
    imag_residual: float = Field(default=0.0, description="허수부 잔차 / 실수부 최대값")
    meta: Dict[str, Any] = Field(default_factory=dict, description="생성 정보")

    @model_validator(mode="after")
    def check_shape(self):
        if self.points.ndim != 2 or self.points.shape[1] != 3:
            raise ValueError("points 는 (n, 3) 배열이어야 합니다")
        if self.values.shape[0] != self.points.shape[0]:
            raise ValueError("values 길이가 points 개수와 맞지 않습니다")
        return self


class ImagingSetup(BaseModel):
    """실험 설정에서 유도한 계산 객체 묶음"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    config: Any = Field(..., description="ExperimentConfig")
    config_hash: str = Field(..., description="설정 해시")
    array: SphereArray
    perturbation: Perturbation
    quadrature: QuadratureRule
    source_model: SourceModel
    grid: FrequencyGrid
    points: np.ndarray = Field(..., description="이미지 평가점 (n, 3)")
    center_index: Optional[int] = Field(default=None, description="중심점 인덱스")
    far_indices: np.ndarray = Field(..., description="원거리 평가점 인덱스")
    c0: float
    eta: float
