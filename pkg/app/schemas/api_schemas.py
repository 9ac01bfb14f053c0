from datetime import datetime
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.core.constants.imaging import ImagingMethod
from app.schemas.config_schemas import ExperimentConfig, SweepConfig


class RunOptions(BaseModel):
    seed: Optional[int] = Field(default=None, ge=0, description="루트 seed (설정값 대체)")
    out_dir: Optional[str] = Field(default=None, description="출력 디렉토리")
    workers: Optional[int] = Field(default=None, ge=0, description="작업자 수")


class ExperimentRequest(RunOptions):
    config: ExperimentConfig = Field(..., description="실험 설정")


class ImageRequest(ExperimentRequest):
    data_path: str = Field(..., description="forward 결과 data.bsid 경로")
    method: ImagingMethod = Field(default=ImagingMethod.SPECTRAL, description="이미징 경로")


class SweepRequest(RunOptions):
    config: SweepConfig = Field(..., description="스윕 설정")
    table: bool = Field(default=False, description="차수 표 재현 모드")


class VerifyRequest(BaseModel):
    artifact: str = Field(..., description="결과 디렉토리 또는 provenance.json")
    seed: Optional[int] = Field(default=None, ge=0, description="검증 격자점 선택 seed")
    workers: Optional[int] = Field(default=None, ge=0)


class RunResponse(BaseModel):
    success: bool = Field(..., description="성공 여부")
    message: str = Field(..., description="메시지")
    data: Dict[str, Any] = Field(default_factory=dict, description="결과 요약")


class RunHistoryItem(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    run_id: int
    command: str
    config_hash: str
    seed: Optional[int] = None
    out_dir: Optional[str] = None
    strt_dtm: Optional[datetime] = None
    end_dtm: Optional[datetime] = None
    fin_yn: Optional[str] = None
    rmk_ctnt: Optional[str] = None


class RunHistoryResponse(BaseModel):
    items: List[RunHistoryItem] = Field(default_factory=list)
    total: int = Field(..., description="조회 건수")
