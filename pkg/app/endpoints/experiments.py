"""
실험 실행 API 엔드포인트

CLI 와 같은 서비스 함수를 호출하며, 계산은 동기 함수이므로
FastAPI 스레드 풀에서 실행되도록 일반 def 로 선언합니다.
"""
from typing import Optional

from fastapi import APIRouter

from app.core.constants.error import ErrorMessages
from app.db.base import session_scope
from app.repositories.history_repository import RunHistoryRepository
from app.schemas.api_schemas import (
    ExperimentRequest,
    ImageRequest,
    RunHistoryItem,
    RunHistoryResponse,
    RunResponse,
    SweepRequest,
    VerifyRequest,
)
from app.services.experiment_service import (
    cmd_forward,
    cmd_image,
    cmd_stability,
    cmd_sweep,
    cmd_verify,
)

router = APIRouter(tags=["experiments"])


def _ok(data: dict) -> RunResponse:
    return RunResponse(success=True, message=ErrorMessages.SUCCESS, data=data)


@router.post(
        "/experiments/forward",
        response_model=RunResponse,
        summary="Born 데이터 행렬 생성",
        description="실험 설정으로 소스 실현 하나에 대한 Born 근사 데이터 행렬을 계산해 저장합니다.",
    )
def run_forward(request: ExperimentRequest) -> RunResponse:
    """Born 데이터 행렬 생성.

    Args:
        request (ExperimentRequest): 실험 설정과 seed / 출력 디렉토리

    Returns:
        RunResponse: 설정 해시, seed, 생성 파일 경로
    """
    return _ok(cmd_forward(request.config, request.out_dir, request.seed, request.workers))


@router.post(
        "/experiments/image",
        response_model=RunResponse,
        summary="데이터 파일 이미징",
        description="forward 결과 데이터 파일을 spectral 또는 correlation 경로로 역전파합니다.",
    )
def run_image(request: ImageRequest) -> RunResponse:
    return _ok(cmd_image(request.config, request.data_path, request.method,
                         request.out_dir, request.seed, request.workers))


@router.post("/experiments/stability", response_model=RunResponse, summary="앙상블 안정성 리포트")
def run_stability(request: ExperimentRequest) -> RunResponse:
    return _ok(cmd_stability(request.config, request.out_dir, request.seed, request.workers))


@router.post("/experiments/sweep", response_model=RunResponse, summary="파라미터 격자 스윕")
def run_sweep(request: SweepRequest) -> RunResponse:
    return _ok(cmd_sweep(request.config, request.out_dir, request.seed, request.workers, table=request.table))


@router.post("/experiments/verify", response_model=RunResponse, summary="결과 재현성 검증")
def run_verify(request: VerifyRequest) -> RunResponse:
    return _ok(cmd_verify(request.artifact, seed=request.seed, workers=request.workers))


@router.get("/runs", response_model=RunHistoryResponse, summary="최근 실행 이력")
def get_runs(out_dir: Optional[str] = None, limit: int = 50) -> RunHistoryResponse:
    """출력 디렉토리의 최근 실행 이력 조회"""
    with session_scope(out_dir) as session:
        items = [RunHistoryItem.model_validate(row) for row in RunHistoryRepository(session).get_recent(limit)]
    return RunHistoryResponse(items=items, total=len(items))
