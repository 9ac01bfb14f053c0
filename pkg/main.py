import time
import uuid
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from app.core.constants.error import ErrorMessages
from app.core.exceptions import BaseAppException, ErrorCode
from app.core.logger import get_logger, setup_logger
from app.core.setting import get_settings
from app.endpoints import experiments

settings = get_settings()

setup_logger()
logger = get_logger()


@asynccontextmanager
async def lifespan(app: FastAPI):
    # 결과 디렉토리 (실행 이력 SQLite 포함) 준비
    Path(settings.OUTPUT_DIR).mkdir(parents=True, exist_ok=True)
    logger.info(f"{settings.APP_NAME} v{settings.VERSION} 시작 | OUTPUT_DIR={settings.OUTPUT_DIR}")
    yield
    logger.info(f"{settings.APP_NAME} 종료")


app = FastAPI(
    title=settings.APP_NAME,
    description=settings.DESCRIPTION,
    version=settings.VERSION,
    debug=settings.DEBUG,
    lifespan=lifespan,
)


# 요청 단위 로깅 미들웨어 (X-Request-ID 를 응답 헤더로 돌려줌)
@app.middleware("http")
async def logging_middleware(request: Request, call_next):
    request_id = request.headers.get("X-Request-ID", uuid.uuid4().hex[:12])
    started = time.perf_counter()
    route = f"{request.method} {request.url.path}"

    with logger.contextualize(request_id=request_id):
        logger.info(f"[{request_id}] 요청 시작 | {route}")
        try:
            response = await call_next(request)
        except Exception as e:
            logger.error(f"[{request_id}] 요청 실패 | {route} | {e} | {time.perf_counter() - started:.3f}s")
            raise
        logger.info(
            f"[{request_id}] 요청 완료 | {route} | status={response.status_code} | "
            f"{time.perf_counter() - started:.3f}s"
        )
    response.headers["X-Request-ID"] = request_id
    return response


app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(experiments.router)


def _error_body(code: ErrorCode, message: str, detail=None) -> dict:
    return {"success": False, "error_code": code.value, "message": message, "detail": detail}


@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    """요청 본문 검증 실패 처리기.

    실험 설정은 요청 본문으로 들어오므로 pydantic 오류 위치를
    `body.config.source.omega0` 형태의 필드 경로로 돌려줍니다.

    Returns:
        JSONResponse: 400, error_code=E4004
    """
    errors = [
        {"field": ".".join(str(p) for p in err["loc"]), "message": err["msg"]}
        for err in exc.errors()
    ]
    logger.warning(f"요청 검증 실패 - Path: {request.url.path}, 오류 {len(errors)} 건: {errors}")
    return JSONResponse(
        status_code=400,
        content=_error_body(
            ErrorCode.INVALID_REQUEST_PARAMETER,
            ErrorMessages.get_message(ErrorCode.INVALID_REQUEST_PARAMETER),
            {"errors": errors},
        ),
    )


@app.exception_handler(BaseAppException)
async def custom_exception_handler(request: Request, exc: BaseAppException):
    """애플리케이션 예외를 예외가 가진 HTTP 상태 코드로 변환.

    설정 검증 400, 수치 오류 422, 재현성 실패 409, 파일/DB 500.
    """
    logger.error(
        f"커스텀 예외 발생 - Path: {request.url.path}, "
        f"Code: {exc.error_code.value}, Status: {exc.status_code}, Message: {exc.message}"
    )
    return JSONResponse(
        status_code=exc.status_code,
        content=_error_body(exc.error_code, exc.message, jsonable_encoder(exc.detail)),
    )


@app.exception_handler(Exception)
async def general_exception_handler(request: Request, exc: Exception):
    logger.exception(f"시스템 에러 - Path: {request.url.path}")
    return JSONResponse(
        status_code=500,
        content=_error_body(ErrorCode.SYSTEM_ERROR, ErrorMessages.get_message(ErrorCode.SYSTEM_ERROR)),
    )


@app.get("/health")
async def health_check():
    return {"status": "ok", "version": settings.VERSION}


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8090)
