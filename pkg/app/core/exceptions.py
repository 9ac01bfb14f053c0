from typing import Any, Dict, Optional
from enum import Enum


"""계층적 예외 처리 시스템.

에러 코드 기반의 체계적인 예외 관리를 제공합니다.
각 예외는 CLI 종료 코드와 API 응답 코드를 함께 가집니다.
"""


class ErrorCode(Enum):
    """에러 코드 정의"""
    # 파일 관련 에러 (1000번대)
    FILE_NOT_FOUND = "E1001"
    FILE_EXTENSION_ERROR = "E1002"
    FILE_READ_ERROR = "E1003"
    FILE_WRITE_ERROR = "E1004"
    FILE_FORMAT_ERROR = "E1005"

    # 수치 계산 에러 (2000번대)
    INVALID_ARGUMENT = "E2001"
    SINGULAR_EVALUATION = "E2002"
    RESOLUTION_ERROR = "E2003"
    NUMERICAL_ERROR = "E2004"

    # 데이터베이스 에러 (3000번대)
    DATABASE_ERROR = "E3001"

    # 설정/요청 검증 에러 (4000번대)
    CONFIG_VALIDATION_ERROR = "E4001"
    MISSING_REQUIRED_FIELD = "E4002"
    CONFIG_HASH_MISMATCH = "E4003"
    INVALID_REQUEST_PARAMETER = "E4004"

    # 재현성 검증 에러 (6000번대)
    REPRODUCIBILITY_FAILURE = "E6001"

    # 시스템 에러 (9000번대)
    SYSTEM_ERROR = "E9001"
    UNKNOWN_ERROR = "E9999"


class ExitCode:
    """CLI 종료 코드"""
    OK = 0
    VALIDATION = 1
    RUNTIME = 2
    REPRODUCIBILITY = 3


class BaseAppException(Exception):
    """애플리케이션 기본 예외 클래스.

    모든 커스텀 예외의 기본 클래스입니다.
    에러 코드, 메시지, 종료 코드, 상세 정보를 포함합니다.

    Args:
        message (str): 에러 메시지
        error_code (ErrorCode): 에러 코드
        exit_code (int): CLI 종료 코드 (기본값: 2, 런타임 오류)
        status_code (int): HTTP 상태 코드 (기본값: 500)
        detail (dict): 추가 상세 정보 (선택사항)
    """

    def __init__(
        self,
        message: str,
        error_code: ErrorCode,
        exit_code: int = ExitCode.RUNTIME,
        status_code: int = 500,
        detail: Optional[Dict[str, Any]] = None
    ):
        self.message = message
        self.error_code = error_code
        self.exit_code = exit_code
        self.status_code = status_code
        self.detail = detail or {}
        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error_code": self.error_code.value,
            "message": self.message,
            "detail": self.detail
        }


class NumericalException(BaseAppException):
    """수치 계산 관련 예외 (런타임 오류)"""

    def __init__(self, message: str, error_code: ErrorCode, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message, error_code, exit_code=ExitCode.RUNTIME, status_code=422, detail=detail)


class InvalidArgumentException(NumericalException):
    """잘못된 인자 (검증 오류로 취급)"""

    def __init__(self, message: str, error_code: ErrorCode = ErrorCode.INVALID_ARGUMENT,
                 detail: Optional[Dict[str, Any]] = None):
        super().__init__(message, error_code, detail)
        self.exit_code = ExitCode.VALIDATION


class SingularEvaluationException(NumericalException):
    """그린 함수 특이점 평가 (일치하는 두 점)"""

    def __init__(self, message: str, error_code: ErrorCode = ErrorCode.SINGULAR_EVALUATION,
                 detail: Optional[Dict[str, Any]] = None):
        super().__init__(message, error_code, detail)


class ResolutionException(NumericalException):
    """구적법 해상도 부족"""

    def __init__(self, message: str, error_code: ErrorCode = ErrorCode.RESOLUTION_ERROR,
                 detail: Optional[Dict[str, Any]] = None):
        super().__init__(message, error_code, detail)


class ValidationException(BaseAppException):
    """설정/요청 검증 관련 예외"""

    def __init__(self, message: str, error_code: ErrorCode, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message, error_code, exit_code=ExitCode.VALIDATION, status_code=400, detail=detail)


class FileException(BaseAppException):
    """파일 관련 예외"""

    def __init__(self, message: str, error_code: ErrorCode, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message, error_code, exit_code=ExitCode.RUNTIME, status_code=500, detail=detail)


class DatabaseException(BaseAppException):
    """데이터베이스 관련 예외"""

    def __init__(self, message: str, error_code: ErrorCode, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message, error_code, exit_code=ExitCode.RUNTIME, status_code=500, detail=detail)


class ReproducibilityException(BaseAppException):
    """재현성 검증 실패 예외"""

    def __init__(self, message: str, error_code: ErrorCode = ErrorCode.REPRODUCIBILITY_FAILURE,
                 detail: Optional[Dict[str, Any]] = None):
        super().__init__(message, error_code, exit_code=ExitCode.REPRODUCIBILITY, status_code=409, detail=detail)


class SystemException(BaseAppException):
    """시스템 관련 예외"""

    def __init__(self, message: str, error_code: ErrorCode, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message, error_code, exit_code=ExitCode.RUNTIME, status_code=500, detail=detail)
