from app.core.exceptions import ErrorCode


class ErrorMessages:
    """에러 메시지 매핑"""

    MESSAGES = {
        ErrorCode.FILE_NOT_FOUND: "파일을 찾을 수 없습니다.",
        ErrorCode.FILE_EXTENSION_ERROR: "지원하지 않는 파일 확장자입니다.",
        ErrorCode.FILE_READ_ERROR: "파일을 읽는 중 오류가 발생했습니다.",
        ErrorCode.FILE_WRITE_ERROR: "파일을 저장하는 중 오류가 발생했습니다.",
        ErrorCode.FILE_FORMAT_ERROR: "파일 형식이 올바르지 않습니다.",
        ErrorCode.INVALID_ARGUMENT: "입력 인자가 유효하지 않습니다.",
        ErrorCode.SINGULAR_EVALUATION: "그린 함수를 일치하는 두 점에서 평가할 수 없습니다.",
        ErrorCode.RESOLUTION_ERROR: "구적 노드 간격이 파장 스케일을 해상하지 못합니다.",
        ErrorCode.NUMERICAL_ERROR: "수치 계산 중 오류가 발생했습니다.",
        ErrorCode.DATABASE_ERROR: "데이터베이스 처리 중 오류가 발생했습니다.",
        ErrorCode.CONFIG_VALIDATION_ERROR: "설정 파일 검증에 실패했습니다.",
        ErrorCode.MISSING_REQUIRED_FIELD: "필수 항목이 누락되었습니다.",
        ErrorCode.CONFIG_HASH_MISMATCH: "데이터 파일의 설정 해시가 현재 설정과 일치하지 않습니다.",
        ErrorCode.INVALID_REQUEST_PARAMETER: "요청 파라미터가 유효하지 않습니다.",
        ErrorCode.REPRODUCIBILITY_FAILURE: "재계산 결과가 저장된 결과와 일치하지 않습니다.",
        ErrorCode.SYSTEM_ERROR: "시스템 오류가 발생했습니다.",
    }

    SUCCESS = "처리가 완료되었습니다."

    @classmethod
    def get_message(cls, error_code: ErrorCode) -> str:
        return cls.MESSAGES.get(error_code, "알 수 없는 오류가 발생했습니다.")
