from loguru import logger
import sys
from pathlib import Path
from app.core.setting import get_settings

settings = get_settings()

# 로그 디렉토리
log_path = Path(settings.LOG_DIR)


def _is_main_execution() -> bool:
    """__main__ 실행인지 확인.

    CLI 모듈(`python -m app.cli`)이나 서비스 모듈을 직접 실행한 경우
    콘솔 로깅을 사용하기 위해 호출 스택을 확인합니다.

    Returns:
        bool: __main__ 모듈인 경우 True, 그렇지 않은 경우 False
    """
    import inspect

    for frame_info in inspect.stack():
        if frame_info.filename.endswith('.py'):
            frame_globals = frame_info.frame.f_globals
            if frame_globals.get('__name__') == '__main__':
                return True
    return False


# 로거 설정
def setup_logger(console: bool = None, level: str = None):
    """로거 초기화 및 설정.

    실행 환경에 따라 적절한 로깅 핸들러를 설정합니다.
    - 메인 실행 (CLI): 콘솔 출력 (stderr, 컬러 로깅)
    - 모듈 import (API 서버): 파일 출력 (로테이션, 압축)

    Args:
        console (bool): 콘솔 출력 강제 여부 (None 이면 실행 환경으로 판단)
        level (str): 로그 레벨 (None 이면 설정값 사용)
    """
    # 기본 핸들러 제거
    logger.remove()
    use_console = _is_main_execution() if console is None else console
    log_level = level or settings.LOG_LEVEL

    if use_console or not settings.LOG_TO_FILE:
        # 결과 파일이 stdout 으로 나가는 경우가 있어 stderr 사용
        logger.add(
            sys.stderr,
            format=settings.LOG_FORMAT,
            level=log_level,
            colorize=True
        )
    else:
        log_path.mkdir(parents=True, exist_ok=True)

        # 파일 출력 설정
        logger.add(
            Path.joinpath(log_path, "app.log"),
            rotation="100 MB",
            retention="10 days",
            compression="zip",
            format=settings.LOG_FORMAT,
            level=log_level,
            encoding="utf-8"
        )


# 로거 인스턴스 반환
def get_logger():
    return logger
