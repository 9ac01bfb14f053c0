"""SQLAlchemy 기반 SQLite 데이터베이스 연결 관리.

실행 이력과 스윕 캐시는 출력 디렉토리 아래 SQLite 파일에 저장합니다.
출력 디렉토리마다 엔진을 하나씩 만들어 재사용합니다.
"""
from contextlib import contextmanager
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Union

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import Session, declarative_base, sessionmaker

from app.core.setting import get_settings

settings = get_settings()

# Base 클래스 선언 - 모든 모델 클래스의 기본 클래스
Base = declarative_base()


def database_path(output_dir: Union[str, Path, None] = None) -> Path:
    """출력 디렉토리의 SQLite 파일 경로"""
    root = Path(output_dir or settings.OUTPUT_DIR)
    root.mkdir(parents=True, exist_ok=True)
    return root / settings.CACHE_DB_NAME


@lru_cache(maxsize=32)
def _engine(path: str) -> Engine:
    engine = create_engine(
        f"sqlite:///{path}",
        echo=False,  # SQL 쿼리 로깅 비활성화
        future=True,
        connect_args={"check_same_thread": False},  # 스레드 풀 작업자 간 공유
    )
    Base.metadata.create_all(engine)
    return engine


def get_session_factory(output_dir: Union[str, Path, None] = None) -> sessionmaker:
    # 모델 등록 (create_all 전에 import 필요)
    import app.models.history  # noqa: F401
    import app.models.sweep  # noqa: F401

    return sessionmaker(
        _engine(str(database_path(output_dir).resolve())),
        class_=Session,
        expire_on_commit=False,  # 커밋 후에도 객체 접근 가능
        autoflush=False,
    )


@contextmanager
def session_scope(output_dir: Union[str, Path, None] = None) -> Iterator[Session]:
    """커밋/롤백을 관리하는 세션 컨텍스트"""
    session = get_session_factory(output_dir)()
    try:
        yield session
        session.commit()
    except Exception:
        session.rollback()
        raise
    finally:
        session.close()
