from datetime import datetime
from typing import List, Optional

from sqlalchemy import desc, select, update
from sqlalchemy.orm import Session

from app.core.constants.error import ErrorMessages
from app.core.exceptions import DatabaseException, ErrorCode
from app.core.logger import get_logger
from app.models.history import RunHistory


logger = get_logger()


class RunHistoryRepository:
    """실험 실행 이력 Repository"""

    def __init__(self, session: Session):
        self.session = session

    def start_processing(self, command: str, config_hash: str, seed: Optional[int], out_dir: str) -> int:
        """실행 시작 기록 후 실행번호 반환"""
        try:
            row = RunHistory(
                command=command,
                config_hash=config_hash,
                seed=seed,
                out_dir=out_dir,
                strt_dtm=datetime.now(),
            )
            self.session.add(row)
            self.session.commit()
            logger.info(f"실행 이력 생성: run_id={row.run_id}, command={command}")
            return row.run_id
        except Exception as e:
            logger.error(f"실행 이력 생성 중 오류: {str(e)}")
            self.session.rollback()
            raise DatabaseException(
                message=ErrorMessages.get_message(ErrorCode.DATABASE_ERROR),
                error_code=ErrorCode.DATABASE_ERROR,
                detail={"command": command}
            )

    def update_history(self, run_id: int, **update_data) -> None:
        """
        이력 데이터 업데이트

        Args:
            run_id: 업데이트할 실행번호
            update_data: 업데이트할 데이터
        """
        try:
            if not update_data:
                logger.warning(f"업데이트할 데이터가 없습니다: run_id={run_id}")
                return None
            stmt = update(RunHistory).where(RunHistory.run_id == run_id).values(update_data)
            self.session.execute(stmt)
            self.session.commit()
        except Exception as e:
            logger.error(f"이력 데이터 업데이트 중 오류: {str(e)}")
            self.session.rollback()
            raise DatabaseException(
                message=ErrorMessages.get_message(ErrorCode.DATABASE_ERROR),
                error_code=ErrorCode.DATABASE_ERROR,
                detail={"run_id": run_id}
            )

    def success_processing(self, run_id: int, message: str = None) -> None:
        self.update_history(run_id, end_dtm=datetime.now(), fin_yn="Y", rmk_ctnt=message)

    def fail_processing(self, run_id: int, message: str) -> None:
        self.update_history(run_id, end_dtm=datetime.now(), fin_yn="N", rmk_ctnt=message)

    def get_recent(self, limit: int = 50) -> List[RunHistory]:
        stmt = select(RunHistory).order_by(desc(RunHistory.run_id)).limit(limit)
        return list(self.session.execute(stmt).scalars().all())
