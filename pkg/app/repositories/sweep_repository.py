import json
from datetime import datetime
from typing import Any, Dict, Optional

from sqlalchemy import func, select
from sqlalchemy.orm import Session

from app.core.constants.error import ErrorMessages
from app.core.exceptions import DatabaseException, ErrorCode
from app.core.logger import get_logger
from app.models.sweep import SweepPoint


logger = get_logger()


class SweepPointRepository:
    """스윕 격자점 캐시 Repository.

    결과는 JSON 으로 저장하며, float 은 repr 왕복으로 비트 단위 복원됩니다.
    """

    def __init__(self, session: Session):
        self.session = session

    def get_completed(self, cache_key: str) -> Optional[Any]:
        """완료된 격자점 결과 조회 (없거나 실패 기록이면 None)"""
        row = self.session.get(SweepPoint, cache_key)
        if row is None or row.fin_yn != "Y":
            return None
        return json.loads(row.result_json)

    def _save(self, cache_key: str, sweep_hash: str, point: Dict[str, Any], **values) -> None:
        try:
            row = self.session.get(SweepPoint, cache_key) or SweepPoint(cache_key=cache_key)
            row.sweep_hash = sweep_hash
            row.point_json = json.dumps(point, sort_keys=True)
            row.reg_dtm = datetime.now()
            for key, value in values.items():
                setattr(row, key, value)
            self.session.add(row)
            self.session.commit()
        except Exception as e:
            logger.error(f"스윕 캐시 저장 중 오류: {str(e)}")
            self.session.rollback()
            raise DatabaseException(
                message=ErrorMessages.get_message(ErrorCode.DATABASE_ERROR),
                error_code=ErrorCode.DATABASE_ERROR,
                detail={"cache_key": cache_key}
            )

    def success_processing(self, cache_key: str, sweep_hash: str, point: Dict[str, Any], result: Any) -> None:
        self._save(cache_key, sweep_hash, point, result_json=json.dumps(result), fin_yn="Y", rmk_ctnt=None)

    def fail_processing(self, cache_key: str, sweep_hash: str, point: Dict[str, Any], message: str) -> None:
        self._save(cache_key, sweep_hash, point, result_json=None, fin_yn="N", rmk_ctnt=message)

    def count_completed(self, sweep_hash: str) -> int:
        stmt = select(func.count()).select_from(SweepPoint).where(
            SweepPoint.sweep_hash == sweep_hash, SweepPoint.fin_yn == "Y"
        )
        return int(self.session.execute(stmt).scalar_one())
