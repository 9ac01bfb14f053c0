from sqlalchemy import Column, DateTime, Integer, String, Text

from app.db.base import Base


class RunHistory(Base):
    """실험 실행 이력 테이블"""
    __tablename__ = "run_history"

    run_id = Column(Integer, primary_key=True, autoincrement=True, comment="실행번호")
    command = Column(String(50), nullable=False, comment="서브커맨드명")
    config_hash = Column(String(64), nullable=False, comment="설정 해시")
    seed = Column(Integer, comment="루트 seed")
    out_dir = Column(String(1000), comment="출력 디렉토리")
    strt_dtm = Column(DateTime, comment="시작일시")
    end_dtm = Column(DateTime, comment="종료일시")
    fin_yn = Column(String(1), comment="완료여부 (Y/N, 진행 중이면 NULL)")
    rmk_ctnt = Column(Text, comment="비고내용")
