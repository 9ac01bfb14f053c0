from sqlalchemy import Column, DateTime, String, Text

from app.db.base import Base


class SweepPoint(Base):
    """스윕 격자점 결과 캐시 (내용 주소 방식)"""
    __tablename__ = "sweep_point"

    cache_key = Column(String(64), primary_key=True, comment="격자점 파라미터 + 설정 해시의 sha256")
    sweep_hash = Column(String(64), nullable=False, index=True, comment="스윕 설정 해시")
    point_json = Column(Text, nullable=False, comment="격자점 파라미터")
    result_json = Column(Text, comment="계산 결과")
    fin_yn = Column(String(1), nullable=False, comment="완료여부")
    rmk_ctnt = Column(Text, comment="실패 사유")
    reg_dtm = Column(DateTime, nullable=False, comment="등록일시")
