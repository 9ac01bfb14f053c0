"""파일 관련 공통 기능 유틸리티.

결과 CSV/JSON 저장, 데이터 행렬 바이너리 컨테이너 읽기/쓰기를 제공합니다.
같은 입력이면 바이트 단위로 같은 파일이 나오도록 정렬과 포맷을 고정합니다.
"""

import hashlib
import json
import struct
import traceback
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import pandas as pd

from app.core.constants.error import ErrorCode, ErrorMessages
from app.core.constants.imaging import GridKind
from app.core.exceptions import FileException
from app.core.logger import get_logger
from app.core.setting import get_settings
from app.schemas.imaging_schemas import DataMatrix, ImageGrid
from app.schemas.signal_schemas import FrequencyGrid

settings = get_settings()
logger = get_logger()

# 데이터 행렬 컨테이너: magic + uint32 헤더 길이 + JSON 헤더 + little-endian complex128
DATA_MAGIC = b"BSIDATA1"
DATA_DTYPE = "<c16"


def validate_file(file_path: Union[str, Path], allowed_exts: List[str]) -> Path:
    """파일 유효성 검사.

    Args:
        file_path (str | Path): 검증할 파일 경로
        allowed_exts (List[str]): 허용 확장자 (점 제외, 대소문자 무시)

    Raises:
        FileException:
            - 지원하지 않는 확장자일 때 (FILE_EXTENSION_ERROR)
            - 파일이 존재하지 않을 때 (FILE_NOT_FOUND)
    """
    path = Path(file_path)
    if path.suffix.lstrip(".").upper() not in [e.upper() for e in allowed_exts]:
        logger.error(f"파일 확장자가 올바르지 않습니다: {path}")
        raise FileException(
            message=ErrorMessages.get_message(ErrorCode.FILE_EXTENSION_ERROR),
            error_code=ErrorCode.FILE_EXTENSION_ERROR,
            detail={"file_path": str(path), "allowed": allowed_exts}
        )
    if not path.exists():
        logger.error(f"파일이 존재하지 않습니다: {path}")
        raise FileException(
            message=ErrorMessages.get_message(ErrorCode.FILE_NOT_FOUND),
            error_code=ErrorCode.FILE_NOT_FOUND,
            detail={"file_path": str(path)}
        )
    return path


def _write_error(path: Path) -> FileException:
    logger.error(f"파일 저장 중 오류 발생: \n{traceback.format_exc()}")
    return FileException(
        message=ErrorMessages.get_message(ErrorCode.FILE_WRITE_ERROR),
        error_code=ErrorCode.FILE_WRITE_ERROR,
        detail={"file_path": str(path)}
    )


def save_dataframe_to_csv(df: pd.DataFrame, file_path: Union[str, Path]) -> str:
    """
    DataFrame 을 CSV 로 저장하는 공통 함수 (float 은 %.17g 로 왕복 보존)

    Returns:
        저장된 파일의 전체 경로
    """
    path = Path(file_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(
            path,
            index=False,
            encoding=settings.CSV_OUTPUT_ENCODING,
            float_format=settings.CSV_FLOAT_FORMAT,
            lineterminator="\n",
        )
    except Exception:
        raise _write_error(path)
    logger.info(f"CSV 파일 저장 완료: {path} ({len(df)}행)")
    return str(path)


def read_csv_file(file_path: Union[str, Path], required_cols: List[str]) -> pd.DataFrame:
    path = validate_file(file_path, ["CSV"])
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except Exception:
        logger.error(f"CSV 읽기 중 오류: \n{traceback.format_exc()}")
        raise FileException(
            message=ErrorMessages.get_message(ErrorCode.FILE_READ_ERROR),
            error_code=ErrorCode.FILE_READ_ERROR,
            detail={"file_path": str(path)}
        )
    missing = [c for c in required_cols if c not in df.columns]
    if missing:
        raise FileException(
            message=ErrorMessages.get_message(ErrorCode.FILE_FORMAT_ERROR),
            error_code=ErrorCode.FILE_FORMAT_ERROR,
            detail={"file_path": str(path), "missing_columns": missing}
        )
    return df


def save_json(payload: Any, file_path: Union[str, Path]) -> str:
    """키 정렬 JSON 저장"""
    path = Path(file_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    except Exception:
        raise _write_error(path)
    return str(path)


def load_json(file_path: Union[str, Path]) -> Any:
    path = validate_file(file_path, ["JSON"])
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except Exception:
        logger.error(f"JSON 읽기 중 오류: \n{traceback.format_exc()}")
        raise FileException(
            message=ErrorMessages.get_message(ErrorCode.FILE_READ_ERROR),
            error_code=ErrorCode.FILE_READ_ERROR,
            detail={"file_path": str(path)}
        )


def save_text(text: str, file_path: Union[str, Path]) -> str:
    path = Path(file_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except Exception:
        raise _write_error(path)
    return str(path)


def image_to_dataframe(img: ImageGrid) -> pd.DataFrame:
    return pd.DataFrame({
        "x": img.points[:, 0],
        "y": img.points[:, 1],
        "z": img.points[:, 2],
        "value": img.values,
    })


def save_data_matrix(d: DataMatrix, file_path: Union[str, Path], header_extra: Dict[str, Any] = None) -> str:
    """데이터 행렬을 바이너리 컨테이너로 저장.

    헤더에는 주파수 격자, 형상, 메타 정보(설정 해시 등)가 정렬된 JSON 으로 들어갑니다.
    본문은 complex64 가 아닌 little-endian complex128 (`<c16`) 로 저장하므로
    다시 읽은 값이 계산 결과와 비트 단위로 같습니다.
    """
    path = Path(file_path)
    header = {
        "dtype": DATA_DTYPE,
        "n_receivers": int(d.values.shape[0]),
        "n_frequencies": int(d.values.shape[1]),
        "grid": {
            "kind": d.grid.kind.value,
            "omegas": [float(w) for w in d.grid.omegas],
            "weights": [float(w) for w in d.grid.weights],
            "period": d.grid.period,
        },
        "meta": {**d.meta, **(header_extra or {})},
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            f.write(DATA_MAGIC)
            f.write(struct.pack("<I", len(header_bytes)))
            f.write(header_bytes)
            f.write(np.ascontiguousarray(d.values, dtype=DATA_DTYPE).tobytes())
    except Exception:
        raise _write_error(path)
    logger.info(f"데이터 행렬 저장 완료: {path} ({header['n_receivers']} × {header['n_frequencies']})")
    return str(path)


def load_data_matrix(file_path: Union[str, Path]) -> DataMatrix:
    """바이너리 컨테이너에서 데이터 행렬 복원.

    Raises:
        FileException: 파일 없음, magic/크기 불일치 (FILE_FORMAT_ERROR)
    """
    path = validate_file(file_path, ["BSID"])
    raw = path.read_bytes()
    fmt_error = FileException(
        message=ErrorMessages.get_message(ErrorCode.FILE_FORMAT_ERROR),
        error_code=ErrorCode.FILE_FORMAT_ERROR,
        detail={"file_path": str(path)}
    )
    if raw[:len(DATA_MAGIC)] != DATA_MAGIC:
        logger.error(f"데이터 행렬 magic 불일치: {path}")
        raise fmt_error
    offset = len(DATA_MAGIC)
    try:
        (length,) = struct.unpack("<I", raw[offset:offset + 4])
        offset += 4
        header = json.loads(raw[offset:offset + length].decode("utf-8"))
        offset += length
        shape = (int(header["n_receivers"]), int(header["n_frequencies"]))
        payload = np.frombuffer(raw[offset:], dtype=header["dtype"])
        g = header["grid"]
        grid = FrequencyGrid(
            kind=GridKind(g["kind"]),
            omegas=np.asarray(g["omegas"], dtype=float),
            weights=np.asarray(g["weights"], dtype=float),
            period=g["period"],
        )
    except (struct.error, ValueError, KeyError, TypeError):
        logger.error(f"데이터 행렬 헤더 손상: {path}")
        raise fmt_error
    if payload.size != shape[0] * shape[1]:
        logger.error(f"데이터 행렬 크기 불일치: {path} ({payload.size} != {shape[0]} × {shape[1]})")
        raise fmt_error
    return DataMatrix(grid=grid, values=payload.reshape(shape).astype(complex), meta=header["meta"])


def file_sha256(file_path: Union[str, Path]) -> str:
    """파일 내용 sha256"""
    digest = hashlib.sha256()
    with open(file_path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()
