"""설정 파일 로딩/검증 및 정규화 해시 유틸리티.

YAML 설정을 pydantic 모델로 검증하고, 실패 시 필드 경로와 YAML 줄 번호를
포함한 ValidationException 을 발생시킵니다.
"""

import hashlib
import json
import traceback
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Type, TypeVar, Union

import yaml
from pydantic import BaseModel, ValidationError

from app.core.constants.error import ErrorMessages
from app.core.exceptions import ErrorCode, FileException, ValidationException
from app.core.logger import get_logger


logger = get_logger()

ModelT = TypeVar("ModelT", bound=BaseModel)


def canonical_json(payload: Any) -> str:
    """키 정렬, 공백 없는 정규화 JSON"""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_hex(payload: Any) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def config_hash(config: BaseModel) -> str:
    """설정 해시 (output 경로 제외)"""
    payload = config.hash_payload() if hasattr(config, "hash_payload") else config.model_dump(mode="json")
    return sha256_hex(payload)


def _find_line(node: Optional[yaml.Node], loc: Sequence[Union[str, int]]) -> Optional[int]:
    """pydantic 오류 위치를 YAML 노드 줄 번호(1부터)로 변환"""
    line = node.start_mark.line + 1 if node is not None else None
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            match = next((v for k, v in node.value if k.value == str(key)), None)
            if match is None:
                return line
            key_node = next(k for k, v in node.value if v is match)
            line = key_node.start_mark.line + 1
            node = match
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
            line = node.start_mark.line + 1
        else:
            return line
    return line


def _format_errors(exc: ValidationError, root: Optional[yaml.Node]) -> List[Dict[str, Any]]:
    errors = []
    for err in exc.errors():
        loc = [p for p in err["loc"] if not (isinstance(p, str) and p.startswith("function-"))]
        errors.append({
            "field": ".".join(str(p) for p in loc) or "<root>",
            "line": _find_line(root, loc),
            "type": err["type"],
            "message": err["msg"],
        })
    return errors


def validate_config(payload: Dict[str, Any], model_cls: Type[ModelT], root: Optional[yaml.Node] = None) -> ModelT:
    """딕셔너리를 설정 모델로 검증.

    Raises:
        ValidationException: 필수 항목 누락 (MISSING_REQUIRED_FIELD) 또는 검증 실패 (CONFIG_VALIDATION_ERROR)
    """
    if not isinstance(payload, dict):
        raise ValidationException(
            message=ErrorMessages.get_message(ErrorCode.CONFIG_VALIDATION_ERROR) + " (최상위가 매핑이 아닙니다)",
            error_code=ErrorCode.CONFIG_VALIDATION_ERROR,
        )
    try:
        return model_cls.model_validate(payload)
    except ValidationError as e:
        errors = _format_errors(e, root)
        missing = [err for err in errors if err["type"] == "missing"]
        code = ErrorCode.MISSING_REQUIRED_FIELD if missing else ErrorCode.CONFIG_VALIDATION_ERROR
        first = (missing or errors)[0]
        where = f" (line {first['line']})" if first["line"] else ""
        message = f"{ErrorMessages.get_message(code)} {first['field']}{where}: {first['message']}"
        logger.error(message)
        raise ValidationException(message=message, error_code=code, detail={"errors": errors})


def load_yaml_config(path: Union[str, Path], model_cls: Type[ModelT]) -> ModelT:
    """YAML 설정 파일 로딩 및 검증.

    Args:
        path (str | Path): 설정 파일 경로
        model_cls (Type[BaseModel]): ExperimentConfig 또는 SweepConfig

    Returns:
        BaseModel: 검증된 설정

    Raises:
        FileException: 파일 없음 / 읽기 실패
        ValidationException: YAML 문법 오류 또는 스키마 검증 실패
    """
    path = Path(path)
    if not path.exists():
        logger.error(f"설정 파일이 존재하지 않습니다: {path}")
        raise FileException(
            message=ErrorMessages.get_message(ErrorCode.FILE_NOT_FOUND),
            error_code=ErrorCode.FILE_NOT_FOUND,
            detail={"file_path": str(path)}
        )
    try:
        text = path.read_text(encoding="utf-8")
    except OSError:
        logger.error(f"설정 파일 읽기 실패: \n{traceback.format_exc()}")
        raise FileException(
            message=ErrorMessages.get_message(ErrorCode.FILE_READ_ERROR),
            error_code=ErrorCode.FILE_READ_ERROR,
            detail={"file_path": str(path)}
        )
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
        payload = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ValidationException(
            message=f"{ErrorMessages.get_message(ErrorCode.CONFIG_VALIDATION_ERROR)} YAML 문법 오류 (line {line})",
            error_code=ErrorCode.CONFIG_VALIDATION_ERROR,
            detail={"file_path": str(path), "line": line}
        )
    config = validate_config(payload if payload is not None else {}, model_cls, root)
    logger.info(f"설정 로딩 완료: {path} (hash={config_hash(config)[:12]})")
    return config
