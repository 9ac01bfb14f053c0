"""공통 pytest 픽스처.

결과 디렉토리는 테스트마다 tmp_path 로 바꾸고, 로그는 콘솔(WARNING)로만 남깁니다.
"""

import copy
from pathlib import Path
from typing import Any, Dict

import pytest
import yaml

from app.core.logger import setup_logger
from app.core.setting import get_settings
from app.schemas.config_schemas import ExperimentConfig


CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

# 작은 Ball / blended 실험: R=2, 센서 24 개, η=0.1
BLENDED_PAYLOAD: Dict[str, Any] = {
    "medium": {"c0": 1.0},
    "array": {"radius": 2.0, "n_sources": 24, "n_receivers": 24},
    "perturbation": {"kind": "Ball", "epsilon": 0.05},
    "source": {
        "kind": "blended",
        "omega0": 10.0,
        "bandwidth": 2.0,
        "delays": {"law": "uniform", "tau_max": 1.0},
    },
    "frequency": {"kind": "dft"},
    "quadrature": {"level": 2, "resolve_eta": False},
    "image": {"kind": "probe"},
    "ensemble": {"n_realizations": 8},
    "seed": 3,
}


def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    out = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


@pytest.fixture(autouse=True, scope="session")
def quiet_logger():
    setup_logger(console=True, level="WARNING")


@pytest.fixture(autouse=True)
def output_dir(tmp_path, monkeypatch) -> Path:
    """OUTPUT_DIR 를 테스트별 임시 디렉토리로 대체"""
    settings = get_settings()
    out = tmp_path / "output"
    monkeypatch.setattr(settings, "OUTPUT_DIR", str(out))
    monkeypatch.setattr(settings, "SHOW_PROGRESS", False)
    return out


@pytest.fixture
def blended_payload():
    """기본 실험 설정 딕셔너리 생성기 (중첩 키 단위로 덮어쓰기)"""
    def make(**overrides) -> Dict[str, Any]:
        return _merge(BLENDED_PAYLOAD, overrides)
    return make


@pytest.fixture
def experiment_config(blended_payload) -> ExperimentConfig:
    return ExperimentConfig.model_validate(blended_payload())


@pytest.fixture
def write_yaml(tmp_path):
    """딕셔너리를 YAML 파일로 저장하고 경로 반환"""
    def write(payload: Dict[str, Any], name: str = "config.yaml") -> Path:
        path = tmp_path / name
        path.write_text(yaml.safe_dump(payload, sort_keys=False), encoding="utf-8")
        return path
    return write
