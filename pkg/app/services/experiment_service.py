"""실험 서브커맨드 처리 서비스.

forward / image / sweep / stability / verify 를 CLI 와 API 가 같은 함수로
실행합니다. 모든 실행은 실행 이력 테이블에 시작/성공/실패가 기록되고,
결과 디렉토리에는 설정 해시와 seed 를 담은 provenance.json 이 함께 저장됩니다.
"""

import math
import tempfile
import traceback
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Union

import numpy as np
import pandas as pd

from app.core.constants.error import ErrorMessages
from app.core.constants.imaging import ImagingMethod
from app.core.exceptions import (
    BaseAppException,
    ErrorCode,
    InvalidArgumentException,
    ReproducibilityException,
    ValidationException,
)
from app.core.logger import get_logger
from app.core.setting import get_settings
from app.db.base import session_scope
from app.repositories.history_repository import RunHistoryRepository
from app.schemas.config_schemas import ExperimentConfig, SweepConfig
from app.schemas.imaging_schemas import DataMatrix, ImageGrid
from app.services.forward_service import born_forward, to_time_domain
from app.services.imaging_service import apply_adjoint, image_via_wave_correlation
from app.services.setup_service import build_setup, sampling_step
from app.services.signal_service import draw_source_spectra, spectrum_to_traces
from app.services.stats_service import (
    realization_rng,
    render_stability_report,
    run_ensemble,
    stability_report,
)
from app.services.sweep_service import compute_rows, lattice, point_frame, run_sweep
from app.utils.config_utils import config_hash, validate_config
from app.utils.file_utils import (
    file_sha256,
    image_to_dataframe,
    load_data_matrix,
    load_json,
    read_csv_file,
    save_data_matrix,
    save_dataframe_to_csv,
    save_json,
    save_text,
)


settings = get_settings()
logger = get_logger()

PROVENANCE_FILE = "provenance.json"
CONFIG_MODELS = {"ExperimentConfig": ExperimentConfig, "SweepConfig": SweepConfig}

ConfigModel = Union[ExperimentConfig, SweepConfig]


def resolve_out_dir(out_dir: Optional[Union[str, Path]], config: ConfigModel) -> Path:
    """출력 디렉토리 결정 (인자 > 설정 output.dir > OUTPUT_DIR)"""
    path = Path(out_dir or config.output.dir or settings.OUTPUT_DIR)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _with_seed(config: ConfigModel, seed: Optional[int]) -> ConfigModel:
    """--seed 가 주어지면 설정 seed 를 대체 (해시에 반영)"""
    if seed is None or seed == config.seed:
        return config
    return config.model_copy(update={"seed": int(seed)})


@contextmanager
def tracked_run(command: str, config_hash_value: str, seed: Optional[int], out_dir: Path) -> Iterator[int]:
    """실행 이력 시작/성공/실패 기록"""
    with session_scope(out_dir) as session:
        repository = RunHistoryRepository(session)
        run_id = repository.start_processing(command, config_hash_value, seed, str(out_dir))
        try:
            yield run_id
        except BaseAppException as e:
            repository.fail_processing(run_id, message=f"[{e.error_code.value}] {e.message}")
            raise
        except Exception:
            logger.error(f"{command} 실행 중 오류: \n{traceback.format_exc()}")
            repository.fail_processing(run_id, message=ErrorMessages.get_message(ErrorCode.SYSTEM_ERROR))
            raise
        repository.success_processing(run_id, message=ErrorMessages.SUCCESS)


def write_provenance(
    out_dir: Path,
    command: str,
    config: ConfigModel,
    seed: int,
    artifacts: Dict[str, str],
    extra: Optional[Dict[str, Any]] = None,
) -> str:
    """결과 파일의 sha256, 설정, 설정 해시, seed 를 provenance.json 으로 저장 (시각 정보 없음)"""
    payload = {
        "command": command,
        "version": settings.VERSION,
        "config_model": type(config).__name__,
        "config": config.hash_payload(),
        "config_hash": config_hash(config),
        "seed": seed,
        "artifacts": {
            name: {"file": Path(path).name, "sha256": file_sha256(path)}
            for name, path in sorted(artifacts.items())
        },
    }
    if extra:
        payload.update(extra)
    return save_json(payload, Path(out_dir) / PROVENANCE_FILE)


def _source_realization(setup, seed: int) -> np.ndarray:
    """단일 실행의 소스 스펙트럼 (실현 0)"""
    return draw_source_spectra(setup.source_model, setup.grid, setup.array.n_sources, realization_rng(seed, 0))


# ---------------------------------------------------------------- forward

def cmd_forward(
    config: ExperimentConfig,
    out_dir: Optional[Union[str, Path]] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> Dict[str, Any]:
    """Born 데이터 행렬 생성 후 data.bsid 와 provenance.json 저장"""
    config = _with_seed(config, seed)
    out = resolve_out_dir(out_dir, config)
    setup = build_setup(config)
    logger.info(f"forward 시작: hash={setup.config_hash[:12]}, seed={config.seed}, out={out}")

    with tracked_run("forward", setup.config_hash, config.seed, out):
        # 1. 소스 실현 생성
        src = _source_realization(setup, config.seed)

        # 2. Born 정방향 계산
        d = born_forward(setup.perturbation, setup.quadrature, setup.array, src, setup.grid, setup.c0, workers)
        d = DataMatrix(
            grid=d.grid,
            values=d.values,
            meta={**d.meta, "config_hash": setup.config_hash, "seed": config.seed},
        )

        # 3. 결과 저장
        data_path = save_data_matrix(d, out / "data.bsid")
        provenance = write_provenance(out, "forward", config, config.seed, {"data": data_path})

    return {"config_hash": setup.config_hash, "seed": config.seed,
            "artifacts": {"data": data_path, "provenance": provenance}}


# ---------------------------------------------------------------- image

def _check_data_hash(d: DataMatrix, expected: str, data_path: Union[str, Path]) -> None:
    found = d.meta.get("config_hash")
    if found != expected:
        logger.error(f"데이터 파일 설정 해시 불일치: data={found}, config={expected}")
        raise ValidationException(
            message=ErrorMessages.get_message(ErrorCode.CONFIG_HASH_MISMATCH),
            error_code=ErrorCode.CONFIG_HASH_MISMATCH,
            detail={"data_file": str(data_path), "data_hash": found, "config_hash": expected}
        )


def _probe_contrast(img: ImageGrid, setup) -> Optional[float]:
    if setup.center_index is None or setup.far_indices.size == 0:
        return None
    far = float(np.max(np.abs(img.values[setup.far_indices])))
    center = abs(float(img.values[setup.center_index]))
    return center / far if far > 0 else math.inf


def form_image(
    setup,
    d: DataMatrix,
    src: np.ndarray,
    method: ImagingMethod = ImagingMethod.SPECTRAL,
    workers: Optional[int] = None,
) -> ImageGrid:
    """스펙트럼 또는 시간 영역 상관 경로로 이미지 계산.

    Raises:
        InvalidArgumentException: correlation 경로에서 DFT 정렬 격자가 아님
    """
    if method == ImagingMethod.SPECTRAL:
        return apply_adjoint(d, setup.array, src, setup.points, setup.c0, workers)
    if d.grid.period is None:
        raise InvalidArgumentException(
            message="correlation 경로에는 DFT 주파수 격자가 필요합니다",
            detail={"grid": d.grid.kind.value}
        )
    dt = sampling_step(setup.config, d.grid)
    period = d.grid.period
    data_traces = to_time_domain(d, dt, period)
    source_traces = spectrum_to_traces(src, d.grid, dt, period)
    return image_via_wave_correlation(
        data_traces, source_traces, setup.array, setup.points, period, float(d.grid.omegas[-1]), setup.c0, workers
    )


def cmd_image(
    config: ExperimentConfig,
    data_path: Union[str, Path],
    method: Union[str, ImagingMethod] = ImagingMethod.SPECTRAL,
    out_dir: Optional[Union[str, Path]] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> Dict[str, Any]:
    """데이터 파일을 역전파해 image.csv / image.json 저장.

    Raises:
        ValidationException: 데이터 파일의 설정 해시가 현재 설정과 다름 (CONFIG_HASH_MISMATCH)
    """
    method = ImagingMethod(method)
    config = _with_seed(config, seed)
    out = resolve_out_dir(out_dir, config)
    setup = build_setup(config)

    with tracked_run("image", setup.config_hash, config.seed, out):
        # 1. 데이터 로딩 및 해시 확인
        d = load_data_matrix(data_path)
        _check_data_hash(d, setup.config_hash, data_path)

        # 2. 이미지 계산
        logger.info(f"image 시작: method={method.value}, 평가점 {setup.points.shape[0]} 개")
        src = _source_realization(setup, config.seed)
        img = form_image(setup, d, src, method, workers)

        # 3. 결과 저장
        csv_path = save_dataframe_to_csv(image_to_dataframe(img), out / "image.csv")
        summary = {
            "config_hash": setup.config_hash,
            "seed": config.seed,
            "method": method.value,
            "n_points": int(img.points.shape[0]),
            "imag_residual": img.imag_residual,
            "center_index": setup.center_index,
            "contrast": _probe_contrast(img, setup),
        }
        json_path = save_json(summary, out / "image.json")
        provenance = write_provenance(
            out, "image", config, config.seed, {"image_csv": csv_path, "image_json": json_path},
            extra={"method": method.value,
                   "data": {"file": str(data_path), "sha256": file_sha256(data_path)}},
        )

    return {**summary, "artifacts": {"image_csv": csv_path, "image_json": json_path, "provenance": provenance}}


# ---------------------------------------------------------------- stability

def cmd_stability(
    config: ExperimentConfig,
    out_dir: Optional[Union[str, Path]] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> Dict[str, Any]:
    """앙상블 실행 후 ensemble.csv, stability.json, stability.txt 저장"""
    config = _with_seed(config, seed)
    out = resolve_out_dir(out_dir, config)
    setup = build_setup(config)

    with tracked_run("stability", setup.config_hash, config.seed, out):
        # 1. 몬테카를로 앙상블
        stats = run_ensemble(setup, workers=workers)

        # 2. 차수 예측과 비교
        report = stability_report(stats, setup)

        # 3. 결과 저장
        ensemble = pd.DataFrame({
            "x": stats.points[:, 0],
            "y": stats.points[:, 1],
            "z": stats.points[:, 2],
            "mean": stats.mean,
            "std": stats.std,
            "mc_error": stats.mc_error,
        })
        csv_path = save_dataframe_to_csv(ensemble, out / "ensemble.csv")
        payload = {**report.model_dump(), "passed": report.passed,
                   "config_hash": setup.config_hash, "seed": config.seed}
        json_path = save_json(payload, out / "stability.json")
        txt_path = save_text(render_stability_report(report), out / "stability.txt")
        provenance = write_provenance(
            out, "stability", config, config.seed,
            {"ensemble_csv": csv_path, "stability_json": json_path, "stability_txt": txt_path},
        )

    logger.info(f"stability 완료: {'PASS' if report.passed else 'FAIL'}")
    return {"config_hash": setup.config_hash, "seed": config.seed, "passed": report.passed,
            "report": report.model_dump(),
            "artifacts": {"ensemble_csv": csv_path, "stability_json": json_path,
                          "stability_txt": txt_path, "provenance": provenance}}


# ---------------------------------------------------------------- sweep

def cmd_sweep(
    config: SweepConfig,
    out_dir: Optional[Union[str, Path]] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    table: bool = False,
) -> Dict[str, Any]:
    """스윕 실행 (table=True 면 차수 표 재현 모드)"""
    if table and config.mode != "table":
        config = config.model_copy(update={"mode": "table"})
    config = _with_seed(config, seed)
    out = resolve_out_dir(out_dir, config)
    h = config_hash(config)

    with tracked_run("sweep", h, config.seed, out):
        result = run_sweep(config, out, workers)
        provenance = write_provenance(out, "sweep", config, config.seed, result["artifacts"])

    result["artifacts"]["provenance"] = provenance
    result["seed"] = config.seed
    return result


# ---------------------------------------------------------------- verify

def _provenance_path(artifact: Union[str, Path]) -> Path:
    path = Path(artifact)
    return path / PROVENANCE_FILE if path.is_dir() else path


def _same_value(a: Any, b: Any) -> bool:
    if isinstance(a, str) or isinstance(b, str):
        return str(a) == str(b)
    a, b = float(a), float(b)
    return a == b or (math.isnan(a) and math.isnan(b))


def _compare_rows(stored: pd.DataFrame, fresh: pd.DataFrame) -> Dict[str, Any]:
    """저장된 스윕 행과 재계산 행의 열별 비트 단위 비교 결과 (불일치 열만)"""
    if len(stored) != len(fresh):
        return {"rows": [len(stored), len(fresh)]}
    diffs = {}
    for col in fresh.columns:
        pairs = zip(stored[col].tolist(), fresh[col].tolist())
        if not all(_same_value(a, b) for a, b in pairs):
            diffs[col] = {"stored": stored[col].tolist(), "recomputed": fresh[col].tolist()}
    return diffs


def _reproducibility_error(message: str, detail: Dict[str, Any]) -> ReproducibilityException:
    logger.error(f"재현성 검증 실패: {message}")
    return ReproducibilityException(
        message=f"{ErrorMessages.get_message(ErrorCode.REPRODUCIBILITY_FAILURE)} ({message})",
        detail=detail,
    )


def _verify_sweep(config: SweepConfig, root: Path, provenance: Dict[str, Any],
                  seed: Optional[int], workers: Optional[int]) -> Dict[str, Any]:
    points = lattice(config)
    rng = np.random.default_rng(seed if seed is not None else provenance["seed"])
    point_id = int(rng.integers(len(points)))
    fresh = point_frame(config, compute_rows(config, points[point_id], workers), point_id)
    stored = read_csv_file(root / provenance["artifacts"]["sweep_csv"]["file"], list(fresh.columns))
    stored = stored[stored["point_id"] == point_id][list(fresh.columns)]
    diffs = _compare_rows(stored, fresh)
    if diffs:
        raise _reproducibility_error(f"격자점 {point_id} 재계산 불일치", {"point_id": point_id, "diff": diffs})
    return {"point_id": point_id, "point": points[point_id]}


def _verify_rerun(command: str, config: ExperimentConfig, root: Path, provenance: Dict[str, Any],
                  workers: Optional[int]) -> Dict[str, Any]:
    """임시 디렉토리에 같은 명령을 다시 실행해 결과 파일 sha256 비교"""
    with tempfile.TemporaryDirectory() as tmp:
        if command == "forward":
            fresh = cmd_forward(config, tmp, workers=workers)["artifacts"]
        elif command == "image":
            data = provenance["data"]
            if file_sha256(data["file"]) != data["sha256"]:
                raise _reproducibility_error("입력 데이터 파일이 변경되었습니다", {"data": data})
            fresh = cmd_image(config, data["file"], provenance["method"], tmp, workers=workers)["artifacts"]
        else:
            fresh = cmd_stability(config, tmp, workers=workers)["artifacts"]
        mismatched = [
            name for name, info in provenance["artifacts"].items()
            if file_sha256(fresh[name]) != info["sha256"]
        ]
    if mismatched:
        raise _reproducibility_error(f"재실행 결과 불일치: {', '.join(mismatched)}", {"artifacts": mismatched})
    return {"rerun": sorted(provenance["artifacts"])}


def cmd_verify(
    artifact: Union[str, Path],
    config: Optional[ConfigModel] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> Dict[str, Any]:
    """결과 디렉토리의 재현성 검증.

    1. provenance 의 설정으로 해시를 재계산해 기록된 해시와 비교
    2. 결과 파일 sha256 확인
    3. sweep 은 무작위 격자점 하나를, 나머지 명령은 전체를 재실행해 비교

    Raises:
        ValidationException: 주어진 설정의 해시가 결과와 다름 (CONFIG_HASH_MISMATCH)
        ReproducibilityException: 해시, 파일, 재계산 결과 불일치
    """
    path = _provenance_path(artifact)
    provenance = load_json(path)
    root = path.parent
    stored_config = validate_config(provenance["config"], CONFIG_MODELS[provenance["config_model"]])
    recorded = provenance["config_hash"]

    with tracked_run("verify", recorded, provenance.get("seed"), root):
        # 1. 설정 해시 재계산
        recomputed = config_hash(stored_config)
        if recomputed != recorded:
            raise _reproducibility_error("설정 해시 재계산 불일치", {"recorded": recorded, "recomputed": recomputed})
        if config is not None and config_hash(_with_seed(config, provenance.get("seed"))) != recorded:
            raise ValidationException(
                message=ErrorMessages.get_message(ErrorCode.CONFIG_HASH_MISMATCH),
                error_code=ErrorCode.CONFIG_HASH_MISMATCH,
                detail={"recorded": recorded}
            )

        # 2. 결과 파일 무결성
        changed = [
            name for name, info in provenance["artifacts"].items()
            if file_sha256(root / info["file"]) != info["sha256"]
        ]
        if changed:
            raise _reproducibility_error(f"결과 파일 변경: {', '.join(changed)}", {"artifacts": changed})

        # 3. 재계산
        command = provenance["command"]
        if command == "sweep":
            detail = _verify_sweep(stored_config, root, provenance, seed, workers)
        else:
            detail = _verify_rerun(command, stored_config, root, provenance, workers)

    logger.info(f"재현성 검증 통과: command={command}, hash={recorded[:12]}")
    return {"verified": True, "command": command, "config_hash": recorded, **detail}
