"""파라미터 격자 스윕 서비스.

kernel 모드는 격자점마다 공간 적분 I1/J1/J2 를, ensemble 모드는 몬테카를로
앙상블을 계산합니다. table 모드는 (형태, 위치, 평균/표준편차) 12 행에 대해
ε, η 방향 피팅 지수를 차수 표와 비교합니다.

격자점 결과는 (스윕 설정 해시, 격자점 파라미터) 의 sha256 을 키로 SQLite 에
캐시되며, 재실행 시 완료된 점은 다시 계산하지 않습니다. 실패한 점은 기록만
하고 스윕을 계속 진행합니다.
"""

import math
import traceback
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from app.core.constants.imaging import (
    SPATIAL_SLOPE_TOLERANCE,
    Location,
    PerturbationKind,
    Relation,
    SourceKind,
)
from app.core.exceptions import BaseAppException, InvalidArgumentException
from app.core.logger import get_logger
from app.db.base import session_scope
from app.repositories.sweep_repository import SweepPointRepository
from app.schemas.config_schemas import ExperimentConfig, SweepConfig
from app.schemas.geometry_schemas import Perturbation
from app.schemas.kernel_schemas import OrderTerm
from app.services.geometry_service import probe_points, support_quadrature
from app.services.kernel_service import i1_integral, j1_values, predicted_orders
from app.services.setup_service import build_setup, time_scale
from app.services.stats_service import fit_log_linear, fit_scaling, run_ensemble
from app.utils.config_utils import config_hash, sha256_hex, validate_config
from app.utils.file_utils import save_dataframe_to_csv, save_json
from app.utils.parallel_utils import ordered_map


logger = get_logger()

KERNEL_COLUMNS = [
    "point_id", "kind", "location", "epsilon", "eta", "t_tau",
    "I1", "J1", "J1_error", "J2", "mean_observable", "std_observable", "contrast",
    "predicted_mean_order", "predicted_std_order", "fitted_slope_epsilon", "fitted_slope_eta",
    "status", "config_hash", "seed",
]

ENSEMBLE_COLUMNS = [
    "point_id", "kind", "location", "variable", "value", "epsilon", "eta", "time_scale",
    "n_realizations", "mean_observable", "std_observable", "mc_error", "contrast",
    "predicted_mean_order", "predicted_std_order", "status", "config_hash", "seed",
]

TABLE_COLUMNS = [
    "kind", "location", "observable", "relation", "predicted_order",
    "predicted_epsilon", "fitted_epsilon", "r2_epsilon",
    "predicted_eta", "fitted_eta", "r2_eta", "passed",
]

# 격자점 실패 시 결과 대신 돌려주는 표식
Failure = Tuple[str, str]


def point_key(sweep_hash: str, point: Dict[str, Any]) -> str:
    """격자점 캐시 키"""
    return sha256_hex({"sweep": sweep_hash, "point": point})


def _orders(kind: PerturbationKind, location: Location, source_kind: SourceKind = SourceKind.BLENDED):
    pred = predicted_orders(kind, location, source_kind)
    return pred.mean, pred.std


# ---------------------------------------------------------------- kernel 격자점

def kernel_lattice(config: SweepConfig) -> List[Dict[str, Any]]:
    """kernel/table 모드 격자점 목록 (형태 → ε → η 순서)"""
    if config.mode == "table":
        pairs = [(e, config.table.eta_fixed) for e in config.table.epsilons]
        pairs += [(config.table.epsilon_fixed, h) for h in config.table.etas
                  if (config.table.epsilon_fixed, h) not in pairs]
    else:
        pairs = [(e, h) for e in config.epsilons for h in config.etas]
    return [
        {
            "kind": kind.value,
            "epsilon": float(eps),
            "eta": float(eta),
            "t_tau": config.t_tau,
            "include_std": config.include_std,
            "quadrature_level": config.quadrature_level,
            "qmc_log2_points": config.qmc_log2_points,
            "seed": config.seed,
        }
        for kind in config.kinds
        for eps, eta in pairs
    ]


def kernel_point(point: Dict[str, Any]) -> List[Dict[str, Any]]:
    """한 격자점의 중심/원거리 두 행 계산.

    평균 관측량은 I1, 표준편차 관측량은 √((J1 + J2)/T_τ) 이며
    원거리 값은 원거리 평가점 집합의 최댓값입니다.
    """
    kind = PerturbationKind(point["kind"])
    eps, eta, t_tau = point["epsilon"], point["eta"], point["t_tau"]
    p = Perturbation(kind=kind, epsilon=eps)
    pts = probe_points(p, eta)
    rule = support_quadrature(p, point["quadrature_level"], eta)
    i1 = np.asarray(i1_integral(p, pts, eta, quad=rule))
    if point["include_std"]:
        j1, j1_err, _ = j1_values(p, pts, eta, point["quadrature_level"], point["seed"],
                                  point["qmc_log2_points"], quad=rule)
        j2 = i1 ** 2
        std = np.sqrt(np.clip(j1 + j2, 0.0, None) / t_tau)
    else:
        j1 = j1_err = j2 = std = np.full_like(i1, math.nan)

    far = np.arange(1, pts.shape[0])
    k = int(far[np.argmax(np.abs(i1[far]))])
    far_mean = float(abs(i1[k]))
    contrast = abs(float(i1[0])) / far_mean if far_mean > 0 else math.inf

    rows = []
    for location, idx, std_value in (
        (Location.CENTER, 0, float(std[0])),
        (Location.FAR, k, float(np.max(std[far]))),
    ):
        mean_term, std_term = _orders(kind, location)
        rows.append({
            "kind": kind.value,
            "location": location.value,
            "epsilon": eps,
            "eta": eta,
            "t_tau": t_tau,
            "I1": float(i1[idx]),
            "J1": float(j1[idx]),
            "J1_error": float(j1_err[idx]),
            "J2": float(j2[idx]),
            "mean_observable": abs(float(i1[idx])),
            "std_observable": std_value,
            "contrast": contrast,
            "predicted_mean_order": mean_term.label(),
            "predicted_std_order": std_term.label(),
            "status": "ok",
        })
    return rows


# ---------------------------------------------------------------- ensemble 격자점

def experiment_variant(base: ExperimentConfig, variable: str, value: float) -> ExperimentConfig:
    """기본 실험에서 변수 하나를 바꾼 설정 (평가점은 중심/원거리 probe 로 고정).

    Raises:
        InvalidArgumentException: tabulated 지연 분포의 T_τ 변경 등 지원하지 않는 조합
        ValidationException: 바꾼 설정이 검증에 실패
    """
    payload = base.model_dump(mode="json")
    payload["image"] = {"kind": "probe"}
    payload["output"] = {"dir": None}
    if variable == "t_tau":
        delays = payload["source"]["delays"]
        if delays["law"] == "uniform":
            delays["tau_max"] = value / 2.0
        elif delays["law"] == "triangular":
            delays["tau_max"] = value / 1.5
        else:
            raise InvalidArgumentException(
                message="tabulated 지연 분포는 T_τ 스윕을 지원하지 않습니다",
                detail={"law": delays["law"]}
            )
        payload["frequency"]["period"] = None
    elif variable == "duration":
        payload["source"]["noise"]["duration"] = value
        payload["frequency"]["period"] = None
    elif variable == "eta":
        ratio = payload["source"]["bandwidth"] / payload["source"]["omega0"]
        payload["source"]["omega0"] = payload["medium"]["c0"] / value
        payload["source"]["bandwidth"] = ratio * payload["source"]["omega0"]
    else:
        payload["perturbation"]["epsilon"] = value
    return validate_config(payload, ExperimentConfig)


def ensemble_lattice(config: SweepConfig) -> List[Dict[str, Any]]:
    return [
        {"variable": config.variable, "value": float(v), "seed": config.seed,
         "experiment": config_hash(config.experiment)}
        for v in config.values
    ]


def ensemble_point(config: SweepConfig, point: Dict[str, Any], workers: Optional[int] = None) -> List[Dict[str, Any]]:
    """한 변수 값에서 앙상블을 실행해 중심/원거리 두 행 계산"""
    variant = experiment_variant(config.experiment, point["variable"], point["value"])
    setup = build_setup(variant)
    stats = run_ensemble(setup, seed=point["seed"], workers=workers)
    c, far = setup.center_index, setup.far_indices
    mean_far = float(np.max(np.abs(stats.mean[far])))
    contrast = abs(float(stats.mean[c])) / mean_far if mean_far > 0 else math.inf
    model = setup.source_model
    rows = []
    for location, mean_value, std_value, err in (
        (Location.CENTER, abs(float(stats.mean[c])), float(stats.std[c]), float(stats.mc_error[c])),
        (Location.FAR, mean_far, float(np.max(stats.std[far])), float(np.max(stats.mc_error[far]))),
    ):
        mean_term, std_term = _orders(setup.perturbation.kind, location, model.kind)
        rows.append({
            "kind": setup.perturbation.kind.value,
            "location": location.value,
            "variable": point["variable"],
            "value": point["value"],
            "epsilon": setup.perturbation.epsilon,
            "eta": setup.eta,
            "time_scale": time_scale(model),
            "n_realizations": stats.n_realizations,
            "mean_observable": mean_value,
            "std_observable": std_value,
            "mc_error": err,
            "contrast": contrast,
            "predicted_mean_order": mean_term.label(),
            "predicted_std_order": std_term.label(),
            "status": "ok",
        })
    return rows


# ---------------------------------------------------------------- 캐시 실행

def _guarded(fn: Callable[[Dict[str, Any]], List[Dict[str, Any]]]):
    """격자점 함수 실패를 (에러코드, 메시지) 로 바꿔 스윕이 계속되게 함"""
    def run(point: Dict[str, Any]):
        try:
            return fn(point)
        except BaseAppException as e:
            logger.warning(f"격자점 계산 실패 [{e.error_code.value}] {point}: {e.message}")
            return (e.error_code.value, e.message)
        except Exception as e:
            logger.error(f"격자점 계산 중 예상치 못한 오류: {point}\n{traceback.format_exc()}")
            return ("E9999", str(e))
    return run


def _failed_rows(point: Dict[str, Any], failure: Failure) -> List[Dict[str, Any]]:
    base = {k: v for k, v in point.items() if k in ("kind", "epsilon", "eta", "t_tau", "variable", "value")}
    return [{**base, "location": loc.value, "status": f"failed:{failure[0]}"} for loc in Location]


def run_lattice(
    sweep_hash: str,
    points: Sequence[Dict[str, Any]],
    fn: Callable[[Dict[str, Any]], List[Dict[str, Any]]],
    out_dir: Path,
    workers: Optional[int] = None,
    parallel_points: bool = True,
) -> Tuple[List[List[Dict[str, Any]]], Dict[str, int]]:
    """캐시를 확인하며 격자점 결과 목록을 입력 순서대로 반환.

    Args:
        sweep_hash (str): 스윕 설정 해시
        points (Sequence[dict]): 격자점 파라미터
        fn (Callable): 격자점 계산 함수 (행 목록 반환)
        out_dir (Path): 캐시 DB 가 있는 출력 디렉토리
        workers (int, optional): 격자점 병렬 작업자 수
        parallel_points (bool): False 면 격자점은 순차 실행 (내부에서 병렬화하는 경우)

    Returns:
        Tuple[list, dict]: 격자점별 행 목록, {"computed", "cached", "failed"} 개수
    """
    keys = [point_key(sweep_hash, p) for p in points]
    results: List[Optional[List[Dict[str, Any]]]] = [None] * len(points)
    counts = {"computed": 0, "cached": 0, "failed": 0}

    with session_scope(out_dir) as session:
        repo = SweepPointRepository(session)
        for i, key in enumerate(keys):
            cached = repo.get_completed(key)
            if cached is not None:
                results[i] = cached
                counts["cached"] += 1
        missing = [i for i, r in enumerate(results) if r is None]
        logger.info(f"스윕 격자점 {len(points)} 개 중 캐시 {counts['cached']} 개, 계산 {len(missing)} 개")

        outcomes = ordered_map(
            _guarded(fn), [points[i] for i in missing], workers if parallel_points else 1, desc="sweep"
        )
        # SQLite 세션은 메인 스레드에서만 사용
        for i, outcome in zip(missing, outcomes):
            if isinstance(outcome, tuple):
                repo.fail_processing(keys[i], sweep_hash, points[i], f"[{outcome[0]}] {outcome[1]}")
                results[i] = _failed_rows(points[i], outcome)
                counts["failed"] += 1
            else:
                repo.success_processing(keys[i], sweep_hash, points[i], outcome)
                results[i] = outcome
                counts["computed"] += 1
        logger.info(f"스윕 캐시 완료 격자점: {repo.count_completed(sweep_hash)} 개")
    return results, counts


# ---------------------------------------------------------------- 피팅

def _log_factor(term: OrderTerm, eps: np.ndarray) -> np.ndarray:
    """단항식의 |ln ε| 인자 (피팅 전에 나눠 순수 멱법칙으로 만듦)"""
    return np.abs(np.log(eps)) ** term.monomial[2]


def _try_fit(x: Sequence[float], y: Sequence[float], variable: str, model: str = "power"):
    samples = [(a, b) for a, b in zip(x, y) if math.isfinite(a) and math.isfinite(b)]
    try:
        if model == "log_linear":
            return fit_log_linear(samples, variable)
        return fit_scaling(samples, variable)
    except InvalidArgumentException as e:
        logger.debug(f"피팅 생략 ({variable}): {e.message}")
        return None


def _fit_record(kind: str, location: str, observable: str, variable: str, fixed: Dict[str, float],
                predicted: Optional[float], fit) -> Dict[str, Any]:
    return {
        "kind": kind,
        "location": location,
        "observable": observable,
        "variable": variable,
        "fixed": fixed,
        "predicted_slope": predicted,
        "fit": fit.model_dump(),
    }


def kernel_fits(df: pd.DataFrame) -> List[Dict[str, Any]]:
    """(형태, 위치) 그룹별로 ε 방향 (η 고정) / η 방향 (ε 고정) 피팅.

    평균/표준편차 관측량은 |ln ε| 인자를 나눈 뒤 멱법칙으로 피팅하고,
    대비는 멱법칙과 함께 |ln η| 에 대한 선형 모형으로도 피팅합니다.
    """
    fits = []
    ok = df[df["status"] == "ok"]
    for (kind, location), group in ok.groupby(["kind", "location"], sort=False):
        mean_term, std_term = _orders(PerturbationKind(kind), Location(location))
        for observable, term in (("mean", mean_term), ("std", std_term)):
            col = f"{observable}_observable"
            for eta, sub in group.groupby("eta", sort=True):
                eps = sub["epsilon"].to_numpy()
                fit = _try_fit(eps, sub[col].to_numpy() / _log_factor(term, eps), "epsilon")
                if fit is not None:
                    fits.append(_fit_record(kind, location, observable, "epsilon", {"eta": eta},
                                            float(term.monomial[0]), fit))
            for eps, sub in group.groupby("epsilon", sort=True):
                fit = _try_fit(sub["eta"].to_numpy(), sub[col].to_numpy(), "eta")
                if fit is not None:
                    fits.append(_fit_record(kind, location, observable, "eta", {"epsilon": eps},
                                            float(term.monomial[1]), fit))

    centers = ok[ok["location"] == Location.CENTER.value]
    for kind, group in centers.groupby("kind", sort=False):
        mean_c, _ = _orders(PerturbationKind(kind), Location.CENTER)
        mean_f, _ = _orders(PerturbationKind(kind), Location.FAR)
        for eps, sub in group.groupby("epsilon", sort=True):
            fit = _try_fit(sub["eta"], sub["contrast"], "eta")
            if fit is not None:
                fits.append(_fit_record(kind, "center/far", "contrast", "eta", {"epsilon": eps},
                                        float(mean_c.monomial[1] - mean_f.monomial[1]), fit))
            fit = _try_fit(sub["eta"], sub["contrast"], "eta", model="log_linear")
            if fit is not None:
                fits.append(_fit_record(kind, "center/far", "contrast", "eta", {"epsilon": eps}, None, fit))
        for eta, sub in group.groupby("eta", sort=True):
            fit = _try_fit(sub["epsilon"], sub["contrast"], "epsilon")
            if fit is not None:
                fits.append(_fit_record(kind, "center/far", "contrast", "epsilon", {"eta": eta},
                                        float(mean_c.monomial[0] - mean_f.monomial[0]), fit))
            fit = _try_fit(sub["epsilon"], sub["contrast"], "epsilon", model="log_linear")
            if fit is not None:
                fits.append(_fit_record(kind, "center/far", "contrast", "epsilon", {"eta": eta}, None, fit))
    return fits


def _attach_slopes(df: pd.DataFrame, fits: List[Dict[str, Any]]) -> pd.DataFrame:
    """평균 관측량 피팅 기울기를 해당 행에 기록"""
    df = df.copy()
    df["fitted_slope_epsilon"] = math.nan
    df["fitted_slope_eta"] = math.nan
    for f in fits:
        if f["observable"] != "mean":
            continue
        mask = (df["kind"] == f["kind"]) & (df["location"] == f["location"])
        if f["variable"] == "epsilon":
            mask &= df["eta"] == f["fixed"]["eta"]
            df.loc[mask, "fitted_slope_epsilon"] = f["fit"]["slope"]
        else:
            mask &= df["epsilon"] == f["fixed"]["epsilon"]
            df.loc[mask, "fitted_slope_eta"] = f["fit"]["slope"]
    return df


def ensemble_fits(df: pd.DataFrame, variable: str) -> List[Dict[str, Any]]:
    """ensemble 모드: 위치별 평균/표준편차를 변수에 대해 피팅"""
    index = {"epsilon": 0, "eta": 1, "t_tau": 3, "duration": 3}[variable]
    fits = []
    ok = df[df["status"] == "ok"]
    for (kind, location), group in ok.groupby(["kind", "location"], sort=False):
        source_kind = SourceKind.STATIONARY if variable == "duration" else SourceKind.BLENDED
        mean_term, std_term = _orders(PerturbationKind(kind), Location(location), source_kind)
        x = group["value"].to_numpy()
        for observable, term in (("mean", mean_term), ("std", std_term)):
            y = group[f"{observable}_observable"].to_numpy()
            if variable == "epsilon":
                y = y / _log_factor(term, x)
            fit = _try_fit(x, y, variable)
            if fit is not None:
                fits.append(_fit_record(kind, location, observable, variable, {},
                                        float(term.monomial[index]), fit))
    return fits


# ---------------------------------------------------------------- table 모드

def _slope_passes(relation: Relation, fitted: Optional[float], predicted: float,
                  tolerance: float = SPATIAL_SLOPE_TOLERANCE) -> bool:
    """≃ 는 |차이| ≤ 허용오차, ≲ 는 관측량이 상한을 넘지 않는 방향(지수 ≥ 예측 - 허용오차)"""
    if fitted is None:
        return False
    if relation == Relation.ASYMPTOTIC:
        return abs(fitted - predicted) <= tolerance
    return fitted >= predicted - tolerance


def table_rows(df: pd.DataFrame, config: SweepConfig) -> pd.DataFrame:
    """(형태, 위치, 관측량) 12 행의 예측/피팅 지수 비교표"""
    t = config.table
    ok = df[df["status"] == "ok"]
    rows = []
    for kind in config.kinds:
        for location in Location:
            mean_term, std_term = _orders(kind, location)
            group = ok[(ok["kind"] == kind.value) & (ok["location"] == location.value)]
            eps_sweep = group[np.isclose(group["eta"], t.eta_fixed)].drop_duplicates("epsilon")
            eta_sweep = group[np.isclose(group["epsilon"], t.epsilon_fixed)].drop_duplicates("eta")
            for observable, term in (("mean", mean_term), ("std", std_term)):
                col = f"{observable}_observable"
                eps = eps_sweep["epsilon"].to_numpy()
                fit_eps = _try_fit(eps, eps_sweep[col].to_numpy() / _log_factor(term, eps), "epsilon")
                fit_eta = _try_fit(eta_sweep["eta"].to_numpy(), eta_sweep[col].to_numpy(), "eta")
                pred_eps, pred_eta = float(term.monomial[0]), float(term.monomial[1])
                slope_eps = fit_eps.slope if fit_eps else None
                slope_eta = fit_eta.slope if fit_eta else None
                rows.append({
                    "kind": kind.value,
                    "location": location.value,
                    "observable": observable,
                    "relation": term.relation.value,
                    "predicted_order": term.label(),
                    "predicted_epsilon": pred_eps,
                    "fitted_epsilon": math.nan if slope_eps is None else slope_eps,
                    "r2_epsilon": math.nan if fit_eps is None else fit_eps.r2,
                    "predicted_eta": pred_eta,
                    "fitted_eta": math.nan if slope_eta is None else slope_eta,
                    "r2_eta": math.nan if fit_eta is None else fit_eta.r2,
                    "passed": _slope_passes(term.relation, slope_eps, pred_eps)
                    and _slope_passes(term.relation, slope_eta, pred_eta),
                })
    table = pd.DataFrame(rows, columns=TABLE_COLUMNS)
    failed = table[~table["passed"]]
    if not failed.empty:
        logger.warning(
            "차수 표와 맞지 않는 행: "
            + ", ".join(f"{r.kind}/{r.location}/{r.observable}" for r in failed.itertuples())
        )
    return table


# ---------------------------------------------------------------- 진입점

def _frame(results: List[List[Dict[str, Any]]], columns: List[str], sweep_hash: str, seed: int) -> pd.DataFrame:
    rows = []
    for point_id, point_rows in enumerate(results):
        for row in point_rows:
            rows.append({**row, "point_id": point_id, "config_hash": sweep_hash, "seed": seed})
    return pd.DataFrame(rows, columns=columns)


def compute_rows(config: SweepConfig, point: Dict[str, Any], workers: Optional[int] = None) -> List[Dict[str, Any]]:
    """캐시를 거치지 않고 격자점 하나를 계산 (재현성 검증용)"""
    if config.mode == "ensemble":
        return ensemble_point(config, point, workers)
    return kernel_point(point)


def point_frame(config: SweepConfig, rows: List[Dict[str, Any]], point_id: int) -> pd.DataFrame:
    """격자점 하나의 행을 스윕 CSV 열 구성으로 변환 (피팅 기울기 열 제외)"""
    columns = ENSEMBLE_COLUMNS if config.mode == "ensemble" else KERNEL_COLUMNS
    df = _frame([rows], columns, config_hash(config), config.seed)
    df["point_id"] = point_id
    return df.drop(columns=["fitted_slope_epsilon", "fitted_slope_eta"], errors="ignore")


def lattice(config: SweepConfig) -> List[Dict[str, Any]]:
    return ensemble_lattice(config) if config.mode == "ensemble" else kernel_lattice(config)


def sweep_frame(config: SweepConfig, results: List[List[Dict[str, Any]]]) -> pd.DataFrame:
    """격자점 결과를 스윕 CSV 와 같은 열 구성의 DataFrame 으로 변환"""
    sweep_hash = config_hash(config)
    if config.mode == "ensemble":
        return _frame(results, ENSEMBLE_COLUMNS, sweep_hash, config.seed)
    df = _frame(results, KERNEL_COLUMNS, sweep_hash, config.seed)
    return _attach_slopes(df, kernel_fits(df))


def run_sweep(config: SweepConfig, out_dir: Path, workers: Optional[int] = None) -> Dict[str, Any]:
    """스윕 실행 후 sweep.csv, fits.json (table 모드면 table.csv) 저장.

    Returns:
        dict: 생성 파일 경로와 격자점 개수 요약
    """
    sweep_hash = config_hash(config)
    points = lattice(config)
    logger.info(f"스윕 시작: mode={config.mode}, 격자점 {len(points)} 개, hash={sweep_hash[:12]}")

    if config.mode == "ensemble":
        # 앙상블 내부에서 실현 블록을 병렬화하므로 격자점은 순차 실행
        results, counts = run_lattice(
            sweep_hash, points, lambda p: ensemble_point(config, p, workers), out_dir, workers, parallel_points=False
        )
        df = sweep_frame(config, results)
        fits = ensemble_fits(df, config.variable)
    else:
        results, counts = run_lattice(sweep_hash, points, kernel_point, out_dir, workers)
        df = sweep_frame(config, results)
        fits = kernel_fits(df)

    artifacts = {
        "sweep_csv": save_dataframe_to_csv(df, Path(out_dir) / "sweep.csv"),
        "fits_json": save_json({"config_hash": sweep_hash, "seed": config.seed, "fits": fits},
                               Path(out_dir) / "fits.json"),
    }
    if config.mode == "table":
        table = table_rows(df, config)
        artifacts["table_csv"] = save_dataframe_to_csv(table, Path(out_dir) / "table.csv")
        counts["table_passed"] = int(table["passed"].sum())
        counts["table_rows"] = int(len(table))

    logger.info(
        f"스윕 완료: 계산 {counts['computed']}, 캐시 {counts['cached']}, 실패 {counts['failed']}"
    )
    return {"artifacts": artifacts, "counts": counts, "config_hash": sweep_hash, "n_points": len(points)}
