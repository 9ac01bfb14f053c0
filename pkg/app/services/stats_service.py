"""앙상블 통계, 스케일링 피팅, 안정성 리포트 서비스.

실현 i 의 난수 생성기는 SeedSequence(root, spawn_key=(i,)) 로 만들고, 실현은
고정 크기 블록으로 나눠 블록 안에서 Welford 갱신, 블록 간에는 고정된 트리
순서로 병합하므로 결과는 작업자 수와 무관하게 비트 단위로 같습니다.
"""

import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from app.core.constants.imaging import (
    MIN_FIT_SAMPLES,
    MIN_FIT_SPAN,
    STABILITY_RATIO_FACTOR,
    Location,
)
from app.core.exceptions import InvalidArgumentException
from app.core.logger import get_logger
from app.core.setting import get_settings
from app.schemas.config_schemas import ExperimentConfig
from app.schemas.imaging_schemas import ImagingSetup
from app.schemas.stats_schemas import EnsembleStats, ScalingFit, StabilityCheck, StabilityReport
from app.services.forward_service import apply_forward
from app.services.geometry_service import indicator
from app.services.imaging_service import adjoint_values, expected_image
from app.services.kernel_service import mean_image, predicted_orders
from app.services.setup_service import build_setup, kernel_model_from_config, time_scale
from app.services.signal_service import draw_source_spectra
from app.utils.parallel_utils import ordered_map


settings = get_settings()
logger = get_logger()


def realization_rng(root_seed: int, index: int) -> np.random.Generator:
    """실현 index 의 독립 난수 생성기"""
    return np.random.default_rng(np.random.SeedSequence(root_seed, spawn_key=(index,)))


class WelfordAccumulator:
    """평가점별 평균/분산 온라인 누적기"""

    def __init__(self, size: int):
        self.n = 0
        self.mean = np.zeros(size)
        self.m2 = np.zeros(size)

    def update(self, x: np.ndarray) -> None:
        self.n += 1
        delta = x - self.mean
        self.mean = self.mean + delta / self.n
        self.m2 = self.m2 + delta * (x - self.mean)

    def merge(self, other: "WelfordAccumulator") -> "WelfordAccumulator":
        """두 누적기 병합 (Chan 공식)"""
        merged = WelfordAccumulator(self.mean.size)
        merged.n = self.n + other.n
        if merged.n == 0:
            return merged
        delta = other.mean - self.mean
        merged.mean = self.mean + delta * (other.n / merged.n)
        merged.m2 = self.m2 + other.m2 + delta ** 2 * (self.n * other.n / merged.n)
        return merged

    def std(self) -> np.ndarray:
        if self.n < 2:
            return np.zeros_like(self.mean)
        return np.sqrt(self.m2 / (self.n - 1))


def _tree_merge(accs: List[WelfordAccumulator]) -> WelfordAccumulator:
    while len(accs) > 1:
        paired = [accs[i].merge(accs[i + 1]) for i in range(0, len(accs) - 1, 2)]
        if len(accs) % 2:
            paired.append(accs[-1])
        accs = paired
    return accs[0]


def run_ensemble(
    config: Union[ExperimentConfig, ImagingSetup],
    n_realizations: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    fixed_seed: Optional[bool] = None,
) -> EnsembleStats:
    """소스 실현 앙상블의 이미지 평균/표준편차.

    Args:
        config (ExperimentConfig | ImagingSetup): 실험 설정 또는 구성된 setup
        n_realizations (int, optional): 실현 개수 (기본: 설정값)
        seed (int, optional): 루트 seed (기본: 설정값)
        workers (int, optional): 블록 병렬 작업자 수
        fixed_seed (bool, optional): 모든 실현에 같은 seed 사용 (표준편차 0 확인용)

    Raises:
        InvalidArgumentException: n_realizations < 2
    """
    setup = config if isinstance(config, ImagingSetup) else build_setup(config)
    cfg = setup.config
    n = n_realizations if n_realizations is not None else cfg.ensemble.n_realizations
    root = seed if seed is not None else cfg.seed
    fixed = cfg.ensemble.fixed_seed if fixed_seed is None else fixed_seed
    if n < 2:
        raise InvalidArgumentException(
            message=f"실현 개수는 2 이상이어야 합니다: {n}",
            detail={"n_realizations": n}
        )

    block_size = max(1, settings.ENSEMBLE_BLOCK_SIZE)
    n_blocks = math.ceil(n / block_size)
    weighted = setup.quadrature.weights * indicator(setup.perturbation, setup.quadrature.nodes)

    def run_block(b: int) -> WelfordAccumulator:
        indices = range(b * block_size, min((b + 1) * block_size, n))
        src = np.stack([
            draw_source_spectra(setup.source_model, setup.grid, setup.array.n_sources,
                                realization_rng(root, 0 if fixed else i))
            for i in indices
        ], axis=-1)
        data = apply_forward(setup.quadrature.nodes, weighted, setup.array, src, setup.grid, setup.c0, workers=1)
        images, _ = adjoint_values(data, setup.array, src, setup.points, setup.grid, setup.c0, workers=1)
        acc = WelfordAccumulator(setup.points.shape[0])
        for j in range(images.shape[1]):
            acc.update(images[:, j])
        return acc

    logger.info(f"앙상블 실행: 실현 {n} 개, 블록 {n_blocks} 개 (블록 크기 {block_size}), seed={root}")
    total = _tree_merge(ordered_map(run_block, range(n_blocks), workers, desc="ensemble"))
    return EnsembleStats(
        n_realizations=n,
        points=setup.points,
        mean=total.mean,
        std=total.std(),
        meta={"seed": root, "config_hash": setup.config_hash, "fixed_seed": fixed},
    )


# ---------------------------------------------------------------- 스케일링 피팅

def _pairs(samples: Sequence[Tuple[float, float]]) -> Tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(samples, dtype=float).reshape(-1, 2)
    return arr[:, 0], arr[:, 1]


def _r2(y: np.ndarray, fitted: np.ndarray) -> float:
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0
    return 1.0 - float(np.sum((y - fitted) ** 2)) / ss_tot


def fit_scaling(samples: Sequence[Tuple[float, float]], variable: str = "x") -> ScalingFit:
    """log y = a + s·log x 최소제곱 피팅.

    Raises:
        InvalidArgumentException: 표본 4 개 미만, 변수 범위 8 배 미만, 양수가 아닌 값
    """
    x, y = _pairs(samples)
    if x.size < MIN_FIT_SAMPLES:
        raise InvalidArgumentException(
            message=f"피팅에는 최소 {MIN_FIT_SAMPLES} 개 표본이 필요합니다: {x.size}",
            detail={"variable": variable, "n": int(x.size)}
        )
    if np.any(x <= 0) or np.any(y <= 0):
        raise InvalidArgumentException(
            message=f"로그 피팅 값은 양수여야 합니다 ({variable})",
            detail={"variable": variable, "x": x.tolist(), "y": y.tolist()}
        )
    if x.max() / x.min() < MIN_FIT_SPAN:
        raise InvalidArgumentException(
            message=f"{variable} 범위가 {MIN_FIT_SPAN:g} 배 미만입니다: {x.min():g} ~ {x.max():g}",
            detail={"variable": variable}
        )
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    return ScalingFit(
        variable=variable, model="power", x=x.tolist(), y=y.tolist(),
        slope=float(slope), intercept=float(intercept), r2=_r2(ly, slope * lx + intercept),
    )


def fit_log_linear(samples: Sequence[Tuple[float, float]], variable: str = "x") -> ScalingFit:
    """y = a + s·|ln x| 최소제곱 피팅 (로그 스케일 대비용)"""
    x, y = _pairs(samples)
    if x.size < MIN_FIT_SAMPLES or np.any(x <= 0):
        raise InvalidArgumentException(
            message=f"로그-선형 피팅에는 양수 x 표본 {MIN_FIT_SAMPLES} 개 이상이 필요합니다",
            detail={"variable": variable, "n": int(x.size)}
        )
    lx = np.abs(np.log(x))
    slope, intercept = np.polyfit(lx, y, 1)
    return ScalingFit(
        variable=variable, model="log_linear", x=x.tolist(), y=y.tolist(),
        slope=float(slope), intercept=float(intercept), r2=_r2(y, slope * lx + intercept),
    )


# ---------------------------------------------------------------- 안정성 리포트

def stability_report(stats: EnsembleStats, setup: ImagingSetup) -> StabilityReport:
    """평균/표준편차 비율과 대비를 차수 예측과 비교.

    중심 비율 |mean|/std 와 대표 대비 |mean(center)| / max_far std 가
    예측 차수의 STABILITY_RATIO_FACTOR 배 이상이면 통과입니다.

    Raises:
        InvalidArgumentException: 평가점에 중심/원거리 점이 없음
    """
    if setup.center_index is None or setup.far_indices.size == 0:
        raise InvalidArgumentException(message="안정성 리포트에는 중심점과 원거리 평가점이 필요합니다")
    p = setup.perturbation
    model = setup.source_model
    scale = time_scale(model)
    c, far = setup.center_index, setup.far_indices

    mean_c = float(stats.mean[c])
    std_c = float(stats.std[c])
    mean_far = float(np.max(np.abs(stats.mean[far])))
    std_far = float(np.max(stats.std[far]))

    center_pred = predicted_orders(p.kind, Location.CENTER, model.kind)
    far_pred = predicted_orders(p.kind, Location.FAR, model.kind)
    args = (p.epsilon, setup.eta, scale)
    ratio_pred = center_pred.mean.evaluate(*args) / center_pred.std.evaluate(*args)
    contrast_pred = center_pred.mean.evaluate(*args) / far_pred.std.evaluate(*args)
    ratio = abs(mean_c) / std_c if std_c > 0 else math.inf
    contrast_value = abs(mean_c) / std_far if std_far > 0 else math.inf

    checks = [
        StabilityCheck(
            name="center mean/std", measured=ratio, predicted=ratio_pred,
            threshold=STABILITY_RATIO_FACTOR * ratio_pred, passed=ratio >= STABILITY_RATIO_FACTOR * ratio_pred,
        ),
        StabilityCheck(
            name="typical contrast", measured=contrast_value, predicted=contrast_pred,
            threshold=STABILITY_RATIO_FACTOR * contrast_pred,
            passed=contrast_value >= STABILITY_RATIO_FACTOR * contrast_pred,
        ),
    ]

    center_point = setup.points[c:c + 1]
    expected = float(expected_image(p, setup.quadrature, setup.array, model, setup.grid, center_point, setup.c0)[0])
    kernel = kernel_model_from_config(setup.config, grid=setup.grid)
    density = setup.array.source_density * setup.array.receiver_density
    analytic = float(mean_image(kernel, p, setup.quadrature, center_point, setup.c0, density)[0])

    return StabilityReport(
        kind=p.kind.value,
        source_kind=model.kind.value,
        epsilon=p.epsilon,
        eta=setup.eta,
        time_scale=scale,
        n_realizations=stats.n_realizations,
        mean_center=mean_c,
        std_center=std_c,
        mean_far_max=mean_far,
        std_far_max=std_far,
        expected_mean_center=expected,
        analytic_mean_center=analytic,
        checks=checks,
    )


def render_stability_report(report: StabilityReport) -> str:
    """안정성 리포트 정렬 텍스트"""
    header = [
        f"kind={report.kind} source={report.source_kind} epsilon={report.epsilon:g} "
        f"eta={report.eta:g} time_scale={report.time_scale:g} n={report.n_realizations}",
        f"mean(center)={report.mean_center:.6g} std(center)={report.std_center:.6g} "
        f"max|mean(far)|={report.mean_far_max:.6g} max std(far)={report.std_far_max:.6g}",
        f"expected mean(center)={report.expected_mean_center:.6g} "
        f"analytic mean(center)={report.analytic_mean_center:.6g}",
        "",
    ]
    table = pd.DataFrame([c.model_dump() for c in report.checks])
    footer = ["", f"overall: {'PASS' if report.passed else 'FAIL'}"]
    return "\n".join(header) + table.to_string(index=False) + "\n".join(footer) + "\n"
