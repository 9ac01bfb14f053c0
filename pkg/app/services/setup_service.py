"""실험 설정으로부터 계산 객체를 구성하는 서비스"""

import math
from typing import Optional

from app.core.constants.imaging import BAND_HALF_WIDTH, GridKind, SourceKind
from app.core.exceptions import InvalidArgumentException
from app.core.logger import get_logger
from app.schemas.config_schemas import ExperimentConfig
from app.schemas.imaging_schemas import ImagingSetup
from app.schemas.kernel_schemas import KernelModel
from app.schemas.signal_schemas import FrequencyGrid, PulseSpec, SourceModel, StationaryNoiseModel
from app.services.forward_service import check_recording_time, recording_time
from app.services.geometry_service import (
    build_sphere_array,
    check_array_adequacy,
    check_support_inside,
    image_points,
    support_quadrature,
)
from app.services.signal_service import (
    band_limits,
    dft_grid,
    gauss_legendre_grid,
    t_tau,
)
from app.utils.config_utils import config_hash


logger = get_logger()


def source_model_from_config(config: ExperimentConfig) -> SourceModel:
    src = config.source
    if src.kind == SourceKind.BLENDED:
        return SourceModel(
            kind=SourceKind.BLENDED,
            pulse=PulseSpec(omega0=src.omega0, bandwidth=src.bandwidth),
            delays=src.delays,
        )
    noise = StationaryNoiseModel(
        shape=src.noise.shape,
        omega0=src.omega0,
        bandwidth=src.bandwidth,
        duration=src.noise.duration,
        omegas=src.noise.omegas,
        values=src.noise.values,
    )
    return SourceModel(kind=SourceKind.STATIONARY, noise=noise)


def time_scale(model: SourceModel) -> float:
    """blended 는 T_τ, stationary 는 기록 시간 T"""
    if model.kind == SourceKind.BLENDED:
        return t_tau(model.delays)
    return model.noise.duration


def default_period(config: ExperimentConfig, model: SourceModel) -> float:
    """기록 시간: stationary 는 T, blended 는 4R/c0 + 지연 폭 + 펄스 길이"""
    if model.kind == SourceKind.STATIONARY:
        return model.noise.duration
    pulse_length = 2.0 * BAND_HALF_WIDTH / model.pulse.bandwidth
    return recording_time(config.array.radius, config.medium.c0, 2.0 * model.delays.tau_max) + pulse_length


def frequency_grid_from_config(config: ExperimentConfig, model: Optional[SourceModel] = None) -> FrequencyGrid:
    """설정의 주파수 격자 (Gauss-Legendre 또는 DFT)"""
    model = model or source_model_from_config(config)
    freq = config.frequency
    if freq.kind == GridKind.GAUSS_LEGENDRE:
        return gauss_legendre_grid(config.source.omega0, config.source.bandwidth, freq.n_nodes)
    period = freq.period or default_period(config, model)
    if model.kind == SourceKind.STATIONARY and abs(period - model.noise.duration) > 1e-12 * period:
        raise InvalidArgumentException(
            message=f"stationary 소스의 DFT 주기 {period} 는 기록 시간 {model.noise.duration} 과 같아야 합니다",
            detail={"period": period, "duration": model.noise.duration}
        )
    lo, hi = band_limits(model)
    return dft_grid(lo, hi, period)


def kernel_model_from_config(config: ExperimentConfig, grid: Optional[FrequencyGrid] = None) -> KernelModel:
    """연속체 커널 모델 (기본 격자는 33 점 Gauss-Legendre)"""
    model = source_model_from_config(config)
    if grid is None:
        grid = gauss_legendre_grid(config.source.omega0, config.source.bandwidth, config.frequency.n_nodes)
    if model.kind == SourceKind.BLENDED:
        return KernelModel(source_kind=model.kind, grid=grid, pulse=model.pulse, t_tau=t_tau(model.delays))
    return KernelModel(source_kind=model.kind, grid=grid, noise=model.noise)


def sampling_step(config: ExperimentConfig, grid: FrequencyGrid) -> float:
    """대역 상한을 oversampling 배로 해상하는 시간 간격"""
    return math.pi / (config.time.oversampling * float(grid.omegas[-1]))


def build_setup(config: ExperimentConfig) -> ImagingSetup:
    """설정 검증 후 어레이, 섭동, 구적 규칙, 소스 모델, 주파수 격자, 평가점 구성.

    Raises:
        InvalidArgumentException: 지지 영역이 B_R 에 비해 크거나 격자 구성 불가
    """
    c0 = config.medium.c0
    eta = config.eta
    p = config.perturbation
    check_support_inside(p, config.array.radius)

    array = build_sphere_array(config.array.radius, config.array.n_sources, config.array.n_receivers)
    check_array_adequacy(array, eta)
    quad = support_quadrature(p, config.quadrature.level, eta if config.quadrature.resolve_eta else None)
    model = source_model_from_config(config)
    grid = frequency_grid_from_config(config, model)
    if grid.kind == GridKind.DFT and model.kind == SourceKind.BLENDED:
        check_recording_time(grid.period, array.radius, c0, 2.0 * model.delays.tau_max)
    points, center_index, far_indices = image_points(config.image, p, eta)

    logger.info(
        f"실험 구성: {p.kind.value} ε={p.epsilon:g}, η={eta:g}, 소스 {model.kind.value}, "
        f"주파수 {grid.size} 개 ({grid.kind.value}), 평가점 {points.shape[0]} 개"
    )
    return ImagingSetup(
        config=config,
        config_hash=config_hash(config),
        array=array,
        perturbation=p,
        quadrature=quad,
        source_model=model,
        grid=grid,
        points=points,
        center_index=center_index,
        far_indices=far_indices,
        c0=c0,
        eta=eta,
    )
