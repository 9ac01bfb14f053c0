"""역전파(수반 연산자) 이미징 서비스.

스펙트럼 경로:
    I(x) = (1/π) Re Σ_k w_k ω_k² Σ_r Ĝ(ω_k, x, x_r) conj d̂_r(ω_k) · Σ_s Ĝ(ω_k, x, y_s) n̂_s(ω_k)
음의 주파수 기여는 켤레 대칭으로 접어 넣습니다.

시간 영역 상관 경로:
    I(x) = -∫ u(t, x) v(t, x) dt
    u(t, x) = Σ_s n_s(t - |x-y_s|/c0) / (4π|x-y_s|)
    v(t, x) = Σ_r d̈_r(t + |x-x_r|/c0) / (4π|x-x_r|)
"""

import math
from typing import Optional

import numpy as np
from scipy.signal import kaiser_beta
from scipy.spatial.distance import cdist
from scipy.special import i0e

from app.core.constants.imaging import (
    INTERP_HALF_WIDTH,
    INTERP_MAX_ATTENUATION_DB,
    MIN_SENSOR_DISTANCE_RATIO,
)
from app.core.exceptions import InvalidArgumentException
from app.core.logger import get_logger
from app.schemas.geometry_schemas import Perturbation, QuadratureRule, SphereArray
from app.schemas.imaging_schemas import DataMatrix, ImageGrid
from app.schemas.signal_schemas import FrequencyGrid, SourceModel
from app.services.forward_service import check_inside_array, check_source_shape, node_chunks
from app.services.geometry_service import far_points, indicator
from app.services.greens_service import green_matrix
from app.services.signal_service import source_second_moment, spectral_second_derivative
from app.utils.parallel_utils import ordered_map


logger = get_logger()


def _fold(acc: np.ndarray):
    """양의 주파수 합을 실수 축 전체로 접고 (값, 허수 잔차) 반환"""
    full = (acc + np.conj(acc)) / (2.0 * math.pi)
    real = full.real
    peak = float(np.max(np.abs(real))) if real.size else 0.0
    residual = float(np.max(np.abs(full.imag)) / peak) if peak > 0 else 0.0
    return real, residual


def adjoint_values(
    data: np.ndarray,
    array: SphereArray,
    src: np.ndarray,
    points: np.ndarray,
    grid: FrequencyGrid,
    c0: float = 1.0,
    workers: Optional[int] = 1,
):
    """수반 연산자 F* 를 데이터 배열에 적용.

    Args:
        data (np.ndarray): (n_r, n_f) 또는 (n_r, n_f, n_b)
        src (np.ndarray): (n_s, n_f) 또는 (n_s, n_f, n_b)
        points (np.ndarray): 이미지 평가점 (n_g, 3)

    Returns:
        Tuple[np.ndarray, float]: 이미지 (n_g,) 또는 (n_g, n_b), 허수 잔차
    """
    check_source_shape(src, array, grid)
    check_inside_array(points, array)
    if data.shape[0] != array.n_receivers or data.shape[1] != grid.size:
        raise InvalidArgumentException(
            message=f"데이터 형상 {data.shape} 이 어레이/격자와 맞지 않습니다",
            detail={"shape": list(data.shape)}
        )
    min_distance = MIN_SENSOR_DISTANCE_RATIO * array.radius
    sources = array.source_positions
    receivers = array.receiver_positions
    width = array.n_sources + array.n_receivers

    def column(k: int) -> np.ndarray:
        omega = float(grid.omegas[k])
        s = src[:, k]
        dk = np.conj(data[:, k])
        out = np.empty((points.shape[0],) + s.shape[1:], dtype=complex)
        for sl in node_chunks(points.shape[0], width):
            v = green_matrix(omega, points[sl], sources, c0, min_distance) @ s
            b = green_matrix(omega, points[sl], receivers, c0, min_distance) @ dk
            out[sl] = v * b
        return grid.weights[k] * omega ** 2 * out

    columns = ordered_map(column, range(grid.size), workers, desc="adjoint")
    return _fold(np.sum(np.stack(columns, axis=0), axis=0))


def apply_adjoint(
    d: DataMatrix,
    array: SphereArray,
    src: np.ndarray,
    points: np.ndarray,
    c0: float = 1.0,
    workers: Optional[int] = 1,
) -> ImageGrid:
    """데이터 행렬 d 를 평가점 위로 역전파한 이미지.

    Raises:
        InvalidArgumentException: 형상 불일치 또는 평가점이 B_R 밖
        SingularEvaluationException: 평가점이 센서와 1e-6·R 이내
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    values, residual = adjoint_values(d.values, array, src, points, d.grid, c0, workers)
    if residual > 1e-10:
        logger.warning(f"이미지 허수부 잔차가 큽니다: {residual:.3g}")
    return ImageGrid(points=points, values=values, imag_residual=residual, meta={"method": "spectral"})


def data_inner_product(d1: np.ndarray, d2: np.ndarray, grid: FrequencyGrid) -> float:
    """데이터 내적 (1/π) Re Σ_r Σ_k w_k d1 conj(d2)"""
    return float(np.real(np.sum(grid.weights[None, :] * d1 * np.conj(d2))) / math.pi)


def model_inner_product(m1: np.ndarray, m2: np.ndarray, weights: np.ndarray) -> float:
    """모델 내적 Σ_j q_j m1_j m2_j"""
    return float(np.sum(weights * m1 * m2))


def _kaiser_taps(fraction: np.ndarray, half_width: int, beta: float) -> np.ndarray:
    """분수 지연 fraction 의 Kaiser windowed sinc 탭 (m, 2K)"""
    j = np.arange(-half_width + 1, half_width + 1)
    u = j[None, :] - fraction[:, None]
    arg = np.sqrt(np.clip(1.0 - (u / half_width) ** 2, 0.0, None))
    window = i0e(beta * arg) / i0e(beta) * np.exp(beta * (arg - 1.0))
    return np.sinc(u) * window


def bandlimited_shift(
    traces: np.ndarray,
    shifts: np.ndarray,
    dt: float,
    band_max: float,
    half_width: int = INTERP_HALF_WIDTH,
) -> np.ndarray:
    """주기 시계열을 행별로 시간 이동한 y_m(t) = x_m(t + shift_m).

    Kaiser 창 β 는 대역 상한과 Nyquist 사이 여유 Δ 로부터 Kaiser 설계식
    A = 2.285·2Δ·(2K-1) + 7.95 에 맞춰 정합니다.

    Raises:
        InvalidArgumentException: 대역 상한이 Nyquist 이상
    """
    gap = math.pi - band_max * dt
    if gap <= 0:
        raise InvalidArgumentException(
            message=f"dt={dt} 가 대역 상한 {band_max:.4g} 를 해상하지 못합니다",
            detail={"dt": dt, "band_max": band_max}
        )
    attenuation = min(2.285 * 2.0 * gap * (2 * half_width - 1) + 7.95, INTERP_MAX_ATTENUATION_DB)
    beta = float(kaiser_beta(attenuation))

    traces = np.atleast_2d(traces)
    m, n = traces.shape
    s = np.asarray(shifts, dtype=float) / dt
    whole = np.floor(s).astype(int)
    taps = _kaiser_taps(s - whole, half_width, beta)
    rows = np.arange(m)[:, None]
    base = np.arange(n)[None, :] + whole[:, None]
    out = np.zeros_like(traces, dtype=float)
    for col, j in enumerate(range(-half_width + 1, half_width + 1)):
        out += taps[:, col:col + 1] * traces[rows, (base + j) % n]
    return out


def image_via_wave_correlation(
    data_traces: np.ndarray,
    source_traces: np.ndarray,
    array: SphereArray,
    points: np.ndarray,
    period: float,
    band_max: float,
    c0: float = 1.0,
    workers: Optional[int] = 1,
) -> ImageGrid:
    """시간 영역 상관으로 계산한 이미지 (스펙트럼 경로와 보간 오차 이내로 일치).

    Args:
        data_traces (np.ndarray): 수신기 시계열 (n_r, N)
        source_traces (np.ndarray): 소스 시계열 (n_s, N)
        array (SphereArray): 센서 어레이
        points (np.ndarray): 평가점 (n_g, 3)
        period (float): 기록 시간 T (샘플 간격 T/N)
        band_max (float): 신호 대역 상한 주파수

    Raises:
        InvalidArgumentException: 기록 시간이 전파 시간보다 짧거나 형상 불일치
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    check_inside_array(points, array)
    n = data_traces.shape[-1]
    if source_traces.shape != (array.n_sources, n) or data_traces.shape[0] != array.n_receivers:
        raise InvalidArgumentException(
            message="시계열 형상이 어레이와 맞지 않습니다",
            detail={"data": list(data_traces.shape), "source": list(source_traces.shape)}
        )
    reach = float(np.linalg.norm(points, axis=1).max())
    required = 2.0 * (array.radius + reach) / c0
    if period < required:
        raise InvalidArgumentException(
            message=f"기록 시간 T={period:.4g} 가 전파 시간 {required:.4g} 보다 짧습니다",
            detail={"period": period, "required": required}
        )
    dt = period / n
    accel = spectral_second_derivative(data_traces, dt)
    dist_s = cdist(points, array.source_positions)
    dist_r = cdist(points, array.receiver_positions)

    def correlate(i: int) -> float:
        ds, dr = dist_s[i], dist_r[i]
        u = np.sum(bandlimited_shift(source_traces, -ds / c0, dt, band_max) / (4.0 * math.pi * ds)[:, None], axis=0)
        v = np.sum(bandlimited_shift(accel, dr / c0, dt, band_max) / (4.0 * math.pi * dr)[:, None], axis=0)
        return float(-dt * np.dot(u, v))

    values = np.asarray(ordered_map(correlate, range(points.shape[0]), workers, desc="correlation"))
    return ImageGrid(points=points, values=values, imag_residual=0.0, meta={"method": "correlation"})


def _locate(points: np.ndarray, targets: np.ndarray) -> np.ndarray:
    idx = []
    for t in np.atleast_2d(targets):
        hits = np.flatnonzero(np.all(np.abs(points - t) <= 1e-12 * max(1.0, float(np.abs(t).max())), axis=1))
        if hits.size == 0:
            raise InvalidArgumentException(
                message=f"이미지 격자에 평가점 {t.tolist()} 이 없습니다",
                detail={"point": t.tolist()}
            )
        idx.append(int(hits[0]))
    return np.asarray(idx)


def contrast(img: ImageGrid, p: Perturbation, far: Optional[np.ndarray] = None, eta: Optional[float] = None) -> float:
    """대비 |I(center)| / max_far |I|.

    far 가 없으면 far_points(p, eta) 를 사용하며, 분모가 0 이면 inf 를 반환합니다.

    Raises:
        InvalidArgumentException: 격자에 중심점이나 원거리 점이 없음
    """
    if far is None:
        if eta is None:
            raise InvalidArgumentException(message="원거리 점 또는 η 가 필요합니다")
        far = far_points(p, eta)
    if len(far) == 0:
        raise InvalidArgumentException(message="원거리 평가점 집합이 비어 있습니다")
    center_value = abs(float(img.values[_locate(img.points, p.center_array)[0]]))
    far_value = float(np.max(np.abs(img.values[_locate(img.points, far)])))
    if far_value == 0.0:
        return math.inf
    return center_value / far_value


def expected_image(
    p: Perturbation,
    quad: QuadratureRule,
    array: SphereArray,
    model: SourceModel,
    grid: FrequencyGrid,
    points: np.ndarray,
    c0: float = 1.0,
    workers: Optional[int] = 1,
) -> np.ndarray:
    """이산 어레이에서 소스 앙상블에 대한 이미지의 정확한 기댓값.

    E[n̂_s conj n̂_s'] = diag·δ_ss' + coherent 를 이용해 소스 합을 닫힌 형태로 평균합니다.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    check_inside_array(points, array)
    check_inside_array(quad.nodes, array)
    diag, coherent = source_second_moment(model, grid)
    weighted = quad.weights * indicator(p, quad.nodes)
    min_distance = MIN_SENSOR_DISTANCE_RATIO * array.radius
    sources = array.source_positions
    receivers = array.receiver_positions
    width = points.shape[0] + array.n_sources + array.n_receivers

    def column(k: int) -> np.ndarray:
        omega = float(grid.omegas[k])
        gp_s = green_matrix(omega, points, sources, c0, min_distance)
        gp_r = green_matrix(omega, points, receivers, c0, min_distance)
        out = np.zeros(points.shape[0], dtype=complex)
        for sl in node_chunks(quad.nodes.shape[0], width):
            gq_s = green_matrix(omega, quad.nodes[sl], sources, c0, min_distance)
            gr_q = green_matrix(omega, receivers, quad.nodes[sl], c0, min_distance)
            s_src = diag[k] * (gp_s @ np.conj(gq_s).T)
            if coherent[k] != 0.0:
                s_src += coherent[k] * np.outer(gp_s.sum(axis=1), np.conj(gq_s.sum(axis=1)))
            s_rec = gp_r @ np.conj(gr_q)
            out += (s_rec * s_src) @ weighted[sl]
        return grid.weights[k] * omega ** 4 * out

    columns = ordered_map(column, range(grid.size), workers, desc="expected")
    values, _ = _fold(np.sum(np.stack(columns, axis=0), axis=0))
    return values
