"""Born 근사 정방향 모델링 서비스.

d̂(x_r, ω) = ω² Σ_j q_j m_j Ĝ(ω, x_r, x_j) Σ_s Ĝ(ω, x_j, y_s) n̂_s(ω)
"""

from typing import Optional

import numpy as np

from app.core.constants.imaging import MIN_SENSOR_DISTANCE_RATIO
from app.core.exceptions import InvalidArgumentException
from app.core.logger import get_logger
from app.schemas.geometry_schemas import Perturbation, QuadratureRule, SphereArray
from app.schemas.imaging_schemas import DataMatrix
from app.schemas.signal_schemas import FrequencyGrid
from app.services.geometry_service import indicator
from app.services.greens_service import green_matrix
from app.services.signal_service import spectrum_to_traces, traces_to_spectrum
from app.utils.parallel_utils import ordered_map


logger = get_logger()

# 그린 함수 행렬 원소 수 상한 (노드 청크 크기 결정)
MATRIX_ELEMENT_BUDGET = 2_000_000


def check_inside_array(points: np.ndarray, array: SphereArray) -> None:
    radii = np.linalg.norm(points, axis=1)
    if radii.size and radii.max() >= array.radius:
        raise InvalidArgumentException(
            message=f"평가점이 측정 구 B_R (R={array.radius}) 밖에 있습니다",
            detail={"max_radius": float(radii.max())}
        )


def node_chunks(n: int, width: int):
    size = max(1, MATRIX_ELEMENT_BUDGET // max(width, 1))
    for start in range(0, n, size):
        yield slice(start, min(start + size, n))


def check_source_shape(src: np.ndarray, array: SphereArray, grid: FrequencyGrid) -> None:
    if src.shape[0] != array.n_sources or src.shape[1] != grid.size:
        raise InvalidArgumentException(
            message=f"소스 스펙트럼 형상 {src.shape} 이 (n_sources={array.n_sources}, n_freq={grid.size}) 와 맞지 않습니다",
            detail={"shape": list(src.shape)}
        )


def apply_forward(
    nodes: np.ndarray,
    weighted_model: np.ndarray,
    array: SphereArray,
    src: np.ndarray,
    grid: FrequencyGrid,
    c0: float = 1.0,
    workers: Optional[int] = 1,
) -> np.ndarray:
    """선형화 정방향 연산자 F 를 노드 모델 값에 적용.

    Args:
        nodes (np.ndarray): 모델 노드 (n_q, 3)
        weighted_model (np.ndarray): q_j·m_j (n_q,)
        array (SphereArray): 센서 어레이
        src (np.ndarray): 소스 스펙트럼 (n_s, n_f) 또는 실현 배치 (n_s, n_f, n_b)
        grid (FrequencyGrid): 주파수 격자
        c0 (float): 배경 속도
        workers (int, optional): 주파수 병렬 작업자 수

    Returns:
        np.ndarray: 데이터 (n_r, n_f) 또는 (n_r, n_f, n_b)
    """
    check_source_shape(src, array, grid)
    check_inside_array(nodes, array)
    min_distance = MIN_SENSOR_DISTANCE_RATIO * array.radius
    sources = array.source_positions
    receivers = array.receiver_positions
    width = array.n_sources + array.n_receivers

    def column(k: int) -> np.ndarray:
        omega = float(grid.omegas[k])
        s = src[:, k]
        out = np.zeros((array.n_receivers,) + s.shape[1:], dtype=complex)
        for sl in node_chunks(nodes.shape[0], width):
            u = green_matrix(omega, nodes[sl], sources, c0, min_distance) @ s
            qm = weighted_model[sl].reshape((-1,) + (1,) * (u.ndim - 1))
            out += green_matrix(omega, receivers, nodes[sl], c0, min_distance) @ (qm * u)
        return omega ** 2 * out

    columns = ordered_map(column, range(grid.size), workers, desc="forward")
    return np.stack(columns, axis=1)


def born_forward(
    p: Perturbation,
    quad: QuadratureRule,
    array: SphereArray,
    src: np.ndarray,
    grid: FrequencyGrid,
    c0: float = 1.0,
    workers: Optional[int] = 1,
) -> DataMatrix:
    """섭동 p 의 Born 근사 데이터 행렬 계산.

    Raises:
        InvalidArgumentException: 노드가 B_R 밖이거나 소스 형상 불일치
        SingularEvaluationException: 노드가 센서와 1e-6·R 이내
    """
    weighted = quad.weights * indicator(p, quad.nodes)
    values = apply_forward(quad.nodes, weighted, array, src, grid, c0, workers)
    logger.info(
        f"Born 정방향 계산 완료: 수신기 {array.n_receivers} × 주파수 {grid.size}, 노드 {quad.size} 개"
    )
    return DataMatrix(grid=grid, values=values, meta={"kind": p.kind.value, "epsilon": p.epsilon})


def to_time_domain(d: DataMatrix, dt: float, period: float) -> np.ndarray:
    """데이터 행렬을 수신기별 실수 시계열 (n_r, ceil(T/dt)) 로 변환.

    Raises:
        InvalidArgumentException: DFT 정렬 격자가 아니거나 dt 가 대역을 해상하지 못함
    """
    return spectrum_to_traces(d.values, d.grid, dt, period)


def from_time_domain(traces: np.ndarray, grid: FrequencyGrid, dt: float, meta: Optional[dict] = None) -> DataMatrix:
    """수신기 시계열을 격자 주파수의 데이터 행렬로 변환"""
    values = traces_to_spectrum(traces, grid, dt)
    return DataMatrix(grid=grid, values=values, meta=meta or {})


def recording_time(radius: float, c0: float, delay_span: float = 0.0) -> float:
    """전파 왕복과 지연 폭을 담는 최소 기록 시간 4R/c0 + delay_span.

    delay_span 은 지연 분포 지지 구간의 전체 폭이며 호출부는 2·τ_max 를 넘깁니다.
    """
    return 4.0 * radius / c0 + delay_span


def check_recording_time(period: float, radius: float, c0: float, delay_span: float = 0.0) -> bool:
    required = recording_time(radius, c0, delay_span)
    if period < required:
        logger.warning(
            f"기록 시간 T={period:.4g} 가 권장값 {required:.4g} 보다 짧습니다. 주기적 순환 오차가 생길 수 있습니다."
        )
        return False
    return True
