"""측정 어레이와 섭동 지지 영역 기하 서비스.

구면 위 Fibonacci 센서 배치, 섭동 지시 함수, 지지 영역 구적 규칙,
원거리 평가점 생성을 담당합니다.
"""

import math
from typing import Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from app.core.constants.error import ErrorMessages
from app.core.constants.imaging import (
    CYLINDER_HALF_LENGTH,
    DISC_RADIUS,
    FAR_DIRECTIONS,
    FAR_RADIAL_SAMPLES,
    FAR_RADIUS,
    NODES_PER_ETA,
    SUPPORT_TO_RADIUS_FACTOR,
    PerturbationKind,
)
from app.core.exceptions import ErrorCode, InvalidArgumentException
from app.core.logger import get_logger
from app.schemas.geometry_schemas import Perturbation, QuadratureRule, SphereArray


logger = get_logger()

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def fibonacci_sphere(n: int, radius: float) -> np.ndarray:
    """반지름 radius 구면 위 n 개의 Fibonacci 격자점.

    Args:
        n (int): 점 개수
        radius (float): 구 반지름

    Returns:
        np.ndarray: (n, 3) 좌표, 모든 점의 노름은 radius

    Raises:
        InvalidArgumentException: n < 1 또는 radius <= 0
    """
    if n < 1 or radius <= 0:
        raise InvalidArgumentException(
            message=f"Fibonacci 격자 인자가 올바르지 않습니다: n={n}, radius={radius}",
            detail={"n": n, "radius": radius}
        )
    i = np.arange(n, dtype=float) + 0.5
    cos_theta = 1.0 - 2.0 * i / n
    sin_theta = np.sqrt(np.clip(1.0 - cos_theta ** 2, 0.0, None))
    phi = GOLDEN_ANGLE * i
    unit = np.stack([sin_theta * np.cos(phi), sin_theta * np.sin(phi), cos_theta], axis=1)
    unit /= np.linalg.norm(unit, axis=1, keepdims=True)
    return radius * unit


def max_neighbor_spacing(points: np.ndarray) -> float:
    """점 집합의 최대 최근접 이웃 거리"""
    if points.shape[0] < 2:
        return math.inf
    distances, _ = cKDTree(points).query(points, k=2)
    return float(distances[:, 1].max())


def build_sphere_array(radius: float, n_sources: int, n_receivers: int) -> SphereArray:
    """소스/수신기 Fibonacci 어레이 생성"""
    sources = fibonacci_sphere(n_sources, radius)
    receivers = fibonacci_sphere(n_receivers, radius)
    spacing = max(max_neighbor_spacing(sources), max_neighbor_spacing(receivers))
    return SphereArray(
        radius=radius,
        source_positions=sources,
        receiver_positions=receivers,
        max_spacing=spacing,
    )


def check_array_adequacy(array: SphereArray, eta: float) -> bool:
    """센서 간격이 반파장 πη 이하인지 확인하고 부족하면 경고"""
    adequate = array.is_adequate(eta)
    if not adequate:
        logger.warning(
            f"센서 간격 {array.max_spacing:.4g} 이 반파장 πη={math.pi * eta:.4g} 보다 큽니다. "
            f"이산 어레이 합이 연속체 적분을 근사하지 못할 수 있습니다."
        )
    return adequate


def indicator(p: Perturbation, x: np.ndarray) -> np.ndarray:
    """섭동 값 α·1_support(x - center).

    Args:
        p (Perturbation): 섭동
        x (np.ndarray): (3,) 또는 (..., 3) 좌표

    Returns:
        np.ndarray | float: 입력 형상에 맞는 섭동 값
    """
    x = np.asarray(x, dtype=float)
    d = x - p.center_array
    if p.kind == PerturbationKind.BALL:
        inside = np.einsum("...i,...i->...", d, d) <= p.epsilon ** 2
    elif p.kind == PerturbationKind.CYLINDER:
        inside = (d[..., 0] ** 2 + d[..., 1] ** 2 <= p.epsilon ** 2) & (np.abs(d[..., 2]) <= CYLINDER_HALF_LENGTH)
    else:
        inside = (np.abs(d[..., 0]) <= p.epsilon) & (d[..., 1] ** 2 + d[..., 2] ** 2 <= DISC_RADIUS ** 2)
    values = p.alpha * inside.astype(float)
    if values.ndim == 0:
        return float(values)
    return values


def check_support_inside(p: Perturbation, radius: float) -> None:
    """지지 영역이 B_R 안쪽 깊이 있는지 (10·지름 ≤ R) 확인"""
    enclosing = 2.0 * (float(np.linalg.norm(p.center_array)) + 0.5 * p.support_diameter)
    if SUPPORT_TO_RADIUS_FACTOR * enclosing > radius:
        raise InvalidArgumentException(
            message=f"섭동 지지 영역(지름 {enclosing:.4g})이 R={radius} 에 비해 너무 큽니다",
            detail={"enclosing_diameter": enclosing, "radius": radius}
        )


def _gauss_legendre(n: int, a: float, b: float) -> Tuple[np.ndarray, np.ndarray, float]:
    """[a, b] 위 n 점 Gauss-Legendre 노드/가중치와 최대 간격 (끝점 포함)"""
    x, w = np.polynomial.legendre.leggauss(n)
    nodes = 0.5 * (b - a) * x + 0.5 * (b + a)
    weights = 0.5 * (b - a) * w
    gap = float(np.diff(np.concatenate([[a], nodes, [b]])).max())
    return nodes, weights, gap


def _uniform_azimuth(n: int) -> Tuple[np.ndarray, float]:
    phi = 2.0 * math.pi * (np.arange(n) + 0.5) / n
    return phi, 2.0 * math.pi / n


def _count(level: int, length: float, eta: Optional[float], minimum: int = 1) -> int:
    """방향별 노드 수: max(level, ceil(6·length/η))"""
    n = max(level, minimum)
    if eta is not None:
        n = max(n, int(math.ceil(NODES_PER_ETA * length / eta)))
    return n


def support_quadrature(p: Perturbation, level: int, eta: Optional[float] = None) -> QuadratureRule:
    """섭동 지지 영역 위의 텐서곱 구적 규칙.

    Ball 은 반지름(r² 가중) × cosθ × 방위각, Cylinder 는 단면 반지름(r 가중)
    × 방위각 × 축, Disc 는 두께 × 원판 반지름(r 가중) × 방위각으로 구성합니다.
    eta 가 주어지면 각 방향의 노드 간격이 η/3 이하가 되도록 노드 수를 늘립니다.

    Args:
        p (Perturbation): 섭동
        level (int): 방향당 최소 노드 수
        eta (float, optional): 파장 스케일 η

    Returns:
        QuadratureRule: 노드, 가중치(섭동 값 미포함), 최대 노드 간격

    Raises:
        InvalidArgumentException: level < 1
    """
    if level < 1:
        raise InvalidArgumentException(
            message=f"구적 레벨은 1 이상이어야 합니다: {level}",
            detail={"level": level}
        )
    eps = p.epsilon

    if p.kind == PerturbationKind.BALL:
        r, wr, gap_r = _gauss_legendre(_count(level, eps, eta, minimum=2), 0.0, eps)
        u, wu, _ = _gauss_legendre(_count(level, math.pi * eps, eta), -1.0, 1.0)
        phi, wphi = _uniform_azimuth(_count(2 * level, 2.0 * math.pi * eps, eta))
        theta = np.arccos(u)
        gap_theta = float(np.diff(np.concatenate([[0.0], np.sort(theta), [math.pi]])).max())
        R, U, PHI = np.meshgrid(r, u, phi, indexing="ij")
        S = np.sqrt(1.0 - U ** 2)
        nodes = np.stack([R * S * np.cos(PHI), R * S * np.sin(PHI), R * U], axis=-1).reshape(-1, 3)
        weights = (wr[:, None, None] * r[:, None, None] ** 2 * wu[None, :, None] * wphi
                   * np.ones_like(R)).reshape(-1)
        spacing = max(gap_r, eps * gap_theta, eps * wphi)

    elif p.kind == PerturbationKind.CYLINDER:
        r, wr, gap_r = _gauss_legendre(_count(level, eps, eta), 0.0, eps)
        phi, wphi = _uniform_azimuth(_count(2 * level, 2.0 * math.pi * eps, eta))
        z, wz, gap_z = _gauss_legendre(
            _count(level, 2.0 * CYLINDER_HALF_LENGTH, eta), -CYLINDER_HALF_LENGTH, CYLINDER_HALF_LENGTH
        )
        R, PHI, Z = np.meshgrid(r, phi, z, indexing="ij")
        nodes = np.stack([R * np.cos(PHI), R * np.sin(PHI), Z], axis=-1).reshape(-1, 3)
        weights = (wr[:, None, None] * r[:, None, None] * wphi * wz[None, None, :]
                   * np.ones_like(R)).reshape(-1)
        spacing = max(gap_r, eps * wphi, gap_z)

    else:
        x, wx, gap_x = _gauss_legendre(_count(level, 2.0 * eps, eta), -eps, eps)
        r, wr, gap_r = _gauss_legendre(_count(level, DISC_RADIUS, eta), 0.0, DISC_RADIUS)
        phi, wphi = _uniform_azimuth(_count(2 * level, 2.0 * math.pi * DISC_RADIUS, eta))
        X, R, PHI = np.meshgrid(x, r, phi, indexing="ij")
        nodes = np.stack([X, R * np.cos(PHI), R * np.sin(PHI)], axis=-1).reshape(-1, 3)
        weights = (wx[:, None, None] * wr[None, :, None] * r[None, :, None] * wphi
                   * np.ones_like(R)).reshape(-1)
        spacing = max(gap_x, gap_r, DISC_RADIUS * wphi)

    nodes = nodes + p.center_array
    logger.debug(f"{p.kind.value} 구적 규칙 생성: 노드 {weights.size} 개, 최대 간격 {spacing:.3g}")
    return QuadratureRule(nodes=nodes, weights=weights, max_spacing=spacing)


def far_points(
    p: Perturbation,
    eta: float,
    radius: float = FAR_RADIUS,
    n_directions: int = FAR_DIRECTIONS,
    n_radial: int = FAR_RADIAL_SAMPLES,
) -> np.ndarray:
    """원거리 평가점 집합.

    거리 radius 에서 시작해 한 진동 주기(πη)를 n_radial 개로 스캔합니다.
    Ball 은 구면 방향 n_directions 개, Cylinder 는 축에 수직인 방향,
    Disc 는 두께 방향(±x) 축 위 점을 사용합니다.
    """
    radii = radius + math.pi * eta * np.linspace(0.0, 1.0, n_radial)
    if p.kind == PerturbationKind.BALL:
        directions = fibonacci_sphere(n_directions, 1.0)
    elif p.kind == PerturbationKind.CYLINDER:
        angles = 2.0 * math.pi * np.arange(n_directions) / n_directions
        directions = np.stack([np.cos(angles), np.sin(angles), np.zeros_like(angles)], axis=1)
    else:
        directions = np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
    points = (directions[:, None, :] * radii[None, :, None]).reshape(-1, 3)
    return points + p.center_array


def probe_points(p: Perturbation, eta: float) -> np.ndarray:
    """중심점 + 원거리 평가점 (첫 행이 중심)"""
    return np.vstack([p.center_array[None, :], far_points(p, eta)])


def image_points(spec, p: Perturbation, eta: float) -> Tuple[np.ndarray, Optional[int], np.ndarray]:
    """이미지 평가점 생성.

    Args:
        spec (ImageConfig): 평가점 구성
        p (Perturbation): 섭동 (probe 점 계산용)
        eta (float): 파장 스케일

    Returns:
        Tuple[np.ndarray, Optional[int], np.ndarray]: 평가점, 중심점 인덱스, 원거리 인덱스
    """
    if spec.kind == "probe":
        pts = probe_points(p, eta)
        return pts, 0, np.arange(1, pts.shape[0])

    if spec.kind == "points":
        pts = np.asarray(spec.points, dtype=float).reshape(-1, 3)
    elif spec.kind == "line":
        t = np.linspace(0.0, 1.0, spec.n)[:, None]
        pts = (1.0 - t) * np.asarray(spec.start, dtype=float) + t * np.asarray(spec.end, dtype=float)
    elif spec.kind == "plane":
        s = np.linspace(-spec.half_width, spec.half_width, spec.n)
        A, B = np.meshgrid(s, s, indexing="ij")
        C = np.full_like(A, spec.offset)
        axes = {"xy": (A, B, C), "xz": (A, C, B), "yz": (C, A, B)}[spec.plane]
        pts = np.stack(axes, axis=-1).reshape(-1, 3) + p.center_array
    else:
        s = np.linspace(-spec.half_width, spec.half_width, spec.n)
        pts = np.stack(np.meshgrid(s, s, s, indexing="ij"), axis=-1).reshape(-1, 3) + p.center_array

    if pts.shape[0] == 0:
        raise InvalidArgumentException(
            message=ErrorMessages.get_message(ErrorCode.INVALID_ARGUMENT) + " (빈 이미지 격자)",
            detail={"kind": spec.kind}
        )
    if not spec.include_probe:
        return pts, None, np.arange(0)
    probe = probe_points(p, eta)
    start = pts.shape[0]
    return np.vstack([pts, probe]), start, np.arange(start + 1, start + probe.shape[0])
