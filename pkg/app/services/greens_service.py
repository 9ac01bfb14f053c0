"""균질 매질 3차원 Helmholtz 그린 함수 서비스"""

import math
from typing import Literal

import numpy as np
from scipy.spatial.distance import cdist

from app.core.exceptions import InvalidArgumentException, SingularEvaluationException
from app.core.logger import get_logger
from app.schemas.geometry_schemas import SphereArray


logger = get_logger()


def green_hat(omega: float, x1, x2, c0: float = 1.0) -> complex:
    """Ĝ(ω, x1, x2) = exp(iω|x1-x2|/c0) / (4π|x1-x2|).

    Raises:
        SingularEvaluationException: x1 == x2
    """
    d = float(np.linalg.norm(np.asarray(x1, dtype=float) - np.asarray(x2, dtype=float)))
    if d == 0.0:
        raise SingularEvaluationException(
            message="그린 함수를 일치하는 두 점에서 평가할 수 없습니다",
            detail={"x": list(map(float, x1))}
        )
    return complex(np.exp(1j * omega * d / c0) / (4.0 * math.pi * d))


def green_matrix(omega: float, a: np.ndarray, b: np.ndarray, c0: float = 1.0, min_distance: float = 0.0) -> np.ndarray:
    """점 집합 a × b 의 그린 함수 행렬 (len(a), len(b)).

    Raises:
        SingularEvaluationException: 거리가 min_distance 이하인 쌍이 있음
    """
    d = cdist(np.atleast_2d(a), np.atleast_2d(b))
    closest = float(d.min()) if d.size else math.inf
    if closest <= min_distance:
        raise SingularEvaluationException(
            message=f"평가점이 센서와 너무 가깝습니다 (거리 {closest:.3g} ≤ {min_distance:.3g})",
            detail={"min_distance": closest}
        )
    return np.exp(1j * omega * d / c0) / (4.0 * math.pi * d)


def sinc_kernel(omega: float, x, y, c0: float = 1.0) -> float:
    """K_ω(x, y) = (1/4π)·sinc(ω|x-y|/c0), sinc(0) = 1"""
    d = float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))
    return float(np.sinc(omega * d / (math.pi * c0))) / (4.0 * math.pi)


def imag_green(omega: float, x, y, c0: float = 1.0) -> float:
    """Im Ĝ(ω, x, y) = (ω/c0)·K_ω(x, y), x = y 에서도 유한"""
    return omega / c0 * sinc_kernel(omega, x, y, c0)


def hk_identity_check(
    array: SphereArray,
    omega: float,
    x,
    y,
    c0: float = 1.0,
    normalize: Literal["peak", "pointwise"] = "peak",
) -> float:
    """Helmholtz-Kirchhoff 항등식의 이산 어레이 상대 오차.

    (2iω/c0) (4πR²/N) Σ_r conj Ĝ(x_r, x) Ĝ(x_r, y) ≈ 2i Im Ĝ(ω, x, y)

    기본 정규화는 항등식 우변의 최대값 |2i Im Ĝ(ω, x, x)| 이며,
    "pointwise" 는 해당 점쌍의 우변 크기로 나눕니다.

    Raises:
        InvalidArgumentException: x, y 가 B_{R/10} 밖에 있음
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    limit = array.radius / 10.0
    if np.linalg.norm(x) > limit or np.linalg.norm(y) > limit:
        raise InvalidArgumentException(
            message=f"평가점은 |x| ≤ R/10 = {limit:.4g} 이어야 합니다",
            detail={"x": x.tolist(), "y": y.tolist()}
        )
    receivers = array.receiver_positions
    gx = green_matrix(omega, receivers, x, c0)[:, 0]
    gy = green_matrix(omega, receivers, y, c0)[:, 0]
    area = 4.0 * math.pi * array.radius ** 2 / receivers.shape[0]
    lhs = 2j * omega / c0 * area * np.sum(np.conj(gx) * gy)
    rhs = 2j * imag_green(omega, x, y, c0)
    if normalize == "pointwise":
        scale = abs(rhs)
    else:
        scale = 2.0 * omega / (4.0 * math.pi * c0)
    return float(abs(lhs - rhs) / scale)
