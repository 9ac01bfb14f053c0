"""연속체 평균/공분산 커널과 공간 적분 서비스.

평균 커널   ⟨K⟩(x, x')  = (1/2⁵π³) ∫ ω⁴ S(ω) sinc²(ω|x-x'|/c0) dω
공분산 커널 Cov(x', x'') = (1/2πT_τ) ∫ ω⁸ |f̂|⁴ (H1 + H2) dω

S(ω) 는 blended 이면 |f̂(ω)|², stationary 이면 T·F̂(ω) 이며, 실수 축 적분은
양의 주파수 격자 합의 2 배로 계산합니다.
"""

import math
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import sici
from scipy.stats import qmc

from app.core.constants.imaging import (
    BLENDED_ORDER_TABLE,
    CYLINDER_HALF_LENGTH,
    DISC_RADIUS,
    RESOLUTION_LIMIT_PER_ETA,
    STATIONARY_TIME_EXPONENTS,
    Location,
    PerturbationKind,
    SourceKind,
)
from app.core.exceptions import InvalidArgumentException, ResolutionException
from app.core.logger import get_logger
from app.core.setting import get_settings
from app.schemas.geometry_schemas import Perturbation, QuadratureRule
from app.schemas.kernel_schemas import AsymptoticPrediction, KernelModel, OrderTerm, QmcEstimate
from app.services.forward_service import node_chunks
from app.services.geometry_service import indicator, support_quadrature
from app.services.signal_service import noise_spectrum, pulse_spectrum


settings = get_settings()
logger = get_logger()


def _sinc(x: np.ndarray) -> np.ndarray:
    """sin(x)/x (x=0 에서 1)"""
    return np.sinc(np.asarray(x) / math.pi)


# ---------------------------------------------------------------- 주파수 커널

def spectral_weight(model: KernelModel) -> np.ndarray:
    """격자 노드에서의 S(ω)"""
    omegas = model.grid.omegas
    if model.source_kind == SourceKind.BLENDED:
        return np.abs(pulse_spectrum(model.pulse, omegas)) ** 2
    return model.noise.duration * noise_spectrum(model.noise, omegas)


def mean_kernel(model: KernelModel, x, xp, c0: float = 1.0):
    """평균 커널 ⟨K⟩(x, x'), x 와 x' 는 브로드캐스트 가능한 (..., 3) 배열"""
    d = np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(xp, dtype=float), axis=-1)
    omegas = model.grid.omegas
    coeff = 2.0 * model.grid.weights * omegas ** 4 * spectral_weight(model) / (2 ** 5 * math.pi ** 3)
    values = np.tensordot(_sinc(np.multiply.outer(d, omegas) / c0) ** 2, coeff, axes=([-1], [0]))
    return float(values) if np.ndim(values) == 0 else values


def covariance_kernel(model: KernelModel, x, xp, xpp, c0: float = 1.0):
    """공분산 커널 Cov(x, x', x'').

    H1 = sinc(ω|x-x'|) sinc(ω|x-x''|) sinc(ω|x'-x''|), H2 = sinc²(ω|x-x'|) sinc²(ω|x-x''|)
    """
    x, xp, xpp = (np.asarray(v, dtype=float) for v in (x, xp, xpp))
    d1 = np.linalg.norm(x - xp, axis=-1)
    d2 = np.linalg.norm(x - xpp, axis=-1)
    d3 = np.linalg.norm(xp - xpp, axis=-1)
    omegas = model.grid.omegas
    if model.source_kind == SourceKind.BLENDED:
        power = np.abs(pulse_spectrum(model.pulse, omegas)) ** 4
        scale = 1.0 / (2.0 * math.pi * model.t_tau)
    else:
        power = noise_spectrum(model.noise, omegas) ** 2
        scale = model.noise.duration / (2.0 * math.pi)
    coeff = 2.0 * scale * model.grid.weights * omegas ** 8 * power
    s1 = _sinc(np.multiply.outer(d1, omegas) / c0)
    s2 = _sinc(np.multiply.outer(d2, omegas) / c0)
    s3 = _sinc(np.multiply.outer(d3, omegas) / c0)
    values = np.tensordot(s1 * s2 * s3 + s1 ** 2 * s2 ** 2, coeff, axes=([-1], [0]))
    return float(values) if np.ndim(values) == 0 else values


def mean_image(
    model: KernelModel,
    p: Perturbation,
    quad: QuadratureRule,
    points: np.ndarray,
    c0: float = 1.0,
    density: float = 1.0,
) -> np.ndarray:
    """연속체 평균 이미지 Σ_j q_j m_j ⟨K⟩(x, x_j) × density (= ρ_s ρ_r)"""
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    weighted = quad.weights * indicator(p, quad.nodes)
    omegas = model.grid.omegas
    coeff = 2.0 * model.grid.weights * omegas ** 4 * spectral_weight(model) / (2 ** 5 * math.pi ** 3)
    out = np.zeros(points.shape[0])
    for sl in node_chunks(quad.size, points.shape[0]):
        d = cdist(points, quad.nodes[sl])
        for omega, c in zip(omegas, coeff):
            out += c * (_sinc(omega * d / c0) ** 2 @ weighted[sl])
    return density * out


# ---------------------------------------------------------------- 공간 적분

def _resolved_rule(p: Perturbation, eta: float, quad_level: int, quad: Optional[QuadratureRule]) -> QuadratureRule:
    if eta <= 0:
        raise InvalidArgumentException(message=f"η 는 양수여야 합니다: {eta}", detail={"eta": eta})
    rule = quad if quad is not None else support_quadrature(p, quad_level, eta)
    limit = RESOLUTION_LIMIT_PER_ETA * eta
    if rule.max_spacing > limit:
        raise ResolutionException(
            message=f"구적 노드 간격 {rule.max_spacing:.3g} 이 η/3 = {limit:.3g} 보다 큽니다",
            detail={"max_spacing": rule.max_spacing, "eta": eta}
        )
    return rule


def _sinc_sums(rule: QuadratureRule, weighted: np.ndarray, points: np.ndarray, eta: float) -> np.ndarray:
    out = np.zeros(points.shape[0])
    for sl in node_chunks(rule.size, points.shape[0]):
        out += _sinc(cdist(points, rule.nodes[sl]) / eta) ** 2 @ weighted[sl]
    return out


def i1_integral(p: Perturbation, x, eta: float, quad_level: int = 2, quad: Optional[QuadratureRule] = None):
    """I1(x) = ∫_support m(y) sinc²(|x-y|/η) dy.

    Raises:
        ResolutionException: 구적 노드 간격 > η/3
    """
    rule = _resolved_rule(p, eta, quad_level, quad)
    points = np.asarray(x, dtype=float)
    values = _sinc_sums(rule, rule.weights * indicator(p, rule.nodes), points.reshape(-1, 3), eta)
    return float(values[0]) if points.ndim == 1 else values


def _sample_support(p: Perturbation, u: np.ndarray) -> np.ndarray:
    """단위 큐브 [0,1)³ 을 지지 영역 위 균일 분포로 사상"""
    eps = p.epsilon
    if p.kind == PerturbationKind.BALL:
        r = eps * np.cbrt(u[:, 0])
        cos_t = 2.0 * u[:, 1] - 1.0
        sin_t = np.sqrt(np.clip(1.0 - cos_t ** 2, 0.0, None))
        phi = 2.0 * math.pi * u[:, 2]
        pts = np.stack([r * sin_t * np.cos(phi), r * sin_t * np.sin(phi), r * cos_t], axis=1)
    elif p.kind == PerturbationKind.CYLINDER:
        rho = eps * np.sqrt(u[:, 0])
        phi = 2.0 * math.pi * u[:, 1]
        z = CYLINDER_HALF_LENGTH * (2.0 * u[:, 2] - 1.0)
        pts = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
    else:
        t = eps * (2.0 * u[:, 0] - 1.0)
        rho = DISC_RADIUS * np.sqrt(u[:, 1])
        phi = 2.0 * math.pi * u[:, 2]
        pts = np.stack([t, rho * np.cos(phi), rho * np.sin(phi)], axis=1)
    return pts + p.center_array


def _j1_product(rule: QuadratureRule, weighted: np.ndarray, points: np.ndarray, eta: float) -> np.ndarray:
    """J1 = aᵀ S a, a_j = q_j m_j sinc(|x-x_j|/η), S_jk = sinc(|x_j-x_k|/η)"""
    a = weighted[None, :] * _sinc(cdist(points, rule.nodes) / eta)
    out = np.zeros(points.shape[0])
    for sl in node_chunks(rule.size, rule.size):
        s_a = _sinc(cdist(rule.nodes[sl], rule.nodes) / eta) @ a.T
        out += np.sum(a[:, sl].T * s_a, axis=0)
    return out


def _j1_qmc(p: Perturbation, points: np.ndarray, eta: float, seed: int, log2_points: int):
    sampler = qmc.Sobol(d=6, scramble=True, seed=seed)
    u = sampler.random_base2(log2_points)
    y1 = _sample_support(p, u[:, :3])
    y2 = _sample_support(p, u[:, 3:])
    s12 = _sinc(np.linalg.norm(y1 - y2, axis=1) / eta)
    scale = (p.alpha * p.support_volume) ** 2
    half = s12.size // 2
    values, errors = np.empty(points.shape[0]), np.empty(points.shape[0])
    for i, x in enumerate(points):
        h1 = _sinc(np.linalg.norm(x - y1, axis=1) / eta) * _sinc(np.linalg.norm(x - y2, axis=1) / eta) * s12
        values[i] = scale * float(np.mean(h1))
        errors[i] = abs(values[i] - scale * float(np.mean(h1[:half])))
    return values, errors


def j1_values(
    p: Perturbation,
    points: np.ndarray,
    eta: float,
    quad_level: int = 2,
    seed: int = 0,
    log2_points: Optional[int] = None,
    quad: Optional[QuadratureRule] = None,
) -> Tuple[np.ndarray, np.ndarray, int]:
    """여러 평가점의 J1 값, 오차 추정, 사용한 점 개수.

    Ball 은 텐서곱 규칙의 이중합(오차 0 으로 보고), Cylinder/Disc 는 스크램블
    Sobol 6차원 준몬테카를로로 계산하고 |J_N - J_{N/2}| 를 오차로 보고합니다.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    if p.kind == PerturbationKind.BALL:
        rule = _resolved_rule(p, eta, quad_level, quad)
        values = _j1_product(rule, rule.weights * indicator(p, rule.nodes), points, eta)
        return values, np.zeros_like(values), rule.size
    log2 = log2_points or settings.QMC_LOG2_POINTS
    values, errors = _j1_qmc(p, points, eta, seed, log2)
    return values, errors, 2 ** log2


def j1_integral(
    p: Perturbation,
    x,
    eta: float,
    quad_level: int = 2,
    seed: int = 0,
    log2_points: Optional[int] = None,
    quad: Optional[QuadratureRule] = None,
) -> QmcEstimate:
    """J1(x) = ∬ m(x')m(x'') H1 dx' dx'' (단일 평가점)"""
    values, errors, n = j1_values(p, np.asarray(x, dtype=float)[None, :], eta, quad_level, seed, log2_points, quad)
    return QmcEstimate(value=float(values[0]), error=float(errors[0]), n_points=n)


def i2_integral(
    p: Perturbation,
    x,
    eta: float,
    quad_level: int = 2,
    seed: int = 0,
    log2_points: Optional[int] = None,
):
    """(J1(x), J2(x)) 반환, J2 = I1(x)² (같은 구적 규칙으로 분리 계산).

    x 가 (m, 3) 이면 길이 m 배열 두 개를 반환합니다.

    Raises:
        ResolutionException: 구적 노드 간격 > η/3
    """
    rule = _resolved_rule(p, eta, quad_level, None)
    points = np.asarray(x, dtype=float)
    j2 = np.asarray(i1_integral(p, points.reshape(-1, 3), eta, quad=rule)) ** 2
    j1, _, _ = j1_values(p, points, eta, quad_level, seed, log2_points, quad=rule)
    if points.ndim == 1:
        return float(j1[0]), float(j2[0])
    return j1, j2


# ---------------------------------------------------------------- 닫힌 형태 / 점근식

def ball_center_i1(epsilon: float, eta: float) -> float:
    """Ball 중심 I1 닫힌 형태 2πη²(ε - (η/2) sin(2ε/η))"""
    return 2.0 * math.pi * eta ** 2 * (epsilon - 0.5 * eta * math.sin(2.0 * epsilon / eta))


def cylinder_center_i1(epsilon: float, eta: float) -> float:
    """ε ≪ η 에서 Cylinder 중심 I1 ≈ 2πε²η (Si(2/η) - η sin²(1/η))"""
    si, _ = sici(2.0 / eta)
    return 2.0 * math.pi * epsilon ** 2 * eta * (float(si) - eta * math.sin(1.0 / eta) ** 2)


def disc_center_i1(epsilon: float, eta: float) -> float:
    """ε ≪ η 에서 Disc 중심 I1 ≈ 2πεη² (γ + ln(2/η) - Ci(2/η))"""
    _, ci = sici(2.0 / eta)
    return 2.0 * math.pi * epsilon * eta ** 2 * (np.euler_gamma + math.log(2.0 / eta) - float(ci))


def predicted_orders(kind: PerturbationKind, location: Location, source_kind: SourceKind) -> AsymptoticPrediction:
    """(형태, 위치, 소스) 의 평균/표준편차 차수.

    stationary 는 blended 표에서 시간 지수만 (T, √T) 로 바꿉니다.
    """
    (mean_mono, mean_rel), (std_mono, std_rel) = BLENDED_ORDER_TABLE[(kind, location)]
    if source_kind == SourceKind.STATIONARY:
        mean_t, std_t = STATIONARY_TIME_EXPONENTS
        mean_mono = (*mean_mono[:3], mean_t)
        std_mono = (*std_mono[:3], std_t)
    return AsymptoticPrediction(
        kind=kind,
        location=location,
        source_kind=source_kind,
        mean=OrderTerm(monomial=mean_mono, relation=mean_rel),
        std=OrderTerm(monomial=std_mono, relation=std_rel),
    )
