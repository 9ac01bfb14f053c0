"""이미징 시뮬레이션 관련 상수 및 타입"""

from enum import Enum
from typing import Dict, Tuple


class PerturbationKind(str, Enum):
    """속도 섭동 지지 영역 형태"""
    BALL = "Ball"           # 점 섭동: B_ε
    CYLINDER = "Cylinder"   # 선 섭동: B_ε × [-1, 1]
    DISC = "Disc"           # 면 섭동: [-ε, ε] × B_1


class SourceKind(str, Enum):
    """소스 모델 구분"""
    BLENDED = "blended"         # 랜덤 지연 펄스
    STATIONARY = "stationary"   # 정상 가우시안 노이즈


class Location(str, Enum):
    """평가 위치 구분"""
    CENTER = "center"
    FAR = "far"


class Relation(str, Enum):
    """차수 관계"""
    ASYMPTOTIC = "≃"
    UPPER_BOUND = "≲"


class ImagingMethod(str, Enum):
    """이미징 경로"""
    SPECTRAL = "spectral"
    CORRELATION = "correlation"


class GridKind(str, Enum):
    """주파수 그리드 종류"""
    GAUSS_LEGENDRE = "gauss_legendre"
    DFT = "dft"


# 지지 영역 고정 치수
CYLINDER_HALF_LENGTH: float = 1.0
DISC_RADIUS: float = 1.0

# 어레이/지지 영역 크기 비율 (10·지름 ≤ R)
SUPPORT_TO_RADIUS_FACTOR: float = 10.0

# 센서와 평가점 최소 거리 (R 대비)
MIN_SENSOR_DISTANCE_RATIO: float = 1e-6

# 주파수 대역: [ω0 - 3b, ω0 + 3b], 기본 33 노드
BAND_HALF_WIDTH: float = 3.0
DEFAULT_FREQUENCY_NODES: int = 33

# 구적법: 파장 η 당 노드 수, 해상도 한계 (η/3)
NODES_PER_ETA: float = 6.0
RESOLUTION_LIMIT_PER_ETA: float = 1.0 / 3.0

# 원거리 평가점: |x| = 0.5, 8 방향, 반경 5 개 (한 주기 πη 스캔)
FAR_RADIUS: float = 0.5
FAR_DIRECTIONS: int = 8
FAR_RADIAL_SAMPLES: int = 5

# 상관 경로 band-limited 보간 (Kaiser windowed sinc)
# β 는 대역 가장자리와 Nyquist 사이 여유로부터 Kaiser 설계식으로 정한다
INTERP_HALF_WIDTH: int = 8
INTERP_MAX_ATTENUATION_DB: float = 300.0
DEFAULT_OVERSAMPLING: float = 4.0

# 스케일링 피팅 허용 오차
SPATIAL_SLOPE_TOLERANCE: float = 0.3
FLUCTUATION_SLOPE_TOLERANCE: float = 0.15
MIN_FIT_SAMPLES: int = 4
MIN_FIT_SPAN: float = 8.0

# 안정성 리포트 기준: 측정 비율 ≥ 0.5 · 예측 차수
STABILITY_RATIO_FACTOR: float = 0.5


# 차수 단항식: (ε 지수, η 지수, |ln ε| 지수, 시간 지수)
# 시간 지수는 blended 이면 T_τ, stationary 이면 T
Monomial = Tuple[float, float, float, float]

# 평균/표준편차 차수 표 (ε ≪ η ≪ 1)
# key: (kind, location) -> ((mean 단항식, 관계), (std 단항식, 관계))
BLENDED_ORDER_TABLE: Dict[Tuple[PerturbationKind, Location], Tuple[Tuple[Monomial, Relation], Tuple[Monomial, Relation]]] = {
    (PerturbationKind.BALL, Location.CENTER): (((3, 0, 0, 0), Relation.ASYMPTOTIC), ((3, 0, 0, -0.5), Relation.ASYMPTOTIC)),
    (PerturbationKind.BALL, Location.FAR): (((3, 2, 0, 0), Relation.UPPER_BOUND), ((3, 1, 0, -0.5), Relation.UPPER_BOUND)),
    (PerturbationKind.CYLINDER, Location.CENTER): (((1, 2, 0, 0), Relation.ASYMPTOTIC), ((1, 2, 0, -0.5), Relation.ASYMPTOTIC)),
    (PerturbationKind.CYLINDER, Location.FAR): (((2, 2, 0, 0), Relation.UPPER_BOUND), ((2, 1, 0, -0.5), Relation.UPPER_BOUND)),
    (PerturbationKind.DISC, Location.CENTER): (((1, 2, 1, 0), Relation.ASYMPTOTIC), ((1, 2, 1, -0.5), Relation.ASYMPTOTIC)),
    (PerturbationKind.DISC, Location.FAR): (((1, 2, 0, 0), Relation.UPPER_BOUND), ((1, 2, 0, -0.5), Relation.UPPER_BOUND)),
}

# stationary: 평균은 T 배, 표준편차는 1/√T_τ 대신 √T
STATIONARY_TIME_EXPONENTS: Tuple[float, float] = (1.0, 0.5)
