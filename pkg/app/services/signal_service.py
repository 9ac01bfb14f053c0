"""소스 신호 모델 서비스.

펄스 스펙트럼, 지연 분포, 정상 노이즈 스펙트럼, 주파수 격자와
시간-주파수 변환(DFT 정렬 격자)을 담당합니다.

푸리에 규약: f̂(ω) = ∫ f(t) e^{iωt} dt, 시간축 t_n = -T/2 + n·dt.
"""

import math
from typing import Optional, Tuple, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad, trapezoid

from app.core.constants.imaging import (
    BAND_HALF_WIDTH,
    DEFAULT_FREQUENCY_NODES,
    GridKind,
    SourceKind,
)
from app.core.exceptions import InvalidArgumentException
from app.core.logger import get_logger
from app.schemas.signal_schemas import (
    DelayModel,
    FrequencyGrid,
    PulseSpec,
    SourceModel,
    StationaryNoiseModel,
)


logger = get_logger()

SeedLike = Union[int, np.random.Generator]

# 정상 노이즈 합성 시 가우시안 대역을 자르는 폭 (b 배수)
NOISE_BAND_HALF_WIDTH = 5.0


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# ---------------------------------------------------------------- 펄스 / 지연

def pulse_spectrum(p: PulseSpec, omega) -> np.ndarray:
    """가우시안 변조 코사인 펄스의 스펙트럼 f̂(ω).

    f(t) = cos(ω0 t)·exp(-b²t²/2) 이므로 f̂ 는 ±ω0 중심 가우시안 두 개의 합이며
    실수, 짝함수입니다 (f̂(-ω) = conj f̂(ω)).
    """
    omega = np.asarray(omega, dtype=float)
    scale = math.sqrt(2.0 * math.pi) / (2.0 * p.bandwidth)
    spec = scale * (
        np.exp(-((omega - p.omega0) ** 2) / (2.0 * p.bandwidth ** 2))
        + np.exp(-((omega + p.omega0) ** 2) / (2.0 * p.bandwidth ** 2))
    )
    return spec.astype(complex)


def pulse_waveform(p: PulseSpec, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return np.cos(p.omega0 * t) * np.exp(-0.5 * (p.bandwidth * t) ** 2)


def _tabulated(d: DelayModel) -> Tuple[np.ndarray, np.ndarray]:
    return np.asarray(d.times, dtype=float), np.asarray(d.density, dtype=float)


def delay_pdf(d: DelayModel, t) -> np.ndarray:
    """지연 확률 밀도 p_τ(t)"""
    t = np.asarray(t, dtype=float)
    if d.law == "uniform":
        return np.where(np.abs(t) <= d.tau_max, 0.5 / d.tau_max, 0.0)
    if d.law == "triangular":
        a = d.tau_max
        return np.clip(1.0 - np.abs(t) / a, 0.0, None) / a
    times, density = _tabulated(d)
    return np.interp(t, times, density, left=0.0, right=0.0)


def t_tau(d: DelayModel) -> float:
    """지연 분포 시간 스케일 T_τ = 1 / ∫ p_τ² dt.

    Raises:
        InvalidArgumentException: ∫ p_τ² = 0
    """
    if d.law == "uniform":
        return 2.0 * d.tau_max
    if d.law == "triangular":
        return 1.5 * d.tau_max
    times, density = _tabulated(d)
    energy = float(trapezoid(density ** 2, times))
    if energy <= 0:
        raise InvalidArgumentException(
            message="지연 분포의 ∫p² 가 0 입니다",
            detail={"law": d.law}
        )
    return 1.0 / energy


def delay_characteristic(d: DelayModel, omega) -> np.ndarray:
    """특성 함수 φ(ω) = E[e^{iωτ}] (대칭 분포는 실수)"""
    omega = np.asarray(omega, dtype=float)
    if d.law == "uniform":
        return np.sinc(omega * d.tau_max / math.pi).astype(complex)
    if d.law == "triangular":
        return (np.sinc(omega * d.tau_max / (2.0 * math.pi)) ** 2).astype(complex)
    times, density = _tabulated(d)
    phase = np.exp(1j * np.multiply.outer(omega, times))
    return trapezoid(density * phase, times, axis=-1)


def sample_delays(d: DelayModel, n_sources: int, seed: SeedLike) -> np.ndarray:
    """소스별 독립 지연 τ_s 샘플"""
    rng = _rng(seed)
    if d.law == "uniform":
        return rng.uniform(-d.tau_max, d.tau_max, n_sources)
    if d.law == "triangular":
        return rng.triangular(-d.tau_max, 0.0, d.tau_max, n_sources)
    times, density = _tabulated(d)
    cdf = cumulative_trapezoid(density, times, initial=0.0)
    cdf /= cdf[-1]
    keep = np.concatenate([[True], np.diff(cdf) > 0])
    return np.interp(rng.uniform(0.0, 1.0, n_sources), cdf[keep], times[keep])


def blended_source_spectrum(p: PulseSpec, tau, omega) -> np.ndarray:
    """지연 τ 펄스의 스펙트럼 n̂(ω) = f̂(ω) e^{iωτ}

    tau 가 배열이면 (len(tau), len(omega)) 형상으로 소스별 스펙트럼을 돌려줍니다.
    """
    omega = np.asarray(omega, dtype=float)
    return pulse_spectrum(p, omega) * np.exp(1j * np.multiply.outer(np.asarray(tau, dtype=float), omega))


# ---------------------------------------------------------------- 정상 노이즈

def noise_spectrum(m: StationaryNoiseModel, omega) -> np.ndarray:
    """파워 스펙트럼 F̂(ω) (짝함수)"""
    w = np.abs(np.asarray(omega, dtype=float))
    if m.shape == "gaussian_band":
        return np.exp(-((w - m.omega0) ** 2) / m.bandwidth ** 2)
    if m.shape == "flat_band":
        half = 0.5 * math.sqrt(math.pi) * m.bandwidth
        return np.where(np.abs(w - m.omega0) <= half, 1.0, 0.0)
    return np.interp(w, np.asarray(m.omegas, dtype=float), np.asarray(m.values, dtype=float), left=0.0, right=0.0)


def noise_band(m: StationaryNoiseModel) -> Tuple[float, float]:
    """노이즈 스펙트럼이 사실상 0 이 아닌 양의 주파수 구간"""
    if m.shape == "tabulated":
        return float(min(m.omegas)), float(max(m.omegas))
    half = NOISE_BAND_HALF_WIDTH * m.bandwidth
    return max(m.omega0 - half, 0.0), m.omega0 + half


def noise_autocorrelation(m: StationaryNoiseModel, t: float = 0.0) -> float:
    """자기상관 F(t) = (1/π) ∫_0^∞ F̂(ω) cos(ωt) dω"""
    lo, hi = noise_band(m)
    value, _ = quad(lambda w: float(noise_spectrum(m, w)) * math.cos(w * t), lo, hi, limit=400)
    return value / math.pi


def draw_stationary_spectra(
    m: StationaryNoiseModel, grid: FrequencyGrid, n_sources: int, seed: SeedLike
) -> np.ndarray:
    """DFT 격자 위 독립 복소 가우시안 n̂ ~ CN(0, T·F̂(ω_k)).

    Raises:
        InvalidArgumentException: DFT 격자가 아니거나 F̂ < 0
    """
    _require_dft(grid)
    spectrum = noise_spectrum(m, grid.omegas)
    if np.any(spectrum < 0):
        raise InvalidArgumentException(
            message="파워 스펙트럼 F̂ 가 음수인 주파수가 있습니다",
            detail={"min": float(spectrum.min())}
        )
    rng = _rng(seed)
    scale = np.sqrt(grid.period * spectrum / 2.0)
    z = rng.standard_normal((n_sources, grid.size)) + 1j * rng.standard_normal((n_sources, grid.size))
    return z * scale[None, :]


def synthesize_stationary(m: StationaryNoiseModel, dt: float, seed: SeedLike, n_sources: int = 1) -> np.ndarray:
    """길이 T 의 정상 노이즈 시계열 (n_sources, N) 합성.

    Raises:
        InvalidArgumentException: dt 가 스펙트럼을 해상하지 못하거나 F̂ < 0
    """
    lo, hi = noise_band(m)
    if hi >= math.pi / dt:
        raise InvalidArgumentException(
            message=f"dt={dt} 가 노이즈 스펙트럼 상한 {hi:.4g} 를 해상하지 못합니다 (Nyquist {math.pi / dt:.4g})",
            detail={"dt": dt, "band_max": hi}
        )
    grid = dft_grid(lo, hi, m.duration)
    spectra = draw_stationary_spectra(m, grid, n_sources, seed)
    return spectrum_to_traces(spectra, grid, dt)


# ---------------------------------------------------------------- 주파수 격자

def _check_band(omega0: float, bandwidth: float) -> Tuple[float, float]:
    lo = omega0 - BAND_HALF_WIDTH * bandwidth
    hi = omega0 + BAND_HALF_WIDTH * bandwidth
    if lo <= 0:
        raise InvalidArgumentException(
            message=f"주파수 대역 [{lo:.4g}, {hi:.4g}] 가 양수 영역을 벗어납니다",
            detail={"omega0": omega0, "bandwidth": bandwidth}
        )
    return lo, hi


def gauss_legendre_grid(omega0: float, bandwidth: float, n_nodes: int = DEFAULT_FREQUENCY_NODES) -> FrequencyGrid:
    """[ω0-3b, ω0+3b] 위 Gauss-Legendre 주파수 격자"""
    lo, hi = _check_band(omega0, bandwidth)
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    return FrequencyGrid(
        kind=GridKind.GAUSS_LEGENDRE,
        omegas=0.5 * (hi - lo) * x + 0.5 * (hi + lo),
        weights=0.5 * (hi - lo) * w,
    )


def dft_grid(lo: float, hi: float, period: float) -> FrequencyGrid:
    """기록 시간 period 의 DFT 주파수 ω_k = 2πk/T 중 [lo, hi] 안의 bin.

    Raises:
        InvalidArgumentException: 구간 안에 bin 이 없음
    """
    step = 2.0 * math.pi / period
    k_lo = max(1, int(math.ceil(lo / step)))
    k_hi = int(math.floor(hi / step))
    if k_hi < k_lo:
        raise InvalidArgumentException(
            message=f"주파수 구간 [{lo:.4g}, {hi:.4g}] 에 DFT bin 이 없습니다 (T={period})",
            detail={"lo": lo, "hi": hi, "period": period}
        )
    k = np.arange(k_lo, k_hi + 1)
    return FrequencyGrid(
        kind=GridKind.DFT,
        omegas=step * k,
        weights=np.full(k.size, step),
        period=period,
    )


def pulse_dft_grid(omega0: float, bandwidth: float, period: float) -> FrequencyGrid:
    lo, hi = _check_band(omega0, bandwidth)
    return dft_grid(lo, hi, period)


def band_limits(model: SourceModel) -> Tuple[float, float]:
    if model.kind == SourceKind.BLENDED:
        return _check_band(model.pulse.omega0, model.pulse.bandwidth)
    return noise_band(model.noise)


# ---------------------------------------------------------------- 소스 앙상블

def draw_source_spectra(model: SourceModel, grid: FrequencyGrid, n_sources: int, seed: SeedLike) -> np.ndarray:
    """한 실현의 소스 스펙트럼 (n_sources, n_frequencies)"""
    if model.kind == SourceKind.BLENDED:
        return blended_source_spectrum(model.pulse, sample_delays(model.delays, n_sources, seed), grid.omegas)
    return draw_stationary_spectra(model.noise, grid, n_sources, seed)


def source_second_moment(model: SourceModel, grid: FrequencyGrid) -> Tuple[np.ndarray, np.ndarray]:
    """E[n̂_s(ω) conj n̂_s'(ω)] = diag·δ_ss' + coherent 의 (diag, coherent) 계수"""
    if model.kind == SourceKind.BLENDED:
        power = np.abs(pulse_spectrum(model.pulse, grid.omegas)) ** 2
        phi2 = np.abs(delay_characteristic(model.delays, grid.omegas)) ** 2
        return power * (1.0 - phi2), power * phi2
    if grid.period is None:
        raise InvalidArgumentException(message="stationary 기댓값에는 DFT 격자가 필요합니다")
    return grid.period * noise_spectrum(model.noise, grid.omegas), np.zeros(grid.size)


# ---------------------------------------------------------------- 시간 영역 변환

def _require_dft(grid: FrequencyGrid, period: Optional[float] = None) -> np.ndarray:
    """DFT 정렬 격자 확인 후 bin 번호 반환"""
    if grid.kind != GridKind.DFT or grid.period is None:
        raise InvalidArgumentException(
            message="시간 영역 변환에는 DFT 정렬 주파수 격자가 필요합니다",
            detail={"kind": grid.kind.value}
        )
    if period is not None and abs(period - grid.period) > 1e-9 * grid.period:
        raise InvalidArgumentException(
            message=f"기록 시간 T={period} 가 격자 주기 {grid.period} 와 다릅니다",
            detail={"period": period, "grid_period": grid.period}
        )
    bins = grid.omegas * grid.period / (2.0 * math.pi)
    k = np.rint(bins).astype(int)
    if np.max(np.abs(bins - k)) > 1e-6:
        raise InvalidArgumentException(message="주파수 노드가 DFT bin 에 정렬되어 있지 않습니다")
    return k


def time_axis(period: float, dt: float) -> Tuple[np.ndarray, float]:
    """샘플 수 N = ceil(T/dt), 실제 간격 T/N 의 시간축 t_n = -T/2 + n·dt"""
    n = int(math.ceil(period / dt - 1e-9))
    step = period / n
    return -0.5 * period + step * np.arange(n), step


def spectrum_to_traces(values: np.ndarray, grid: FrequencyGrid, dt: float, period: Optional[float] = None) -> np.ndarray:
    """양의 주파수 스펙트럼을 실수 시계열로 역변환.

    d(t_n) = (1/π) Re Σ_k Δω d̂_k e^{-iω_k t_n}

    Raises:
        InvalidArgumentException: DFT 격자가 아니거나 대역이 Nyquist 이상
    """
    k = _require_dft(grid, period)
    _, step = time_axis(grid.period, dt)
    n = int(round(grid.period / step))
    if k.max() >= n / 2:
        raise InvalidArgumentException(
            message=f"dt={dt} 의 Nyquist 주파수가 대역 상한 {grid.omegas[-1]:.4g} 보다 작습니다",
            detail={"dt": dt, "band_max": float(grid.omegas[-1])}
        )
    values = np.atleast_2d(values)
    spectrum = np.zeros((values.shape[0], n // 2 + 1), dtype=complex)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    spectrum[:, k] = np.conj(values) * sign
    return np.fft.irfft(spectrum, n=n, axis=-1) / step


def traces_to_spectrum(traces: np.ndarray, grid: FrequencyGrid, dt: float) -> np.ndarray:
    """실수 시계열을 격자 주파수의 스펙트럼으로 변환 (spectrum_to_traces 의 역)"""
    k = _require_dft(grid)
    traces = np.atleast_2d(traces)
    step = grid.period / traces.shape[-1]
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    return step * sign * np.conj(np.fft.rfft(traces, axis=-1)[:, k])


def spectral_second_derivative(traces: np.ndarray, dt: float) -> np.ndarray:
    """주기 시계열의 시간 2차 미분 (FFT 곱 -ω²)"""
    n = traces.shape[-1]
    spectrum = np.fft.rfft(traces, axis=-1)
    freqs = 2.0 * math.pi * np.fft.rfftfreq(n, d=dt)
    return np.fft.irfft(spectrum * -(freqs ** 2), n=n, axis=-1)
