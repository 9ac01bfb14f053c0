import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.integrate import trapezoid

from app.core.constants.imaging import GridKind
from app.core.exceptions import InvalidArgumentException
from app.schemas.signal_schemas import DelayModel, PulseSpec, StationaryNoiseModel
from app.services.signal_service import (
    blended_source_spectrum,
    dft_grid,
    delay_characteristic,
    delay_pdf,
    draw_stationary_spectra,
    gauss_legendre_grid,
    noise_autocorrelation,
    noise_band,
    noise_spectrum,
    pulse_spectrum,
    pulse_waveform,
    sample_delays,
    spectral_second_derivative,
    spectrum_to_traces,
    synthesize_stationary,
    t_tau,
    time_axis,
    traces_to_spectrum,
)


def _table(a: float, shape, n: int = 4001) -> DelayModel:
    times = np.linspace(-a, a, n)
    density = shape(times / a)
    density /= trapezoid(density, times)
    return DelayModel(law="tabulated", times=times.tolist(), density=density.tolist())


def _triangular_table(a: float, n: int = 4001) -> DelayModel:
    return _table(a, lambda u: np.clip(1.0 - np.abs(u), 0.0, None), n)


def test_pulse_spectrum_matches_numerical_transform():
    p = PulseSpec(omega0=10.0, bandwidth=2.0)
    t = np.linspace(-12.0, 12.0, 48001)
    f = pulse_waveform(p, t)
    for omega in (6.0, 10.0, 13.5):
        numeric = trapezoid(f * np.exp(1j * omega * t), t)
        assert complex(pulse_spectrum(p, omega)) == pytest.approx(numeric, abs=1e-8)


def test_pulse_requires_band_below_carrier():
    with pytest.raises(ValidationError):
        PulseSpec(omega0=2.0, bandwidth=3.0)


def test_delay_time_scales():
    assert t_tau(DelayModel(law="uniform", tau_max=3.0)) == 6.0
    assert t_tau(DelayModel(law="triangular", tau_max=3.0)) == 4.5
    assert t_tau(_triangular_table(3.0)) == pytest.approx(4.5, rel=1e-4)


@pytest.mark.parametrize("tau_max", [0.5, 1.0, 3.0])
def test_uniform_delays_have_largest_time_scale(tau_max):
    uniform = t_tau(DelayModel(law="uniform", tau_max=tau_max))
    others = [
        t_tau(DelayModel(law="triangular", tau_max=tau_max)),
        t_tau(_triangular_table(tau_max)),
        t_tau(_table(tau_max, lambda u: 1.0 + np.cos(math.pi * u))),
    ]
    assert all(uniform > other for other in others)
    # 올림 코사인 밀도 T_τ = 4a/3
    assert others[2] == pytest.approx(4.0 * tau_max / 3.0, rel=1e-4)


def test_delay_pdf_integrates_to_one():
    t = np.linspace(-5.0, 5.0, 20001)
    for model in (DelayModel(law="uniform", tau_max=2.0), DelayModel(law="triangular", tau_max=2.0)):
        assert trapezoid(delay_pdf(model, t), t) == pytest.approx(1.0, abs=1e-3)


def test_tabulated_characteristic_matches_closed_form():
    omegas = np.linspace(0.0, 12.0, 25)
    closed = delay_characteristic(DelayModel(law="triangular", tau_max=1.5), omegas)
    table = delay_characteristic(_triangular_table(1.5), omegas)
    np.testing.assert_allclose(table, closed, atol=1e-5)
    assert delay_characteristic(DelayModel(law="uniform", tau_max=2.0), 0.0) == pytest.approx(1.0)


def test_tabulated_delay_needs_zero_mean():
    times = np.linspace(0.0, 2.0, 101)
    density = np.full_like(times, 0.5)
    with pytest.raises(ValidationError):
        DelayModel(law="tabulated", times=times.tolist(), density=density.tolist())


@pytest.mark.parametrize("law", ["uniform", "triangular"])
def test_sample_delays_deterministic_and_bounded(law):
    model = DelayModel(law=law, tau_max=2.0)
    a = sample_delays(model, 500, seed=11)
    b = sample_delays(model, 500, seed=11)
    np.testing.assert_array_equal(a, b)
    assert np.all(np.abs(a) <= 2.0)
    assert abs(a.mean()) < 0.2


@pytest.mark.parametrize("law,variance", [("uniform", 4.0 / 3.0), ("triangular", 4.0 / 6.0)])
def test_sample_delays_mean_within_three_sigma(law, variance):
    n = 100_000
    draws = sample_delays(DelayModel(law=law, tau_max=2.0), n, seed=23)
    assert abs(draws.mean()) < 3.0 * math.sqrt(variance / n)
    assert draws.var() == pytest.approx(variance, rel=0.02)


def test_tabulated_sampling_follows_density():
    draws = sample_delays(_triangular_table(1.0), 20000, seed=5)
    assert np.all(np.abs(draws) <= 1.0)
    # 삼각 분포 분산 a²/6
    assert draws.var() == pytest.approx(1.0 / 6.0, rel=0.05)


def test_gauss_legendre_grid_covers_band():
    grid = gauss_legendre_grid(10.0, 2.0, 33)
    assert grid.kind == GridKind.GAUSS_LEGENDRE
    assert grid.size == 33
    assert grid.omegas[0] > 4.0 and grid.omegas[-1] < 16.0
    assert np.sum(grid.weights) == pytest.approx(12.0)
    assert np.sum(grid.weights * grid.omegas ** 4) == pytest.approx((16.0 ** 5 - 4.0 ** 5) / 5.0)


def test_band_must_stay_positive():
    with pytest.raises(InvalidArgumentException):
        gauss_legendre_grid(5.0, 2.0)


def test_dft_grid_bins():
    grid = dft_grid(4.0, 16.0, 20.0)
    step = 2.0 * math.pi / 20.0
    np.testing.assert_allclose(grid.omegas / step, np.rint(grid.omegas / step), atol=1e-12)
    np.testing.assert_allclose(grid.weights, step)
    assert grid.omegas[0] >= 4.0 and grid.omegas[-1] <= 16.0
    with pytest.raises(InvalidArgumentException):
        dft_grid(1.0, 1.1, 2.0)


def test_time_axis_contains_zero():
    t, dt = time_axis(10.0, 0.3)
    assert t.size == math.ceil(10.0 / 0.3)
    assert dt == pytest.approx(10.0 / t.size)
    assert t[0] == -5.0
    assert np.min(np.abs(t)) < 1e-12


def test_spectrum_to_traces_recovers_pulse():
    p = PulseSpec(omega0=10.0, bandwidth=2.0)
    grid = dft_grid(0.1, 24.0, 40.0)
    dt = math.pi / (4.0 * 24.0)
    traces = spectrum_to_traces(pulse_spectrum(p, grid.omegas)[None, :], grid, dt)
    t, _ = time_axis(40.0, dt)
    np.testing.assert_allclose(traces[0], pulse_waveform(p, t), atol=1e-4)


def test_traces_to_spectrum_inverts_synthesis():
    grid = dft_grid(3.0, 9.0, 16.0)
    rng = np.random.default_rng(0)
    values = rng.standard_normal((3, grid.size)) + 1j * rng.standard_normal((3, grid.size))
    dt = math.pi / (3.0 * 9.0)
    back = traces_to_spectrum(spectrum_to_traces(values, grid, dt), grid, dt)
    np.testing.assert_allclose(back, values, rtol=1e-10, atol=1e-12)


def test_traces_require_nyquist_and_dft_grid():
    grid = dft_grid(3.0, 9.0, 16.0)
    with pytest.raises(InvalidArgumentException):
        spectrum_to_traces(np.ones((1, grid.size)), grid, dt=0.5)
    with pytest.raises(InvalidArgumentException):
        spectrum_to_traces(np.ones((1, 33)), gauss_legendre_grid(10.0, 2.0), dt=0.01)
    with pytest.raises(InvalidArgumentException):
        spectrum_to_traces(np.ones((1, grid.size)), grid, dt=0.05, period=17.0)


def test_spectral_second_derivative_of_sinusoid():
    n, dt = 256, 0.05
    t = dt * np.arange(n)
    omega = 2.0 * math.pi * 7 / (n * dt)
    x = np.sin(omega * t)[None, :]
    np.testing.assert_allclose(spectral_second_derivative(x, dt), -(omega ** 2) * x, atol=1e-9)


def test_stationary_spectra_power():
    m = StationaryNoiseModel(omega0=10.0, bandwidth=2.0, duration=50.0)
    grid = dft_grid(6.0, 14.0, 50.0)
    draws = draw_stationary_spectra(m, grid, 4000, seed=1)
    expected = 50.0 * np.exp(-((grid.omegas - 10.0) ** 2) / 4.0)
    np.testing.assert_allclose(np.mean(np.abs(draws) ** 2, axis=0), expected, rtol=0.1)


def test_noise_autocorrelation_at_zero_lag():
    m = StationaryNoiseModel(omega0=10.0, bandwidth=2.0, duration=10.0)
    assert noise_autocorrelation(m, 0.0) == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-6)


def test_synthesized_noise_variance():
    m = StationaryNoiseModel(omega0=10.0, bandwidth=1.5, duration=200.0)
    traces = synthesize_stationary(m, dt=0.1, seed=2, n_sources=50)
    assert traces.shape == (50, 2000)
    assert np.var(traces) == pytest.approx(noise_autocorrelation(m, 0.0), rel=0.1)
    with pytest.raises(InvalidArgumentException):
        synthesize_stationary(m, dt=0.5, seed=2)


def test_synthesized_periodogram_matches_spectrum():
    m = StationaryNoiseModel(omega0=10.0, bandwidth=2.0, duration=40.0)
    dt = 0.1
    traces = synthesize_stationary(m, dt=dt, seed=8, n_sources=2000)
    grid = dft_grid(*noise_band(m), m.duration)
    periodogram = np.mean(np.abs(traces_to_spectrum(traces, grid, dt)) ** 2, axis=0) / m.duration
    expected = noise_spectrum(m, grid.omegas)
    band = expected > 0.1 * expected.max()
    assert band.sum() > 20
    np.testing.assert_allclose(periodogram[band], expected[band], rtol=0.1)


def test_synthesized_sources_are_uncorrelated():
    m = StationaryNoiseModel(omega0=10.0, bandwidth=2.0, duration=40.0)
    traces = synthesize_stationary(m, dt=0.1, seed=9, n_sources=2000)
    # 짝지은 서로 다른 소스의 zero-lag 상관
    cross = np.sum(traces[0::2] * traces[1::2], axis=1)
    error = cross.std(ddof=1) / math.sqrt(cross.size)
    assert abs(cross.mean()) < 3.0 * error
    auto = np.mean(np.sum(traces ** 2, axis=1))
    assert abs(cross.mean()) < 0.05 * auto


def test_tabulated_noise_spectrum_validation():
    base = {"shape": "tabulated", "omega0": 10.0, "bandwidth": 2.0, "duration": 10.0}
    StationaryNoiseModel(**base, omegas=[8.0, 10.0, 12.0], values=[0.5, 1.0, 0.5])
    with pytest.raises(ValidationError, match="순증가"):
        StationaryNoiseModel(**base, omegas=[8.0, 12.0, 10.0], values=[0.5, 1.0, 0.5])
    with pytest.raises(ValidationError, match="순증가"):
        StationaryNoiseModel(**base, omegas=[8.0, 8.0, 12.0], values=[0.5, 1.0, 0.5])
    with pytest.raises(ValidationError, match="음수"):
        StationaryNoiseModel(**base, omegas=[8.0, 10.0, 12.0], values=[0.5, -1.0, 0.5])
    with pytest.raises(ValidationError):
        StationaryNoiseModel(**base, omegas=[8.0, 10.0], values=[0.5, 1.0, 0.5])


def test_flat_band_shape():
    m = StationaryNoiseModel(shape="flat_band", omega0=10.0, bandwidth=2.0, duration=10.0)
    # 평탄 대역 폭은 가우시안과 같은 ∫F̂ 를 주도록 √π·b
    assert noise_autocorrelation(m, 0.0) == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-3)


def test_blended_source_spectrum_phase():
    pulse = PulseSpec(omega0=10.0, bandwidth=2.0)
    omega = np.array([8.0, 10.0, 12.0])
    np.testing.assert_allclose(blended_source_spectrum(pulse, 0.0, omega), pulse_spectrum(pulse, omega))
    shifted = blended_source_spectrum(pulse, 0.3, omega)
    np.testing.assert_allclose(np.abs(shifted), np.abs(pulse_spectrum(pulse, omega)))
    full_period = blended_source_spectrum(pulse, 2.0 * np.pi / 10.0, np.array([10.0]))
    np.testing.assert_allclose(full_period, pulse_spectrum(pulse, np.array([10.0])), rtol=1e-12)
    assert blended_source_spectrum(pulse, np.array([0.0, 0.1, 0.2]), omega).shape == (3, 3)
