import math

import numpy as np
import pytest

from app.core.exceptions import InvalidArgumentException, SingularEvaluationException
from app.services.geometry_service import build_sphere_array
from app.services.greens_service import green_hat, green_matrix, hk_identity_check, imag_green, sinc_kernel


def test_green_hat_value():
    g = green_hat(3.0, [0.0, 0.0, 0.0], [0.0, 2.0, 0.0])
    assert g == pytest.approx(np.exp(6j) / (8.0 * math.pi))
    assert green_hat(3.0, [1.0, 0.0, 0.0], [0.0, 0.0, 0.0], c0=2.0) == pytest.approx(
        np.exp(1.5j) / (4.0 * math.pi)
    )


def test_green_hat_singular():
    with pytest.raises(SingularEvaluationException):
        green_hat(1.0, [0.1, 0.2, 0.3], [0.1, 0.2, 0.3])


def test_green_matrix_matches_pointwise():
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=(4, 3)), rng.normal(size=(5, 3)) + 5.0
    m = green_matrix(2.5, a, b)
    assert m.shape == (4, 5)
    assert m[2, 3] == pytest.approx(green_hat(2.5, a[2], b[3]))
    with pytest.raises(SingularEvaluationException):
        green_matrix(2.5, a, a[:1])


def test_imag_green_finite_on_diagonal():
    assert imag_green(6.0, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]) == pytest.approx(6.0 / (4.0 * math.pi))
    x, y = [0.1, 0.0, 0.0], [0.0, 0.3, 0.0]
    assert imag_green(6.0, x, y) == pytest.approx(green_hat(6.0, x, y).imag)


def test_helmholtz_kirchhoff_identity():
    eta = 0.1
    array = build_sphere_array(20.0 * eta, 1500, 1500)
    assert array.is_adequate(eta)
    rng = np.random.default_rng(42)
    limit = array.radius / 10.0
    errors = []
    for _ in range(20):
        pts = rng.normal(size=(2, 3))
        pts *= limit * rng.uniform(0.0, 1.0, size=(2, 1)) / np.linalg.norm(pts, axis=1, keepdims=True)
        errors.append(hk_identity_check(array, 1.0 / eta, pts[0], pts[1]))
    assert max(errors) < 0.05


def _inner_pairs(seed: int, n_pairs: int, max_radius: float, min_fraction: float = 0.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n_pairs, 2, 3))
    radii = max_radius * rng.uniform(min_fraction, 1.0, size=(n_pairs, 2, 1))
    return pts * radii / np.linalg.norm(pts, axis=-1, keepdims=True)


def test_helmholtz_kirchhoff_error_decreases_with_array_size():
    # R = 160η, |x| ≤ R/20: 어레이 이산화 오차가 연속체 잔차보다 큼
    omega, radius = 40.0, 4.0
    pairs = _inner_pairs(7, 20, radius / 20.0, min_fraction=0.5)
    errors = []
    for n in (375, 750, 1500):
        array = build_sphere_array(radius, 10, n)
        errors.append(max(hk_identity_check(array, omega, x, y) for x, y in pairs))
    assert errors[0] > errors[1] > errors[2]


def test_helmholtz_kirchhoff_pointwise_normalization():
    omega = 10.0
    array = build_sphere_array(2.0, 10, 1500)
    for x, y in _inner_pairs(3, 10, 0.07):
        # k|x-y| < π/2 이므로 우변이 0 에 가깝지 않음
        kd = omega * float(np.linalg.norm(x - y))
        assert kd < math.pi / 2
        peak = hk_identity_check(array, omega, x, y)
        pointwise = hk_identity_check(array, omega, x, y, normalize="pointwise")
        assert pointwise == pytest.approx(peak / np.sinc(kd / math.pi), rel=1e-9)
        assert pointwise < 0.08


def test_green_hat_reciprocity_and_conjugation():
    rng = np.random.default_rng(5)
    for _ in range(5):
        x, y = rng.normal(size=3), rng.normal(size=3)
        omega = rng.uniform(1.0, 30.0)
        assert green_hat(omega, x, y) == pytest.approx(green_hat(omega, y, x), rel=1e-14)
        assert green_hat(-omega, x, y) == pytest.approx(np.conj(green_hat(omega, x, y)), rel=1e-14)
    a, b = rng.normal(size=(4, 3)), rng.normal(size=(6, 3)) + 3.0
    np.testing.assert_allclose(green_matrix(7.0, a, b), green_matrix(7.0, b, a).T, rtol=1e-14)


def test_helmholtz_kirchhoff_rejects_far_points():
    array = build_sphere_array(2.0, 10, 10)
    with pytest.raises(InvalidArgumentException):
        hk_identity_check(array, 10.0, [0.5, 0.0, 0.0], [0.0, 0.0, 0.0])


def test_sinc_kernel_values():
    assert sinc_kernel(3.0, [0.2, 0.1, 0.0], [0.2, 0.1, 0.0]) == pytest.approx(1.0 / (4.0 * math.pi))
    assert sinc_kernel(math.pi, [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]) == pytest.approx(0.0, abs=1e-15)
    assert sinc_kernel(2.0, [0.0, 0.0, 0.0], [0.0, 0.0, 1.0], c0=2.0) == pytest.approx(math.sin(1.0) / (4.0 * math.pi))
