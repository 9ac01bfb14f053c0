import math

import numpy as np
import pytest

from app.core.constants.imaging import PerturbationKind
from app.core.exceptions import InvalidArgumentException, SingularEvaluationException
from app.schemas.geometry_schemas import Perturbation
from app.schemas.signal_schemas import PulseSpec
from app.services.forward_service import (
    apply_forward,
    born_forward,
    check_recording_time,
    from_time_domain,
    recording_time,
    to_time_domain,
)
from app.services.geometry_service import build_sphere_array, indicator, support_quadrature
from app.services.imaging_service import adjoint_values, data_inner_product, model_inner_product
from app.services.signal_service import dft_grid, gauss_legendre_grid, pulse_spectrum


@pytest.fixture
def small_problem():
    array = build_sphere_array(2.0, 20, 20)
    p = Perturbation(kind=PerturbationKind.BALL, epsilon=0.1)
    quad = support_quadrature(p, level=3)
    grid = gauss_legendre_grid(10.0, 2.0, 33)
    rng = np.random.default_rng(7)
    src = rng.standard_normal((20, grid.size)) + 1j * rng.standard_normal((20, grid.size))
    return array, p, quad, grid, src


def test_born_forward_shape_and_linearity(small_problem):
    array, p, quad, grid, src = small_problem
    d1 = born_forward(p, quad, array, src, grid)
    d2 = born_forward(p.model_copy(update={"alpha": 2.0}), quad, array, src, grid)
    assert d1.values.shape == (20, 33)
    assert d1.meta["kind"] == "Ball"
    np.testing.assert_allclose(d2.values, 2.0 * d1.values, rtol=1e-13)


def test_forward_is_independent_of_workers(small_problem):
    array, p, quad, grid, src = small_problem
    serial = born_forward(p, quad, array, src, grid, workers=1)
    threaded = born_forward(p, quad, array, src, grid, workers=4)
    np.testing.assert_array_equal(serial.values, threaded.values)


def test_discrete_adjointness(small_problem):
    array, p, quad, grid, src = small_problem
    assert quad.size <= 200
    rng = np.random.default_rng(123)
    for _ in range(10):
        m = rng.standard_normal(quad.size)
        d = rng.standard_normal((20, grid.size)) + 1j * rng.standard_normal((20, grid.size))
        fm = apply_forward(quad.nodes, quad.weights * m, array, src, grid)
        adj, _ = adjoint_values(d, array, src, quad.nodes, grid)
        lhs = data_inner_product(fm, d, grid)
        rhs = model_inner_product(m, adj, quad.weights)
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs))


def test_forward_batch_matches_single(small_problem):
    array, p, quad, grid, src = small_problem
    weighted = quad.weights * indicator(p, quad.nodes)
    batch = apply_forward(quad.nodes, weighted, array, np.stack([src, 2.0 * src], axis=-1), grid)
    single = apply_forward(quad.nodes, weighted, array, src, grid)
    np.testing.assert_allclose(batch[..., 0], single, rtol=1e-13)
    np.testing.assert_allclose(batch[..., 1], 2.0 * single, rtol=1e-13)


def test_forward_rejects_bad_inputs(small_problem):
    array, p, quad, grid, src = small_problem
    with pytest.raises(InvalidArgumentException):
        born_forward(p, quad, array, src[:, :10], grid)
    outside = quad.nodes + np.array([2.5, 0.0, 0.0])
    with pytest.raises(InvalidArgumentException):
        apply_forward(outside, quad.weights, array, src, grid)
    near = array.source_positions[:1] * (1.0 - 1e-9)
    with pytest.raises(SingularEvaluationException):
        apply_forward(near, np.ones(1), array, src, grid)


def test_time_domain_conversion_is_invertible():
    array = build_sphere_array(2.0, 12, 12)
    p = Perturbation(kind=PerturbationKind.BALL, epsilon=0.05)
    quad = support_quadrature(p, level=2)
    pulse = PulseSpec(omega0=10.0, bandwidth=2.0)
    grid = dft_grid(4.0, 16.0, recording_time(2.0, 1.0))
    src = np.tile(pulse_spectrum(pulse, grid.omegas), (12, 1))
    d = born_forward(p, quad, array, src, grid)
    dt = math.pi / (4.0 * 16.0)
    traces = to_time_domain(d, dt, grid.period)
    assert traces.shape == (12, math.ceil(grid.period / dt))
    assert np.all(np.isreal(traces))
    back = from_time_domain(traces, grid, dt)
    np.testing.assert_allclose(back.values, d.values, rtol=1e-9, atol=1e-12 * np.abs(d.values).max())


def test_recording_time_constraint():
    # 균등 지연 τ_max = 1.5 의 지지 폭 2·τ_max
    assert recording_time(2.0, 1.0, 2.0 * 1.5) == 11.0
    assert recording_time(2.0, 1.0) == 8.0
    assert check_recording_time(11.0, 2.0, 1.0, 3.0)
    assert not check_recording_time(5.0, 2.0, 1.0, 3.0)
