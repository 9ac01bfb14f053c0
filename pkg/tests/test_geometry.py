import math

import numpy as np
import pytest

from app.core.constants.imaging import FAR_RADIUS, PerturbationKind
from app.core.exceptions import InvalidArgumentException
from app.schemas.config_schemas import ImageConfig
from app.schemas.geometry_schemas import Perturbation
from app.services.geometry_service import (
    build_sphere_array,
    check_array_adequacy,
    check_support_inside,
    far_points,
    fibonacci_sphere,
    image_points,
    indicator,
    max_neighbor_spacing,
    probe_points,
    support_quadrature,
)


def test_fibonacci_sphere_lies_on_sphere():
    pts = fibonacci_sphere(200, 3.0)
    assert pts.shape == (200, 3)
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 3.0, rtol=1e-14)
    # 거의 균일하므로 무게중심은 원점 근처
    assert np.linalg.norm(pts.mean(axis=0)) < 0.05


@pytest.mark.parametrize("n, radius", [(0, 1.0), (10, 0.0), (10, -2.0)])
def test_fibonacci_sphere_rejects_bad_arguments(n, radius):
    with pytest.raises(InvalidArgumentException):
        fibonacci_sphere(n, radius)


def test_spacing_shrinks_with_more_sensors():
    coarse = max_neighbor_spacing(fibonacci_sphere(100, 1.0))
    fine = max_neighbor_spacing(fibonacci_sphere(1600, 1.0))
    assert fine < coarse / 3.0
    assert max_neighbor_spacing(fibonacci_sphere(1, 1.0)) == math.inf


def test_array_adequacy_against_half_wavelength():
    array = build_sphere_array(2.0, 2000, 2000)
    assert array.n_sources == 2000 and array.n_receivers == 2000
    assert array.source_density == pytest.approx(2000 / (16.0 * math.pi))
    assert check_array_adequacy(array, 0.1)
    assert not check_array_adequacy(build_sphere_array(2.0, 20, 20), 0.1)


@pytest.mark.parametrize(
    "kind, inside, outside",
    [
        (PerturbationKind.BALL, [0.0, 0.0, 0.009], [0.0, 0.0, 0.011]),
        (PerturbationKind.CYLINDER, [0.005, 0.0, 0.99], [0.0, 0.0, 1.01]),
        (PerturbationKind.DISC, [0.009, 0.7, 0.0], [0.011, 0.0, 0.0]),
    ],
)
def test_indicator_support(kind, inside, outside):
    p = Perturbation(kind=kind, epsilon=0.01, alpha=2.5)
    assert indicator(p, inside) == 2.5
    assert indicator(p, outside) == 0.0
    values = indicator(p, np.array([inside, outside]))
    np.testing.assert_array_equal(values, [2.5, 0.0])


def test_indicator_respects_center():
    p = Perturbation(kind=PerturbationKind.BALL, epsilon=0.1, center=(0.3, 0.0, 0.0))
    assert indicator(p, [0.3, 0.0, 0.05]) == 1.0
    assert indicator(p, [0.0, 0.0, 0.0]) == 0.0


@pytest.mark.parametrize("kind", list(PerturbationKind))
def test_quadrature_integrates_support_volume(kind):
    p = Perturbation(kind=kind, epsilon=0.02)
    rule = support_quadrature(p, level=3)
    assert rule.volume == pytest.approx(p.support_volume, rel=1e-12)
    assert np.all(indicator(p, rule.nodes) == 1.0)


@pytest.mark.parametrize("kind", list(PerturbationKind))
def test_quadrature_resolves_wavelength(kind):
    eta = 0.2
    p = Perturbation(kind=kind, epsilon=0.05)
    rule = support_quadrature(p, level=2, eta=eta)
    assert rule.max_spacing <= eta / 3.0


def test_quadrature_rejects_zero_level():
    with pytest.raises(InvalidArgumentException):
        support_quadrature(Perturbation(kind=PerturbationKind.BALL, epsilon=0.1), level=0)


def test_support_must_sit_deep_inside_array():
    check_support_inside(Perturbation(kind=PerturbationKind.BALL, epsilon=0.05), radius=2.0)
    with pytest.raises(InvalidArgumentException):
        check_support_inside(Perturbation(kind=PerturbationKind.DISC, epsilon=0.01), radius=2.0)


def test_far_points_scan_one_period():
    eta = 0.1
    ball = far_points(Perturbation(kind=PerturbationKind.BALL, epsilon=0.01), eta)
    radii = np.linalg.norm(ball, axis=1)
    assert ball.shape == (40, 3)
    assert radii.min() == pytest.approx(FAR_RADIUS)
    assert radii.max() == pytest.approx(FAR_RADIUS + math.pi * eta)

    cyl = far_points(Perturbation(kind=PerturbationKind.CYLINDER, epsilon=0.01), eta)
    np.testing.assert_array_equal(cyl[:, 2], 0.0)

    disc = far_points(Perturbation(kind=PerturbationKind.DISC, epsilon=0.01), eta)
    assert disc.shape == (10, 3)
    np.testing.assert_array_equal(disc[:, 1:], 0.0)


def test_probe_points_start_with_center():
    p = Perturbation(kind=PerturbationKind.BALL, epsilon=0.01, center=(0.1, 0.0, 0.0))
    pts = probe_points(p, 0.1)
    np.testing.assert_array_equal(pts[0], [0.1, 0.0, 0.0])
    assert pts.shape[0] == 41


def test_image_points_line_with_probe():
    p = Perturbation(kind=PerturbationKind.BALL, epsilon=0.01)
    spec = ImageConfig(kind="line", start=(-0.5, 0.0, 0.0), end=(0.5, 0.0, 0.0), n=11, include_probe=True)
    pts, center, far = image_points(spec, p, 0.1)
    assert pts.shape == (11 + 41, 3)
    assert center == 11
    np.testing.assert_array_equal(pts[center], [0.0, 0.0, 0.0])
    assert far.tolist() == list(range(12, 52))


def test_image_points_without_probe():
    p = Perturbation(kind=PerturbationKind.BALL, epsilon=0.01)
    pts, center, far = image_points(ImageConfig(kind="plane", n=5, plane="xz"), p, 0.1)
    assert pts.shape == (25, 3)
    assert center is None and far.size == 0
    np.testing.assert_array_equal(pts[:, 1], 0.0)
