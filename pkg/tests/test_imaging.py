import math

import numpy as np
import pytest

from app.core.constants.imaging import ImagingMethod, PerturbationKind
from app.core.exceptions import InvalidArgumentException
from app.schemas.config_schemas import ExperimentConfig
from app.schemas.geometry_schemas import Perturbation
from app.schemas.imaging_schemas import ImageGrid
from app.services.experiment_service import form_image
from app.services.forward_service import born_forward
from app.services.geometry_service import far_points
from app.services.imaging_service import apply_adjoint, bandlimited_shift, contrast, expected_image
from app.services.setup_service import build_setup
from app.services.signal_service import draw_source_spectra
from app.services.stats_service import realization_rng, run_ensemble


def _relative_l2(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def test_bandlimited_shift_of_sinusoid():
    n, dt = 512, 0.05
    t = dt * np.arange(n)
    omega = 2.0 * math.pi * 20 / (n * dt)
    x = np.cos(omega * t)[None, :]
    for shift in (0.37 * dt, -2.6 * dt, 5.0 * dt):
        shifted = bandlimited_shift(x, np.array([shift]), dt, band_max=omega)
        np.testing.assert_allclose(shifted[0], np.cos(omega * (t + shift)), atol=1e-6)


def test_bandlimited_shift_rejects_undersampling():
    with pytest.raises(InvalidArgumentException):
        bandlimited_shift(np.zeros((1, 16)), np.zeros(1), dt=0.5, band_max=10.0)


def test_contrast_center_over_far():
    p = Perturbation(kind=PerturbationKind.BALL, epsilon=0.01)
    far = far_points(p, 0.1)
    points = np.vstack([p.center_array[None, :], far])
    values = np.full(points.shape[0], 0.25)
    values[0] = -2.0
    values[5] = 0.5
    img = ImageGrid(points=points, values=values)
    assert contrast(img, p, eta=0.1) == pytest.approx(4.0)
    assert contrast(img, p, far=far) == pytest.approx(4.0)

    flat = ImageGrid(points=points, values=np.where(np.arange(points.shape[0]) == 0, 1.0, 0.0))
    assert contrast(flat, p, far=far) == math.inf


def test_contrast_requires_probe_points():
    p = Perturbation(kind=PerturbationKind.BALL, epsilon=0.01)
    img = ImageGrid(points=np.array([[0.3, 0.0, 0.0]]), values=np.array([1.0]))
    with pytest.raises(InvalidArgumentException):
        contrast(img, p, eta=0.1)
    with pytest.raises(InvalidArgumentException):
        contrast(img, p)


def test_image_peaks_at_perturbation(experiment_config):
    setup = build_setup(experiment_config)
    src = draw_source_spectra(setup.source_model, setup.grid, setup.array.n_sources, realization_rng(3, 0))
    d = born_forward(setup.perturbation, setup.quadrature, setup.array, src, setup.grid)
    img = apply_adjoint(d, setup.array, src, setup.points)
    assert img.values.shape == (setup.points.shape[0],)
    assert img.imag_residual < 1e-10
    assert contrast(img, setup.perturbation, far=setup.points[setup.far_indices]) > 1.0


def test_spectral_and_correlation_images_agree(blended_payload):
    line = {"kind": "line", "start": [-0.4, 0.1, 0.0], "end": [0.4, -0.1, 0.05], "n": 100}
    diffs = []
    for oversampling in (1.25, 4.0):
        config = ExperimentConfig.model_validate(
            blended_payload(image=line, time={"oversampling": oversampling},
                            array={"radius": 2.0, "n_sources": 16, "n_receivers": 16})
        )
        setup = build_setup(config)
        src = draw_source_spectra(setup.source_model, setup.grid, setup.array.n_sources, realization_rng(0, 0))
        d = born_forward(setup.perturbation, setup.quadrature, setup.array, src, setup.grid)
        spectral = form_image(setup, d, src, ImagingMethod.SPECTRAL, workers=1)
        correlation = form_image(setup, d, src, ImagingMethod.CORRELATION, workers=1)
        assert correlation.points.shape == (100, 3)
        diffs.append(_relative_l2(correlation.values, spectral.values))
    assert diffs[1] < 1e-3
    assert diffs[1] < diffs[0]


def test_correlation_needs_dft_grid(blended_payload):
    config = ExperimentConfig.model_validate(blended_payload(frequency={"kind": "gauss_legendre", "n_nodes": 9}))
    setup = build_setup(config)
    src = draw_source_spectra(setup.source_model, setup.grid, setup.array.n_sources, realization_rng(0, 0))
    d = born_forward(setup.perturbation, setup.quadrature, setup.array, src, setup.grid)
    with pytest.raises(InvalidArgumentException):
        form_image(setup, d, src, ImagingMethod.CORRELATION)


@pytest.mark.slow
def test_ensemble_mean_image_peaks_at_ball(blended_payload):
    plane = {"kind": "plane", "plane": "xy", "half_width": 0.3, "n": 25}
    config = ExperimentConfig.model_validate(blended_payload(
        image=plane,
        array={"radius": 2.0, "n_sources": 48, "n_receivers": 48},
        ensemble={"n_realizations": 50},
    ))
    setup = build_setup(config)
    stats = run_ensemble(setup, workers=1)
    peak = stats.points[np.argmax(np.abs(stats.mean))]
    assert np.linalg.norm(peak - setup.perturbation.center_array) <= config.eta / 2.0


@pytest.mark.slow
def test_expected_image_matches_ensemble_mean(blended_payload):
    config = ExperimentConfig.model_validate(blended_payload(ensemble={"n_realizations": 200}))
    setup = build_setup(config)
    stats = run_ensemble(setup, workers=1)
    exact = expected_image(setup.perturbation, setup.quadrature, setup.array, setup.source_model,
                           setup.grid, setup.points)
    center = setup.center_index
    assert abs(stats.mean[center] - exact[center]) < 4.0 * stats.mc_error[center]
    inside = np.abs(stats.mean - exact) < 4.0 * stats.mc_error + 1e-12 * np.abs(exact).max()
    assert inside.mean() > 0.9
