import math

import pandas as pd
import pytest

from app.core.constants.imaging import PerturbationKind
from app.core.exceptions import InvalidArgumentException
from app.schemas.config_schemas import ExperimentConfig, SweepConfig
from app.services.stats_service import fit_log_linear, fit_scaling
from app.services.sweep_service import (
    experiment_variant,
    kernel_lattice,
    kernel_point,
    point_key,
    run_lattice,
    run_sweep,
)


def _kernel_sweep(**overrides) -> SweepConfig:
    payload = {
        "mode": "kernel",
        "kinds": ["Ball"],
        "epsilons": [1e-3, 2e-3, 4e-3, 8e-3],
        "etas": [0.05, 0.1, 0.2, 0.4],
        "t_tau": 4.0,
        "seed": 1,
    }
    payload.update(overrides)
    return SweepConfig.model_validate(payload)


def test_table_lattice_shares_fixed_point():
    config = SweepConfig.model_validate({"mode": "table"})
    points = kernel_lattice(config)
    assert len(points) == 3 * 9
    ball = [(p["epsilon"], p["eta"]) for p in points if p["kind"] == "Ball"]
    assert len(set(ball)) == len(ball) == 9
    assert (1e-3, 0.05) in ball


def test_point_key_is_stable():
    point = {"kind": "Ball", "epsilon": 1e-3, "eta": 0.1}
    assert point_key("abc", point) == point_key("abc", dict(reversed(list(point.items()))))
    assert point_key("abc", point) != point_key("abd", point)


def test_experiment_variant(experiment_config):
    longer = experiment_variant(experiment_config, "t_tau", 8.0)
    assert longer.source.delays.tau_max == 4.0
    finer = experiment_variant(experiment_config, "eta", 0.05)
    assert finer.source.omega0 == pytest.approx(20.0)
    assert finer.source.bandwidth / finer.source.omega0 == pytest.approx(0.2)
    thinner = experiment_variant(experiment_config, "epsilon", 0.01)
    assert thinner.perturbation.epsilon == 0.01


def test_experiment_variant_rejects_tabulated_delays(blended_payload):
    config = ExperimentConfig.model_validate(blended_payload(source={"delays": {
        "law": "tabulated", "times": [-1.0, 0.0, 1.0], "density": [0.0, 1.0, 0.0],
    }}))
    with pytest.raises(InvalidArgumentException):
        experiment_variant(config, "t_tau", 8.0)


def test_kernel_point_rows():
    point = kernel_lattice(_kernel_sweep())[0]
    rows = kernel_point(point)
    assert [r["location"] for r in rows] == ["center", "far"]
    center, far = rows
    assert center["mean_observable"] > far["mean_observable"]
    assert center["contrast"] == pytest.approx(center["mean_observable"] / far["mean_observable"])
    assert center["J1_error"] == 0.0
    assert center["std_observable"] == pytest.approx(math.sqrt((center["J1"] + center["J2"]) / 4.0))


def test_kernel_sweep_is_cached(tmp_path):
    config = _kernel_sweep()
    first = run_sweep(config, tmp_path, workers=2)
    assert first["counts"] == {"computed": 16, "cached": 0, "failed": 0}
    df = pd.read_csv(first["artifacts"]["sweep_csv"])
    assert len(df) == 32
    assert set(df["status"]) == {"ok"}
    first_bytes = open(first["artifacts"]["sweep_csv"], "rb").read()

    second = run_sweep(config, tmp_path, workers=1)
    assert second["counts"] == {"computed": 0, "cached": 16, "failed": 0}
    assert open(second["artifacts"]["sweep_csv"], "rb").read() == first_bytes


def test_failed_points_are_retried(tmp_path):
    points = [{"kind": "Ball", "epsilon": 1e-3, "eta": 0.1}, {"kind": "Ball", "epsilon": 2e-3, "eta": 0.1}]

    def flaky(point):
        if point["epsilon"] == 2e-3:
            raise InvalidArgumentException(message="실패 테스트")
        return [{"kind": point["kind"], "location": "center", "status": "ok"}]

    results, counts = run_lattice("hash", points, flaky, tmp_path, workers=1)
    assert counts == {"computed": 1, "cached": 0, "failed": 1}
    assert results[1][0]["status"] == "failed:E2001"

    results, counts = run_lattice("hash", points, lambda p: [{"status": "ok"}], tmp_path, workers=1)
    assert counts == {"computed": 1, "cached": 1, "failed": 0}
    assert results[1] == [{"status": "ok"}]


def _center_contrast(kind: PerturbationKind, epsilon: float, etas) -> list:
    config = _kernel_sweep(kinds=[kind.value], epsilons=[epsilon], etas=list(etas), include_std=False)
    return [(p["eta"], kernel_point(p)[0]["contrast"]) for p in kernel_lattice(config)]


def test_ball_contrast_grows_as_inverse_square():
    samples = _center_contrast(PerturbationKind.BALL, 1e-3, [0.02, 0.04, 0.08, 0.16, 0.32])
    assert fit_scaling(samples, "eta").slope == pytest.approx(-2.0, abs=0.3)


def test_cylinder_contrast_grows_as_inverse():
    samples = _center_contrast(PerturbationKind.CYLINDER, 1e-3, [0.02, 0.04, 0.08, 0.16, 0.32])
    assert fit_scaling(samples, "eta").slope == pytest.approx(-1.0, abs=0.3)


@pytest.mark.slow
def test_disc_contrast_is_logarithmic():
    samples = _center_contrast(PerturbationKind.DISC, 1e-3, [0.02, 0.04, 0.08, 0.16, 0.32])
    fit = fit_log_linear(samples, "eta")
    assert fit.r2 > 0.9
    assert fit.slope > 0


@pytest.mark.slow
def test_table_mode_has_twelve_rows(tmp_path):
    config = SweepConfig.model_validate({
        "mode": "table",
        "table": {
            "epsilons": [2.5e-4, 5e-4, 1e-3, 2e-3],
            "etas": [0.05, 0.1, 0.2, 0.4],
            "epsilon_fixed": 1e-3,
            "eta_fixed": 0.1,
        },
        "qmc_log2_points": 10,
        "seed": 1,
    })
    result = run_sweep(config, tmp_path)
    table = pd.read_csv(result["artifacts"]["table_csv"])
    assert len(table) == 12
    assert result["counts"]["table_rows"] == 12
    assert set(table["observable"]) == {"mean", "std"}
