import json

import pandas as pd
import pytest

from app.cli import main


@pytest.fixture
def config_path(blended_payload, write_yaml):
    return write_yaml(blended_payload())


def _last_json(capsys) -> dict:
    out = capsys.readouterr().out.strip().splitlines()
    return json.loads(out[-1])


def test_forward_is_byte_identical(config_path, tmp_path, capsys):
    assert main(["forward", "--config", str(config_path), "--out", str(tmp_path / "a")]) == 0
    first = _last_json(capsys)
    assert main(["forward", "--config", str(config_path), "--out", str(tmp_path / "b"), "--workers", "3"]) == 0
    second = _last_json(capsys)

    assert first["config_hash"] == second["config_hash"]
    assert (tmp_path / "a" / "data.bsid").read_bytes() == (tmp_path / "b" / "data.bsid").read_bytes()
    assert (tmp_path / "a" / "provenance.json").read_bytes() == (tmp_path / "b" / "provenance.json").read_bytes()


def test_image_from_forward_data(config_path, tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["forward", "--config", str(config_path), "--out", str(out)]) == 0
    capsys.readouterr()

    code = main(["image", "--config", str(config_path), "--data", str(out / "data.bsid"), "--out", str(out)])
    assert code == 0
    summary = _last_json(capsys)
    assert summary["method"] == "spectral"
    assert summary["contrast"] > 1.0
    image = pd.read_csv(out / "image.csv")
    assert list(image.columns) == ["x", "y", "z", "value"]
    assert len(image) == summary["n_points"]


def test_image_rejects_other_seed(config_path, tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["forward", "--config", str(config_path), "--out", str(out)]) == 0
    code = main(["image", "--config", str(config_path), "--data", str(out / "data.bsid"),
                 "--out", str(out), "--seed", "99"])
    assert code == 1
    assert "E4003" in capsys.readouterr().err


def test_verify_forward_and_tampering(config_path, tmp_path):
    out = tmp_path / "run"
    assert main(["forward", "--config", str(config_path), "--out", str(out)]) == 0
    assert main(["verify", "--artifact", str(out)]) == 0

    data = out / "data.bsid"
    raw = bytearray(data.read_bytes())
    raw[-1] ^= 0xFF
    data.write_bytes(bytes(raw))
    assert main(["verify", "--artifact", str(out)]) == 3


def test_missing_field_exit_code(blended_payload, write_yaml, capsys):
    payload = blended_payload()
    del payload["array"]
    path = write_yaml(payload, "broken.yaml")
    assert main(["forward", "--config", str(path)]) == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error_code"] == "E4002"


def test_runtime_error_exit_code(tmp_path):
    assert main(["image", "--config", str(tmp_path / "none.yaml"), "--data", "x.bsid"]) == 2


def test_sweep_then_verify(tmp_path, write_yaml):
    path = write_yaml({
        "mode": "kernel",
        "kinds": ["Ball"],
        "epsilons": [1e-3, 2e-3, 4e-3, 8e-3],
        "etas": [0.05, 0.1],
        "seed": 2,
    }, "sweep.yaml")
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", str(path), "--out", str(out)]) == 0
    assert (out / "sweep.csv").exists()
    assert json.loads((out / "fits.json").read_text(encoding="utf-8"))["seed"] == 2
    assert main(["verify", "--artifact", str(out / "provenance.json")]) == 0
