import pytest
from fastapi.testclient import TestClient

from main import app


@pytest.fixture
def client():
    return TestClient(app)


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_forward_and_history(client, blended_payload, tmp_path):
    out = tmp_path / "api"
    response = client.post("/experiments/forward", json={"config": blended_payload(), "out_dir": str(out)})
    assert response.status_code == 200
    body = response.json()
    assert body["success"] is True
    assert body["data"]["seed"] == 3
    assert (out / "data.bsid").exists()

    runs = client.get("/runs", params={"out_dir": str(out)}).json()
    assert runs["total"] == 1
    assert runs["items"][0]["command"] == "forward"
    assert runs["items"][0]["fin_yn"] == "Y"


def test_invalid_request_body(client, blended_payload):
    payload = blended_payload()
    del payload["source"]
    response = client.post("/experiments/forward", json={"config": payload})
    assert response.status_code == 400
    body = response.json()
    assert body["success"] is False
    assert body["error_code"] == "E4004"
    assert any(e["field"].endswith("source") for e in body["detail"]["errors"])


def test_image_hash_mismatch(client, blended_payload, tmp_path):
    out = tmp_path / "api"
    client.post("/experiments/forward", json={"config": blended_payload(), "out_dir": str(out)})
    response = client.post("/experiments/image", json={
        "config": blended_payload(seed=4),
        "data_path": str(out / "data.bsid"),
        "out_dir": str(out),
    })
    assert response.status_code == 400
    assert response.json()["error_code"] == "E4003"

    runs = client.get("/runs", params={"out_dir": str(out)}).json()
    assert [r["fin_yn"] for r in runs["items"]].count("N") == 1


def test_missing_data_file(client, blended_payload, tmp_path):
    response = client.post("/experiments/image", json={
        "config": blended_payload(),
        "data_path": str(tmp_path / "missing.bsid"),
        "out_dir": str(tmp_path),
    })
    assert response.status_code == 500
    assert response.json()["error_code"] == "E1001"
