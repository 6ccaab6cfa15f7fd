import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from evalbridge.server import create_app

GOLDEN = Path(__file__).parent / "goldens" / "protocol_exchanges.json"


@pytest.fixture()
def client(bridge_fixtures):
    app = create_app(bridge_fixtures["model_dir"], bridge_fixtures["image_dir"])
    with TestClient(app) as tc:
        yield tc


def _exchange(client, spec):
    if spec["method"] == "GET":
        return client.get(spec["path"])
    return client.post(spec["path"], content=spec["body"].encode("utf-8"))


def test_models_records_validate_under_the_engine_pool_loader(client):
    from modelpick import load_pool

    resp = client.get("/models")
    assert resp.status_code == 200
    pool = load_pool(resp.text)
    assert len(pool) == 4
    assert all(c.size_mb > 0 and c.complexity_mmac > 0 for c in pool)


def test_strong_model_classifies_known_image_correctly(client):
    # conv_small is the strongest target-domain model in the default zoo;
    # the golden suite pins a sample it gets right
    golden = json.loads(GOLDEN.read_text(encoding="utf-8"))
    known = golden["known_correct"]
    resp = client.post(
        "/evaluate", json={"model_id": known["model_id"], "sample_ids": [known["sample_id"]]}
    )
    assert resp.status_code == 200
    assert resp.json()["results"][0]["correct"] == 1


def test_unknown_model_is_404_with_error_body(client):
    resp = client.post("/evaluate", json={"model_id": "resnet152", "sample_ids": []})
    assert resp.status_code == 404
    assert "error" in resp.json()


def test_unknown_sample_is_404_with_error_body(client):
    resp = client.post(
        "/evaluate", json={"model_id": "conv_tiny", "sample_ids": ["circle/missing.png"]}
    )
    assert resp.status_code == 404
    assert "error" in resp.json()


def test_golden_protocol_exchanges_byte_for_byte(client):
    golden = json.loads(GOLDEN.read_text(encoding="utf-8"))
    assert len(golden["exchanges"]) == 5
    for spec in golden["exchanges"]:
        resp = _exchange(client, spec)
        assert resp.status_code == spec["status"], spec["path"]
        assert resp.text == spec["response"], f"drift in {spec['method']} {spec['path']}"


def test_responses_deterministic_across_repeats(client):
    body = {"model_id": "conv_wide", "sample_ids": ["square/t0004.png", "cross/t0011.png"]}
    first = client.post("/evaluate", json=body).text
    second = client.post("/evaluate", json=body).text
    assert first == second
