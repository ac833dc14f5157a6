"""HTTP service contract: status codes, payloads, and determinism."""

import base64
import concurrent.futures
import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from texwarp import imaging, service

from test_pipeline import make_semantic_image, make_textured_image


@pytest.fixture(scope="module")
def client(weight_store):
    app = service.create_app(weight_store, max_body_bytes=512 * 1024)
    with TestClient(app) as c:
        yield c


def b64png(feature):
    return base64.b64encode(imaging.encode_image_bytes(feature)).decode()


@pytest.fixture(scope="module")
def request_body():
    return {
        "source_style": b64png(make_textured_image(32, 32)),
        "source_sem": b64png(make_semantic_image(32, 32)),
        "target_sem": b64png(make_semantic_image(32, 32, split=0.3)),
    }


class TestHealthAndDefaults:
    def test_health(self, client):
        resp = client.get("/v1/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok", "weights_version": 1}

    def test_defaults(self, client):
        resp = client.get("/v1/config/defaults")
        assert resp.status_code == 200
        body = resp.json()
        assert body["omega1"] == 50.0 and body["fusion"] == "concat"
        assert body["stages"] == ["I", "II", "III"]


class TestTransfer:
    def test_happy_path(self, client, request_body):
        resp = client.post("/v1/transfer", json=request_body)
        assert resp.status_code == 200
        body = resp.json()
        png = base64.b64decode(body["image"])
        rgb8 = imaging.decode_rgb8(png)
        assert rgb8.shape == (32, 32, 3)
        assert set(body["timings"]) == {"stage1", "stage2", "stage3"}

    def test_trace_payload(self, client, request_body):
        resp = client.post("/v1/transfer", json={**request_body, "trace": True})
        assert resp.status_code == 200
        trace = resp.json()["trace"]
        assert set(trace) == {"stage1", "stage2", "stage3_l3", "stage3_l2", "stage3_l1"}

    def test_config_overrides(self, client, request_body):
        resp = client.post(
            "/v1/transfer",
            json={**request_body, "config": {"stages": ["I"], "omega1": 0.0}},
        )
        assert resp.status_code == 200
        assert set(resp.json()["timings"]) == {"stage1"}

    def test_malformed_json_400(self, client):
        resp = client.post(
            "/v1/transfer", content=b"{not json", headers={"content-type": "application/json"}
        )
        assert resp.status_code == 400
        assert "error" in resp.json()

    def test_missing_field_400(self, client, request_body):
        body = {k: v for k, v in request_body.items() if k != "target_sem"}
        resp = client.post("/v1/transfer", json=body)
        assert resp.status_code == 400
        assert "target_sem" in resp.json()["error"]

    def test_bad_base64_400(self, client, request_body):
        resp = client.post("/v1/transfer", json={**request_body, "source_sem": "!!!"})
        assert resp.status_code == 400

    def test_bad_png_400(self, client, request_body):
        fake = base64.b64encode(b"not a png").decode()
        resp = client.post("/v1/transfer", json={**request_body, "source_style": fake})
        assert resp.status_code == 400

    def test_bad_config_400(self, client, request_body):
        resp = client.post(
            "/v1/transfer", json={**request_body, "config": {"omega1": -3}}
        )
        assert resp.status_code == 400

    def test_oversized_payload_413(self, client, request_body):
        big = dict(request_body)
        big["source_style"] = "A" * (600 * 1024)
        resp = client.post("/v1/transfer", json=big)
        assert resp.status_code == 413

    def test_engine_error_422_names_stage(self, client, request_body):
        # source style and semantic map dims disagree
        body = dict(request_body)
        body["source_sem"] = b64png(make_semantic_image(48, 48))
        resp = client.post("/v1/transfer", json=body)
        assert resp.status_code == 422
        assert resp.json()["stage"] == "I"

    def test_concurrent_requests_identical(self, client, request_body):
        def call():
            resp = client.post("/v1/transfer", json=request_body)
            assert resp.status_code == 200
            return resp.json()["image"]

        with concurrent.futures.ThreadPoolExecutor(max_workers=2) as pool:
            a, b = list(pool.map(lambda _: call(), range(2)))
        assert a == b

    def test_cli_and_service_agree(self, client, request_body, weight_store, tmp_path):
        from texwarp import pipeline

        resp = client.post("/v1/transfer", json=request_body)
        service_rgb8 = imaging.decode_rgb8(base64.b64decode(resp.json()["image"]))

        # identical inputs means the same PNG payloads the service saw
        result, _ = pipeline.run_transfer(
            imaging.decode_image_bytes(base64.b64decode(request_body["source_style"])),
            imaging.decode_image_bytes(base64.b64decode(request_body["source_sem"])),
            imaging.decode_image_bytes(base64.b64decode(request_body["target_sem"])),
            pipeline.TransferConfig(),
            weight_store,
        )
        np.testing.assert_array_equal(service_rgb8, imaging.to_rgb8(result))
