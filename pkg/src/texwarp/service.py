"""HTTP service exposing the transfer pipeline.

Endpoints:
    GET  /v1/health           liveness + weight file version
    GET  /v1/config/defaults  the default pipeline configuration
    POST /v1/transfer         JSON request with base64 PNG payloads

Requests are independent; the only shared state is the immutable
WeightStore. Malformed requests map to 400, oversized bodies to 413,
engine failures to 422 with the failing stage named, timeouts to 504.
"""

from __future__ import annotations

import base64
import binascii
import concurrent.futures
import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from texwarp import imaging, pipeline
from texwarp.codec import WeightStore
from texwarp.errors import ConfigError, ImageError, StageError, TexwarpError

MAX_BODY_BYTES = 16 * 1024 * 1024
DEFAULT_TIMEOUT_S = 300.0

_REQUIRED_FIELDS = ("source_style", "source_sem", "target_sem")


class _BadRequest(Exception):
    pass


def _decode_payload(body: bytes) -> tuple[dict, pipeline.TransferConfig, bool]:
    try:
        data = json.loads(body)
    except json.JSONDecodeError as exc:
        raise _BadRequest(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise _BadRequest("request body must be a JSON object")
    images = {}
    for name in _REQUIRED_FIELDS:
        value = data.get(name)
        if not isinstance(value, str) or not value:
            raise _BadRequest(f"missing or invalid field {name!r}")
        try:
            raw = base64.b64decode(value, validate=True)
            images[name] = imaging.decode_image_bytes(raw)
        except (binascii.Error, ValueError, ImageError) as exc:
            raise _BadRequest(f"field {name!r}: {exc}") from exc
    try:
        cfg = pipeline.TransferConfig.from_overrides(data.get("config"))
    except (ConfigError, TypeError, ValueError) as exc:
        raise _BadRequest(f"invalid config: {exc}") from exc
    return images, cfg, bool(data.get("trace", False))


def create_app(
    weights: WeightStore,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    max_body_bytes: int = MAX_BODY_BYTES,
) -> FastAPI:
    app = FastAPI(title="texwarp", docs_url=None, redoc_url=None)
    executor = concurrent.futures.ThreadPoolExecutor()

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "weights_version": weights.version}

    @app.get("/v1/config/defaults")
    def config_defaults():
        return pipeline.TransferConfig().to_dict()

    @app.post("/v1/transfer")
    async def transfer(request: Request):
        body = await request.body()
        if len(body) > max_body_bytes:
            return JSONResponse(
                {"error": f"payload exceeds {max_body_bytes} bytes"}, status_code=413
            )
        try:
            images, cfg, want_trace = _decode_payload(body)
        except _BadRequest as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)

        future = executor.submit(
            pipeline.run_transfer,
            images["source_style"],
            images["source_sem"],
            images["target_sem"],
            cfg,
            weights,
        )
        try:
            result, trace = future.result(timeout=timeout_s)
        except concurrent.futures.TimeoutError:
            return JSONResponse(
                {"error": f"transfer exceeded {timeout_s} s"}, status_code=504
            )
        except StageError as exc:
            return JSONResponse(
                {"error": str(exc), "stage": exc.stage}, status_code=422
            )
        except TexwarpError as exc:
            return JSONResponse({"error": str(exc), "stage": None}, status_code=422)

        payload = {
            "image": base64.b64encode(imaging.encode_image_bytes(result)).decode(),
            "timings": trace.timings,
        }
        if want_trace:
            payload["trace"] = {
                name: base64.b64encode(imaging.encode_image_bytes(img)).decode()
                for name, img in trace.images.items()
            }
        return payload

    return app


def serve(
    addr: str,
    weights: WeightStore,
    timeout_s: float = DEFAULT_TIMEOUT_S,
) -> None:
    """Run the service until interrupted. ``addr`` is host:port."""
    import uvicorn

    host, _, port = addr.rpartition(":")
    if not host:
        host = "127.0.0.1"
    app = create_app(weights, timeout_s=timeout_s)
    uvicorn.run(app, host=host, port=int(port), log_level="info")
