"""HTTP service exposing the analysis pipeline and the strategy engine.

Endpoints (all JSON, mounted under /api):
  POST /api/analyze    image upload (multipart field "image" or a raw
                       image/png / image/jpeg body) -> analysis result
  POST /api/recommend  {"player": ["8","8"], "dealer": "10"}
                       -> {"move": "split", "display": "Split."}
  GET  /api/labels     the 14 card labels
  GET  /api/health     service + model status

Statuses: 400 for anything malformed, 422 for a hand the rules reject
(fewer than two player cards), 500 never leaks internals.  The model is
trained once at startup and shared read-only across requests.
"""
from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .classify import KnnModel
from .errors import InvalidHandError, InvalidImageError, NotARankError
from .pipeline import analyze
from .raster import decode_image
from .strategy import Hand, normalize_rank, recommend

LABEL_ORDER = ("2", "3", "4", "5", "6", "7", "8", "9", "10", "J", "Q", "K", "A", "BACK")


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(
    model: KnnModel,
    static_dir: str | Path | None = None,
    split_fraction: float | None = None,
) -> FastAPI:
    app = FastAPI(title="carp", docs_url=None, redoc_url=None)

    @app.exception_handler(Exception)
    async def on_unhandled(request: Request, exc: Exception) -> JSONResponse:
        return _error(500, "internal server error")

    @app.get("/api/health")
    async def health() -> dict:
        return {"status": "ok", "model": {"examples": model.n_examples, "k": model.k}}

    @app.get("/api/labels")
    async def labels() -> dict:
        return {"labels": list(LABEL_ORDER)}

    @app.post("/api/recommend")
    async def recommend_route(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "body is not valid JSON")
        if not isinstance(body, dict):
            return _error(400, "body must be a JSON object")
        player = body.get("player")
        dealer = body.get("dealer")
        if not isinstance(player, list) or not all(isinstance(c, str) for c in player):
            return _error(400, "player must be a list of rank strings")
        if not isinstance(dealer, str):
            return _error(400, "dealer must be a rank string")
        try:
            ranks = [normalize_rank(c) for c in player]
            upcard = normalize_rank(dealer)
        except NotARankError as exc:
            return _error(400, str(exc))
        try:
            move = recommend(Hand(ranks), upcard)
        except InvalidHandError as exc:
            return _error(422, str(exc))
        return {"move": move.slug, "display": move.display}

    @app.post("/api/analyze")
    async def analyze_route(request: Request):
        content_type = request.headers.get("content-type", "")
        data: bytes | None = None
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            upload = form.get("image") or form.get("file")
            if upload is None or isinstance(upload, str):
                return _error(400, "multipart body needs an 'image' file field")
            data = await upload.read()
        elif content_type.startswith(("image/png", "image/jpeg")):
            data = await request.body()
        else:
            return _error(400, f"unsupported content type {content_type!r}")
        if not data:
            return _error(400, "empty image body")
        try:
            img = decode_image(data)
        except InvalidImageError as exc:
            return _error(400, str(exc))
        result = analyze(img, model, split_fraction=split_fraction)
        return result.to_dict()

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
