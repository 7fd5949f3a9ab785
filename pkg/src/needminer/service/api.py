"""Read API for the dashboard: JSON over HTTP.

Routes (all under /api/v1 except the health probe):

    GET  /api/v1/needs/summary?from&to&category&min_score&gender&limit
    GET  /api/v1/needs/timeseries?bucket={day|week|month}&from&to&category
    GET  /api/v1/tweets?category&limit
    POST /api/v1/classify          {"texts": ["..."]}
    GET  /api/v1/models
    PUT  /api/v1/config/threshold  {"value": 0.6}
    GET  /healthz

Malformed queries answer 400, unknown routes 404, classification without
loaded models 503. The threshold set via the config endpoint applies to
subsequent classification and to summary filtering.
"""
from __future__ import annotations

import threading
from datetime import datetime, timezone

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from ..errors import NeedminerError, ServiceError
from ..needcat import CATEGORY_IDS, classify_needs
from ..textproc import LexicalResource
from .orchestrator import query_summary, select_stored, timeseries
from .registry import ModelRegistry
from .store import TweetStore


class RuntimeConfig:
    """Mutable runtime knobs; threshold swaps are atomic."""

    def __init__(self, threshold: float = 0.5):
        self._lock = threading.Lock()
        self._threshold = threshold

    @property
    def threshold(self) -> float:
        with self._lock:
            return self._threshold

    @threshold.setter
    def threshold(self, value: float):
        with self._lock:
            self._threshold = value


class _BadQuery(ValueError):
    pass


def _parse_when(value: str | None, name: str) -> datetime | None:
    if value is None:
        return None
    try:
        parsed = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        raise _BadQuery(f"query parameter {name!r} is not an RFC 3339 timestamp: {value!r}")
    if parsed.tzinfo is None:  # stored timestamps are tz-aware; assume UTC
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed


def _parse_float(value: str | None, name: str, lo: float | None = None, hi: float | None = None):
    if value is None:
        return None
    try:
        parsed = float(value)
    except ValueError:
        raise _BadQuery(f"query parameter {name!r} must be a number, got {value!r}")
    if (lo is not None and parsed < lo) or (hi is not None and parsed > hi):
        raise _BadQuery(f"query parameter {name!r} out of range [{lo}, {hi}]")
    return parsed


def _parse_category(value: str | None) -> str | None:
    if value is not None and value not in CATEGORY_IDS:
        raise _BadQuery(f"unknown category {value!r}; choose from {list(CATEGORY_IDS)}")
    return value


def create_app(
    store: TweetStore,
    registry: ModelRegistry,
    runtime: RuntimeConfig | None = None,
    lex: LexicalResource | None = None,
) -> FastAPI:
    runtime = runtime or RuntimeConfig()
    app = FastAPI(title="needminer", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.runtime = runtime

    # models load lazily and cache per active version
    model_cache: dict[str, object] = {}

    def load_models():
        versions = registry.active_versions()
        key = f"{versions.get('need')}+{versions.get('categories')}"
        if model_cache.get("key") != key:
            _, need_model = registry.load_need()
            _, cat_models = registry.load_categories()
            model_cache.update({"key": key, "need": need_model, "categories": cat_models})
        return model_cache["need"], model_cache["categories"]

    @app.exception_handler(_BadQuery)
    async def bad_query_handler(request: Request, exc: _BadQuery):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors())})

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz():
        return "ok"

    @app.get("/api/v1/needs/summary")
    def needs_summary(
        request: Request,
        category: str | None = None,
        gender: str | None = None,
        limit: int = 10,
    ):
        params = request.query_params
        window = (_parse_when(params.get("from"), "from"), _parse_when(params.get("to"), "to"))
        if window[0] and window[1] and window[0] > window[1]:
            raise _BadQuery("window 'from' must not be after 'to'")
        min_score = _parse_float(params.get("min_score"), "min_score", 0.0, 1.0)
        result = query_summary(
            store,
            window=window,
            category=_parse_category(category),
            min_score=min_score,
            gender=gender,
            threshold=runtime.threshold,
            top_limit=limit,
        )
        return result.to_dict()

    @app.get("/api/v1/needs/timeseries")
    def needs_timeseries(request: Request, bucket: str = "month", category: str | None = None):
        if bucket not in ("day", "week", "month"):
            raise _BadQuery(f"bucket must be day, week or month, got {bucket!r}")
        params = request.query_params
        window = (_parse_when(params.get("from"), "from"), _parse_when(params.get("to"), "to"))
        series = timeseries(
            store,
            bucket,
            window=window,
            category=_parse_category(category),
            threshold=runtime.threshold,
        )
        return {"bucket": bucket, "series": [q.to_dict() for q in series]}

    @app.get("/api/v1/tweets")
    def tweets(category: str | None = None, limit: int = 20):
        if limit < 1:
            raise _BadQuery("limit must be >= 1")
        stored = select_stored(store, category=_parse_category(category))
        flagged = [st for st in stored if st.need_score > runtime.threshold]
        flagged.sort(
            key=lambda st: (
                -st.need_score,
                -(st.tweet.created_at or st.processed_at).timestamp(),
            )
        )
        return {"tweets": [st.to_dict() for st in flagged[:limit]]}

    @app.post("/api/v1/classify")
    async def classify(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise _BadQuery("request body must be JSON")
        if not isinstance(body, dict) or not isinstance(body.get("texts"), list):
            raise _BadQuery('request body must look like {"texts": ["..."]}')
        try:
            need_model, cat_models = load_models()
        except (ServiceError, NeedminerError) as exc:
            return JSONResponse(status_code=503, content={"error": f"models not loaded: {exc}"})
        threshold = runtime.threshold
        results = []
        for text in body["texts"]:
            if not isinstance(text, str) or not text.strip():
                raise _BadQuery("texts must be non-empty strings")
            score = float(need_model.score_text(text, lex))
            entry = {"text": text, "need_score": score, "is_need": score > threshold}
            if entry["is_need"] and cat_models:
                assignment = classify_needs(cat_models, "adhoc", text, threshold=0.5, lex=lex)
                entry["categories"] = list(assignment.categories)
                entry["category_scores"] = assignment.scores
                entry["low_confidence"] = assignment.low_confidence
            else:
                entry["categories"] = []
            results.append(entry)
        return {"threshold": threshold, "results": results}

    @app.get("/api/v1/models")
    def models():
        return {"active": registry.active_versions(), "registry": registry.describe()}

    @app.put("/api/v1/config/threshold")
    async def put_threshold(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise _BadQuery("request body must be JSON")
        value = body.get("value") if isinstance(body, dict) else None
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not 0 <= value <= 1:
            raise _BadQuery("threshold value must be a number within [0, 1]")
        runtime.threshold = float(value)
        return {"threshold": runtime.threshold}

    return app


def serve_api(
    store: TweetStore,
    registry: ModelRegistry,
    host: str,
    port: int,
    runtime: RuntimeConfig | None = None,
    lex: LexicalResource | None = None,
):
    """Blocking uvicorn server around create_app."""
    import uvicorn

    uvicorn.run(create_app(store, registry, runtime, lex), host=host, port=port, log_level="info")
