"""FastAPI service wrapping the core library.

Expensive artifacts (validated generating sets, balls) are cached in
memory keyed by their defining data, so repeated audit requests against
the same group reuse the BFS work.  Results are deterministic: a cached
ball is served only when the requesting budget could have built it.
"""

from __future__ import annotations

import threading
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import audit, reports
from ..cayley import (
    BYTES_PER_STATE,
    Ball,
    GeneratingSet,
    ball,
    validate_generating_set,
    word_length,
)
from ..errors import BudgetExceededError, ConfigError, GenerationError
from ..group import element
from . import models


class _Cache:
    """Small keyed cache for generating sets and balls (LRU over balls)."""

    def __init__(self, max_balls: int = 8):
        self._lock = threading.Lock()
        self._gsets: dict = {}
        self._balls: dict = {}
        self._max_balls = max_balls

    def genset(self, cfg: models.GroupConfig) -> GeneratingSet:
        # budget participates: validation itself runs budget-capped searches
        key = (cfg.p, _gens_key(cfg), cfg.confirm_radius, cfg.memory_budget_bytes)
        with self._lock:
            got = self._gsets.get(key)
        if got is not None:
            return got
        raw = [element(g.num, g.exp, g.c, cfg.p) for g in cfg.generators]
        gset = validate_generating_set(
            cfg.p, raw, cfg.confirm_radius, cfg.memory_budget_bytes
        )
        with self._lock:
            self._gsets[key] = gset
        return gset

    def ball(self, gset: GeneratingSet, cfg: models.GroupConfig, n: int) -> Ball:
        key = (cfg.p, _gens_key(cfg), n)
        with self._lock:
            got = self._balls.get(key)
        if got is not None and len(got) * BYTES_PER_STATE <= cfg.memory_budget_bytes:
            return got
        B = ball(n, gset, cfg.memory_budget_bytes, cfg.workers)
        with self._lock:
            self._balls[key] = B
            while len(self._balls) > self._max_balls:
                self._balls.pop(next(iter(self._balls)))
        return B


def _gens_key(cfg: models.GroupConfig) -> tuple:
    return tuple(sorted((g.num, g.exp, g.c) for g in cfg.generators))


def _check_radius(cfg: models.GroupConfig, requested: int, what: str) -> None:
    if requested > cfg.max_radius:
        raise ConfigError(
            f"{what} {requested} exceeds configured max_radius {cfg.max_radius}"
        )


def create_app() -> FastAPI:
    app = FastAPI(
        title="bsconvex",
        description="Exact word metrics and almost-convexity audits for B(1,p)",
        version="0.1.0",
    )
    cache = _Cache()

    @app.exception_handler(ConfigError)
    @app.exception_handler(GenerationError)
    async def _config_error(request: Request, exc: Exception):
        return _error_response(400, "config", str(exc))

    @app.exception_handler(BudgetExceededError)
    async def _budget_error(request: Request, exc: BudgetExceededError):
        return _error_response(
            507, "budget", str(exc), completed_radius=exc.completed_radius
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        loc = ".".join(str(x) for x in first.get("loc", ()))
        return _error_response(422, "usage", f"{loc}: {first.get('msg', 'invalid')}")

    @app.get("/v1/health", response_model=models.HealthResponse)
    def health():
        return models.HealthResponse(status="ok")

    @app.post("/v1/constants", response_model=models.ConstantsResponse)
    def constants(req: models.ConstantsRequest):
        gset = cache.genset(req.config)
        K = audit.derived_constants(gset)
        j_star = audit.choose_j(K, gset.p)
        return models.ConstantsResponse.model_validate(
            reports.constants_payload(gset, K, j_star)
        )

    @app.post("/v1/ball", response_model=models.BallResponse)
    def ball_endpoint(req: models.BallRequest):
        _check_radius(req.config, req.n, "ball radius")
        gset = cache.genset(req.config)
        B = cache.ball(gset, req.config, req.n)
        return models.BallResponse.model_validate(reports.ball_payload(B))

    @app.post("/v1/word-length", response_model=models.WordLengthResponse)
    def word_length_endpoint(req: models.WordLengthRequest):
        max_r = req.max_r if req.max_r is not None else req.config.max_radius
        _check_radius(req.config, max_r, "search radius")
        gset = cache.genset(req.config)
        g = element(req.element.num, req.element.exp, req.element.c, req.config.p)
        length = word_length(g, gset, max_r, req.config.memory_budget_bytes)
        return models.WordLengthResponse.model_validate(
            reports.word_length_payload(g, max_r, length, req.config.p)
        )

    @app.post("/v1/ac-table", response_model=models.AcTableResponse)
    def ac_table_endpoint(req: models.AcTableRequest):
        _check_radius(req.config, req.n_max, "table radius")
        gset = cache.genset(req.config)
        table = audit.ac_table(
            req.n_max, req.k, gset, req.config.memory_budget_bytes, req.config.workers
        )
        return models.AcTableResponse.model_validate(
            reports.ac_table_payload(table, req.config.p)
        )

    @app.post("/v1/lemma1", response_model=models.Lemma1Response)
    def lemma1_endpoint(req: models.Lemma1Request):
        _check_radius(req.config, req.n, "audit radius")
        gset = cache.genset(req.config)
        B = cache.ball(gset, req.config, req.n)
        return models.Lemma1Response.model_validate(
            reports.lemma1_payload(audit.audit_lemma1(req.n, gset, B))
        )

    @app.post("/v1/lemma2", response_model=models.Lemma2Response)
    def lemma2_endpoint(req: models.Lemma2Request):
        _check_radius(req.config, max(req.n, req.r), "audit radius")
        gset = cache.genset(req.config)
        B = cache.ball(gset, req.config, req.n)
        B_big = B.restrict(req.r) if req.r <= req.n else cache.ball(
            gset, req.config, req.r
        )
        return models.Lemma2Response.model_validate(
            reports.lemma2_payload(audit.audit_lemma2(req.r, gset, B, B_big))
        )

    @app.post("/v1/witness", response_model=models.WitnessResponse)
    def witness_endpoint(req: models.WitnessRequest):
        gset = cache.genset(req.config)
        W = audit.build_witnesses(req.k, req.j, gset)
        _check_radius(req.config, W.radius, "witness radius")
        rep = audit.witness_audit(
            W, gset, req.config.memory_budget_bytes, req.config.workers
        )
        K = audit.derived_constants(gset)
        cert = audit.certify_divergence(K, gset.p, req.cert_k_max)
        return models.WitnessResponse.model_validate(
            reports.witness_payload(rep, gset, cert)
        )

    return app


def _error_response(
    status: int, code: str, message: str, completed_radius: Optional[int] = None
) -> JSONResponse:
    body = models.ErrorResponse(
        error=models.ErrorDetail(
            code=code, message=message, completed_radius=completed_radius
        )
    )
    return JSONResponse(status_code=status, content=body.model_dump(by_alias=True))


app = create_app()
