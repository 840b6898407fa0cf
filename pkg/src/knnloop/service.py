"""HTTP session service for interactive post-editing.

Each session owns one model-backed engine state; requests for a session
are serialized through a per-session lock (FIFO), distinct sessions run
independently. Diagnostics expose distances and probabilities only,
never raw vectors.

Endpoints:
    POST   /sessions                    create a session
    POST   /sessions/{id}/translate     {"source": text}
    POST   /sessions/{id}/correct       {"source": text, "corrected": text}
    GET    /sessions/{id}/stats
    POST   /sessions/{id}/clear
    DELETE /sessions/{id}               optional ?snapshot_prefix=...
    GET    /healthz
"""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel as Schema
from pydantic import Field

from .base_model import DEFAULT_DIM, DEFAULT_SMOOTHING, LexiconStubModel, load_lexicon
from .core import Vocabulary
from .errors import EngineError, InputError
from .metrics import corpus_bleu, lambda_bucket_report, ter_noshift
from .session import PolicyMode, Session, SessionConfig
from .storage import save_snapshot
from .token_knn import DEFAULT_K, DEFAULT_TEMPERATURE


class CreateSessionRequest(Schema):
    mode: str = "adaptive"
    lam: float = Field(default=0.2, ge=0.0, le=1.0)
    k: int = Field(default=DEFAULT_K, ge=1)
    temperature: float = Field(default=DEFAULT_TEMPERATURE, gt=0.0)
    policy_temperature: float = Field(default=DEFAULT_TEMPERATURE, gt=0.0)
    fallback_lambda: float = Field(default=0.0, ge=0.0, le=1.0)


class TranslateRequest(Schema):
    source: str


class CorrectRequest(Schema):
    source: str
    corrected: str


@dataclass
class _SessionSlot:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    created_at: float = field(default_factory=time.time)
    last_activity: float = field(default_factory=time.time)
    history: list[tuple[list[str], list[str]]] = field(default_factory=list)  # (hyp, ref)


def _policy_mode(body: CreateSessionRequest) -> PolicyMode:
    if body.mode == "adaptive":
        return PolicyMode.adaptive()
    if body.mode == "constant":
        return PolicyMode.constant(body.lam)
    if body.mode == "base":
        return PolicyMode.base_only()
    raise InputError(f"unknown mode {body.mode!r}")


def create_app(model: LexiconStubModel, cors_origin: str = "*", ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="knnloop session service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin] if cors_origin != "*" else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, _SessionSlot] = {}

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request body"})

    @app.exception_handler(EngineError)
    async def _engine_handler(request: Request, exc: EngineError):
        if isinstance(exc, InputError):
            return JSONResponse(status_code=400, content={"error": str(exc)})
        return JSONResponse(status_code=500, content={"error": str(exc)})

    def slot_of(session_id: str) -> _SessionSlot:
        slot = sessions.get(session_id)
        if slot is None:
            raise HTTPException(status_code=404, detail="unknown session")
        slot.last_activity = time.time()
        return slot

    def config_dict(session: Session) -> dict:
        return {
            "mode": session.mode.kind,
            "lam": session.mode.lam if session.mode.kind == "constant" else None,
            "k": session.config.k,
            "temperature": session.config.temperature,
            "policy_temperature": session.config.policy_temperature,
            "fallback_lambda": session.config.fallback_lambda,
        }

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "sessions": len(sessions)}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionRequest):
        config = SessionConfig(
            k=body.k,
            temperature=body.temperature,
            policy_temperature=body.policy_temperature,
            fallback_lambda=body.fallback_lambda,
        )
        session = Session(model, config, _policy_mode(body))
        session_id = secrets.token_hex(8)
        sessions[session_id] = _SessionSlot(session=session)
        return {"session_id": session_id, "config": config_dict(session)}

    @app.post("/sessions/{session_id}/translate")
    def translate(session_id: str, body: TranslateRequest):
        slot = slot_of(session_id)
        with slot.lock:
            source, oov = model.vocabulary.encode_with_oov(body.source)
            if not source:
                raise InputError("source must contain at least one token")
            start = time.perf_counter()
            result = slot.session.translate(source)
            elapsed_ms = (time.perf_counter() - start) * 1e3
        return {
            "tokens": result.hypothesis.surfaces(),
            "text": result.hypothesis.text(),
            "diagnostics": [
                {
                    "token": diag.token.surface,
                    "lambda": diag.lam,
                    "p_nmt_top": [[t.surface, p] for t, p in diag.p_nmt_top],
                    "p_knn_top": [[t.surface, p] for t, p in diag.p_knn_top],
                    "neighbor_distances": list(diag.neighbor_distances),
                }
                for diag in result.diagnostics
            ],
            "oov": oov,
            "latency_ms": elapsed_ms,
        }

    @app.post("/sessions/{session_id}/correct")
    def correct(session_id: str, body: CorrectRequest):
        slot = slot_of(session_id)
        with slot.lock:
            source, source_oov = model.vocabulary.encode_with_oov(body.source)
            corrected, corrected_oov = model.vocabulary.encode_with_oov(body.corrected)
            if not source or not corrected:
                raise InputError("source and corrected must contain at least one token")
            hypothesis = slot.session.translate(source).hypothesis
            report = slot.session.adapt(source, corrected)
            slot.history.append((hypothesis.surfaces(), corrected.surfaces()))
        return {
            "token_entries_added": report.token_entries_added,
            "policy_entries_added": report.policy_entries_added,
            "oov": {"source": source_oov, "corrected": corrected_oov},
        }

    @app.get("/sessions/{session_id}/stats")
    def stats(session_id: str):
        slot = slot_of(session_id)
        with slot.lock:
            session = slot.session
            running = {}
            if slot.history:
                hyps = [h for h, _ in slot.history]
                refs = [r for _, r in slot.history]
                running = {
                    "bleu": corpus_bleu(hyps, refs),
                    "ter_noshift": ter_noshift(hyps, refs),
                }
            lambda_report = lambda_bucket_report(session.adaptation_log)
            return {
                "datastore": {
                    "token_entries": session.token_store.count,
                    "policy_entries": session.policy_store.count,
                },
                "adapted_sentences": session.adapted_sentences,
                "running": running,
                "lambda_buckets": {
                    "total": lambda_report.total,
                    "buckets": [
                        {
                            "low": b.low,
                            "high": b.high,
                            "count": b.count,
                            "mean_lambda": b.mean_lambda,
                        }
                        for b in lambda_report.buckets
                    ],
                },
                "config": config_dict(session),
            }

    @app.post("/sessions/{session_id}/clear")
    def clear(session_id: str):
        slot = slot_of(session_id)
        with slot.lock:
            slot.session.clear_datastores()
        return {"cleared": True}

    @app.delete("/sessions/{session_id}")
    def delete(session_id: str, snapshot_prefix: str | None = None):
        slot = slot_of(session_id)
        with slot.lock:
            if snapshot_prefix:
                save_snapshot(slot.session.token_store, Path(f"{snapshot_prefix}.token.knns"))
                save_snapshot(slot.session.policy_store, Path(f"{snapshot_prefix}.policy.knns"))
            del sessions[session_id]
        return {"deleted": True}

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def build_model(
    lexicon: str | Path,
    vocab: str | Path | None = None,
    dim: int = DEFAULT_DIM,
    smoothing: float = DEFAULT_SMOOTHING,
    seed: int = 0,
) -> LexiconStubModel:
    vocabulary = Vocabulary.from_file(vocab) if vocab else Vocabulary()
    lex = load_lexicon(lexicon, vocabulary)
    return LexiconStubModel(vocabulary, lex, dim=dim, smoothing=smoothing, seed=seed)


def serve(
    lexicon: Path,
    vocab: Path | None,
    dim: int,
    smoothing: float,
    seed: int,
    host: str,
    port: int,
    cors_origin: str,
    ui_dir: Path | None = None,
) -> int:
    import uvicorn

    model = build_model(lexicon, vocab, dim=dim, smoothing=smoothing, seed=seed)
    app = create_app(model, cors_origin=cors_origin, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0
