"""HTTP front door: session lifecycle, messaging, server-sent events, stats."""

from __future__ import annotations

import json
import logging
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse, StreamingResponse

from ..assets import asset_path
from ..dialog import ENGINE_ORDER, Candidate, load_engine_corpus
from ..embeddings import load_vectors
from ..keywords import FeedEvent, load_feed
from ..scenario import ScenarioAssets, build_session
from ..stats import turn_stats
from ..templates import load_templates
from .models import (
    AckResponse,
    CreateSessionRequest,
    EventRecord,
    FeedEventModel,
    MessageRequest,
    SessionConfigModel,
    SessionInfo,
    StatsResponse,
)
from .runtime import ENDED, RUNNING, SessionRuntime

logger = logging.getLogger(__name__)


@dataclass
class ServiceSettings:
    data_dir: Path = Path("data")
    vectors: Path = field(default_factory=lambda: asset_path("vectors.txt"))
    templates: Path = field(default_factory=lambda: asset_path("templates.tsv"))
    stopwords: Path = field(default_factory=lambda: asset_path("stopwords.txt"))
    user_dictionary: Path | None = None
    engines: dict[str, Path] | None = None
    generative_url: str | None = None
    frontend_dist: Path | None = None

    def engine_paths(self) -> dict[str, Path]:
        if self.engines is not None:
            return self.engines
        return {eid: asset_path("engines", f"{eid}.jsonl") for eid in ENGINE_ORDER}


def _sse_chunk(event: dict) -> str:
    payload = {k: v for k, v in event.items() if k not in ("seq", "type")}
    return (f"id: {event['seq']}\n"
            f"event: {event['type']}\n"
            f"data: {json.dumps(payload, ensure_ascii=False)}\n\n")


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings()
    app = FastAPI(title="tvcompanion", version="0.1.0")

    store = load_vectors(settings.vectors)
    corpus = load_templates(settings.templates, store=store)
    engine_records: dict[str, list[Candidate]] = {}
    for engine_id, path in settings.engine_paths().items():
        if Path(path).exists():
            engine_records[engine_id] = load_engine_corpus(path)
        else:
            logger.warning("engine corpus missing, skipping: %s", path)
    registry: dict[str, SessionRuntime] = {}
    app.state.registry = registry
    app.state.settings = settings

    def _runtime(session_id: str) -> SessionRuntime:
        runtime = registry.get(session_id)
        if runtime is None:
            raise HTTPException(status_code=404, detail=f"unknown session: {session_id}")
        return runtime

    def _running(session_id: str) -> SessionRuntime:
        runtime = _runtime(session_id)
        if runtime.status != RUNNING:
            raise HTTPException(status_code=409, detail="session already ended")
        return runtime

    def _info(runtime: SessionRuntime) -> SessionInfo:
        cfg = runtime.session.config
        return SessionInfo(
            session_id=runtime.session_id,
            created_at=runtime.created_at,
            status=runtime.status,
            mode=runtime.session.mode,
            clock=runtime.session.clock,
            speedup=runtime.speedup,
            config=SessionConfigModel(
                mean_interval_s=cfg.mean_interval_s,
                disclosure_ratio=cfg.disclosure_ratio,
                silence_timeout_s=cfg.silence_timeout_s,
                max_no_answer=cfg.max_no_answer,
                wmd_threshold=cfg.wmd_threshold,
                cooldown_utterances=cfg.cooldown_utterances,
                rng_seed=cfg.rng_seed,
                min_confidence=cfg.min_confidence,
                news_max_age_s=cfg.news_max_age_s,
                session_start_epoch=cfg.session_start_epoch,
                end_lexicon=list(cfg.end_lexicon),
            ),
        )

    @app.post("/sessions", response_model=SessionInfo, status_code=201)
    async def create_session(request: CreateSessionRequest) -> SessionInfo:
        created_at = time.time()
        try:
            config = request.config.to_config(default_start_epoch=created_at)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        if request.feed_path is not None:
            try:
                feed = load_feed(request.feed_path)
            except (OSError, ValueError) as exc:
                raise HTTPException(status_code=422, detail=f"feed: {exc}") from exc
        else:
            feed = [FeedEvent(kind=e.kind, text=e.text, t=e.t, confidence=e.confidence)
                    for e in (request.feed or [])]
        assets = ScenarioAssets(
            vectors=settings.vectors, templates=settings.templates,
            stopwords=settings.stopwords, user_dictionary=settings.user_dictionary,
            generative_url=settings.generative_url,
        )
        session = build_session(config, assets, store=store, corpus=corpus,
                                engine_records=engine_records)
        session_id = uuid.uuid4().hex[:12]
        runtime = SessionRuntime(
            session_id=session_id, session=session, feed=feed,
            speedup=request.speedup,
            transcript_path=settings.data_dir / f"{session_id}.jsonl",
            created_at=created_at,
        )
        registry[session_id] = runtime
        runtime.start()
        return _info(runtime)

    @app.get("/sessions", response_model=list[SessionInfo])
    async def list_sessions() -> list[SessionInfo]:
        return [_info(rt) for rt in registry.values()]

    @app.get("/sessions/{session_id}", response_model=SessionInfo)
    async def get_session(session_id: str) -> SessionInfo:
        return _info(_runtime(session_id))

    @app.post("/sessions/{session_id}/message", response_model=AckResponse,
              status_code=202)
    async def post_message(session_id: str, request: MessageRequest) -> AckResponse:
        runtime = _running(session_id)
        await runtime.post_message(request.text)
        return AckResponse(detail="queued")

    @app.post("/sessions/{session_id}/feed", response_model=AckResponse,
              status_code=202)
    async def post_feed(session_id: str, event: FeedEventModel) -> AckResponse:
        runtime = _running(session_id)
        try:
            feed_event = FeedEvent(kind=event.kind, text=event.text, t=event.t,
                                   confidence=event.confidence)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        if feed_event.t < runtime.feed_watermark:
            raise HTTPException(
                status_code=422,
                detail=f"feed timestamps must be non-decreasing "
                       f"(watermark {runtime.feed_watermark})",
            )
        await runtime.post_feed(feed_event)
        return AckResponse(detail="queued")

    @app.post("/sessions/{session_id}/cancel", response_model=AckResponse)
    async def cancel_session_speech(session_id: str) -> AckResponse:
        runtime = _running(session_id)
        await runtime.post_cancel()
        return AckResponse(detail="cancel queued")

    @app.post("/sessions/{session_id}/end", response_model=AckResponse)
    async def end_session(session_id: str) -> AckResponse:
        runtime = _runtime(session_id)
        if runtime.status == ENDED:
            return AckResponse(detail="already ended")
        await runtime.end()
        return AckResponse(detail="ended")

    @app.get("/sessions/{session_id}/transcript")
    async def get_transcript(session_id: str, format: str = "json"):
        runtime = _runtime(session_id)
        entries = list(runtime.session.transcript)
        if format == "jsonl":
            body = "".join(e.to_json() + "\n" for e in entries)
            return PlainTextResponse(body, media_type="application/x-ndjson")
        return [json.loads(e.to_json()) for e in entries]

    @app.get("/sessions/{session_id}/stats", response_model=StatsResponse)
    async def get_stats(session_id: str) -> StatsResponse:
        runtime = _runtime(session_id)
        stats = turn_stats(runtime.session.transcript)
        return StatsResponse(
            conversation_count=stats.conversation_count,
            turn_counts=stats.turn_counts,
            mean=stats.mean,
            max=stats.max,
            robot_mean=stats.robot_mean,
            robot_max=stats.robot_max,
        )

    @app.get("/sessions/{session_id}/events")
    async def subscribe_events(session_id: str, cursor: int = 0):
        runtime = _runtime(session_id)

        async def generate():
            async for event in runtime.events_since(cursor):
                yield _sse_chunk(event)

        return StreamingResponse(generate(), media_type="text/event-stream")

    @app.get("/sessions/{session_id}/events/records",
             response_model=list[EventRecord])
    async def list_events(session_id: str, cursor: int = 0) -> list[EventRecord]:
        runtime = _runtime(session_id)
        records = []
        for event in runtime.events[cursor:]:
            data = {k: v for k, v in event.items() if k not in ("seq", "type")}
            records.append(EventRecord(seq=event["seq"], type=event["type"], data=data))
        return records

    frontend = settings.frontend_dist
    if frontend is not None and frontend.exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=frontend, html=True), name="ui")

    return app
