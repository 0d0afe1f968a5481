"""Scripted end-to-end simulations on the logical clock.

A scenario JSON document bundles a feed, a user script, config overrides, a
seed, and optional asset overrides. The runner replays it event-driven (no
wall clock), so equal seeds give byte-identical transcripts.

Script steps:
  {"trigger": "after_robot_question", "text": "...", "delay_s": 2.0}
  {"trigger": "after_robot_question", "silence": true}
  {"trigger": "at_time", "at": 120.0, "text": "..."}

``after_robot_question`` steps are consumed in order, one per robot utterance
that awaits an answer (the opening question, in-conversation replies, and
re-asks all arm the answer timer). A silence step schedules no reply, letting
the timeout fire.
"""

from __future__ import annotations

import heapq
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

from .assets import asset_path
from .dialog import (
    ENGINE_ORDER,
    BuiltinGenerative,
    DialogManager,
    RemoteGenerative,
    RetrievalEngine,
    load_engine_corpus,
)
from .embeddings import EmbeddingStore, load_vectors
from .keywords import (
    FeedEvent,
    KeywordPool,
    SimpleTokenizer,
    load_feed,
    load_stopwords,
    load_user_dictionary,
)
from .session import CONVERSING, Session, SessionConfig, TranscriptEntry
from .stats import TurnStats, turn_stats
from .templates import TemplateCorpus, load_templates

logger = logging.getLogger(__name__)

AFTER_ROBOT_QUESTION = "after_robot_question"
AT_TIME = "at_time"


@dataclass
class ScriptStep:
    trigger: str
    text: str | None = None  # None means scripted silence
    delay_s: float = 2.0
    at: float | None = None

    def __post_init__(self) -> None:
        if self.trigger not in (AFTER_ROBOT_QUESTION, AT_TIME):
            raise ValueError(f"unknown trigger: {self.trigger!r}")
        if self.delay_s < 0:
            raise ValueError(f"delay_s must be >= 0, got {self.delay_s}")
        if self.trigger == AT_TIME:
            if self.at is None:
                raise ValueError("at_time step requires 'at'")
            if self.text is None:
                raise ValueError("at_time step requires 'text'")


@dataclass
class ScenarioAssets:
    vectors: Path = field(default_factory=lambda: asset_path("vectors.txt"))
    templates: Path = field(default_factory=lambda: asset_path("templates.tsv"))
    stopwords: Path = field(default_factory=lambda: asset_path("stopwords.txt"))
    user_dictionary: Path | None = None
    engines: dict[str, Path] = field(default_factory=lambda: {
        engine_id: asset_path("engines", f"{engine_id}.jsonl")
        for engine_id in ENGINE_ORDER
    })
    generative_url: str | None = None


@dataclass
class Scenario:
    feed: list[FeedEvent]
    script: list[ScriptStep]
    config: SessionConfig
    duration_s: float
    assets: ScenarioAssets = field(default_factory=ScenarioAssets)


def load_scenario(path: str | Path, seed_override: int | None = None) -> Scenario:
    base = Path(path).parent
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)

    feed_spec = doc.get("feed", [])
    if isinstance(feed_spec, str):
        feed_path = Path(feed_spec)
        if not feed_path.is_absolute():
            feed_path = base / feed_path
        feed = load_feed(feed_path)
    else:
        feed = [FeedEvent(kind=e["kind"], text=e["text"], t=float(e.get("t", 0.0)),
                          confidence=float(e.get("confidence", 1.0)))
                for e in feed_spec]
        for prev, cur in zip(feed, feed[1:]):
            if cur.t < prev.t:
                raise ValueError("inline feed timestamps must be non-decreasing")

    script = []
    for raw in doc.get("user_script", []):
        text = None if raw.get("silence") else raw.get("text")
        script.append(ScriptStep(
            trigger=raw.get("trigger", AFTER_ROBOT_QUESTION),
            text=text,
            delay_s=float(raw.get("delay_s", 2.0)),
            at=float(raw["at"]) if "at" in raw else None,
        ))

    overrides = dict(doc.get("config", {}))
    if "end_lexicon" in overrides:
        overrides["end_lexicon"] = tuple(overrides["end_lexicon"])
    if seed_override is not None:
        overrides["rng_seed"] = seed_override
    elif "seed" in doc:
        overrides.setdefault("rng_seed", int(doc["seed"]))
    config = SessionConfig(**overrides)

    assets = ScenarioAssets()
    raw_assets = doc.get("assets", {})

    def _resolve(value: str) -> Path:
        p = Path(value)
        return p if p.is_absolute() else base / p

    if "vectors" in raw_assets:
        assets.vectors = _resolve(raw_assets["vectors"])
    if "templates" in raw_assets:
        assets.templates = _resolve(raw_assets["templates"])
    if "stopwords" in raw_assets:
        assets.stopwords = _resolve(raw_assets["stopwords"])
    if "user_dictionary" in raw_assets:
        assets.user_dictionary = _resolve(raw_assets["user_dictionary"])
    for engine_id, engine_path in raw_assets.get("engines", {}).items():
        if engine_id not in ENGINE_ORDER:
            raise ValueError(f"unknown engine id in scenario assets: {engine_id!r}")
        assets.engines[engine_id] = _resolve(engine_path)

    duration = float(doc.get("duration_s", 3600.0))
    return Scenario(feed=feed, script=script, config=config,
                    duration_s=duration, assets=assets)


def build_session(
    config: SessionConfig,
    assets: ScenarioAssets,
    transcript_sink=None,
    store: EmbeddingStore | None = None,
    corpus: TemplateCorpus | None = None,
    engine_records: dict[str, list] | None = None,
) -> Session:
    """Wire a Session from loaded or to-be-loaded assets."""
    if store is None:
        store = load_vectors(assets.vectors)
    if corpus is None:
        corpus = load_templates(assets.templates, store=store)
    stopwords = load_stopwords(assets.stopwords)
    dictionary = (load_user_dictionary(assets.user_dictionary)
                  if assets.user_dictionary else ())
    tokenizer = SimpleTokenizer(dictionary)
    pool = KeywordPool(
        store=store, stopwords=stopwords, tokenizer=tokenizer,
        min_confidence=config.min_confidence,
        cooldown_utterances=config.cooldown_utterances,
    )
    if engine_records is None:
        engine_records = {
            engine_id: load_engine_corpus(path)
            for engine_id, path in assets.engines.items()
            if path is not None and Path(path).exists()
        }
    engines = {
        engine_id: RetrievalEngine(engine_id, records)
        for engine_id, records in engine_records.items()
    }
    generative = (RemoteGenerative(assets.generative_url)
                  if assets.generative_url else BuiltinGenerative())
    manager = DialogManager(
        store=store, engines=engines, generative=generative, tokenizer=tokenizer,
        wmd_threshold=config.wmd_threshold, news_max_age_s=config.news_max_age_s,
        session_start_epoch=config.session_start_epoch,
    )
    return Session(config=config, store=store, pool=pool, corpus=corpus,
                   dialog=manager, transcript_sink=transcript_sink)


@dataclass
class SimulationResult:
    session: Session
    events: list[dict]
    stats: TurnStats

    @property
    def transcript(self) -> list[TranscriptEntry]:
        return self.session.transcript

    def summary(self) -> dict:
        return {
            "conversations": self.stats.conversation_count,
            "turns_per_conversation": self.stats.turn_counts,
            "mean_turns": self.stats.mean,
            "max_turns": self.stats.max,
            "robot_mean_turns": self.stats.robot_mean,
            "utterance_slots": self.session.utterance_seq,
            "keyword_uses": list(self.session.keyword_uses),
        }


def run_scenario(
    scenario: Scenario, transcript_out: str | Path | IO[str] | None = None
) -> SimulationResult:
    """Replay a scenario on the logical clock; deterministic for a fixed seed."""
    own_handle = None
    sink = None
    if transcript_out is not None:
        if isinstance(transcript_out, (str, Path)):
            own_handle = open(transcript_out, "w", encoding="utf-8")
            handle = own_handle
        else:
            handle = transcript_out

        def sink(entry: TranscriptEntry) -> None:
            handle.write(entry.to_json() + "\n")
            handle.flush()

    try:
        session = build_session(scenario.config, scenario.assets, transcript_sink=sink)
        all_events: list[dict] = []
        script_queue = [s for s in scenario.script if s.trigger == AFTER_ROBOT_QUESTION]
        script_pos = 0
        pending_user: list[tuple[float, int, str]] = []  # heap: (time, order, text)
        order = 0
        for step in scenario.script:
            if step.trigger == AT_TIME:
                heapq.heappush(pending_user, (float(step.at), order, step.text or ""))
                order += 1
        feed = sorted(scenario.feed, key=lambda e: e.t)
        feed_idx = 0

        def consume_reply_steps(events: list[dict], at: float) -> None:
            """One script step per robot utterance that awaits an answer."""
            nonlocal script_pos, order
            if session.mode != CONVERSING:
                return
            for event in events:
                if event["type"] != "robot_utterance":
                    continue
                if script_pos >= len(script_queue):
                    return
                step = script_queue[script_pos]
                script_pos += 1
                if step.text is not None:
                    heapq.heappush(pending_user, (at + step.delay_s, order, step.text))
                    order += 1

        while True:
            candidates: list[tuple[float, int]] = []  # (time, priority)
            if feed_idx < len(feed):
                candidates.append((feed[feed_idx].t, 0))
            if pending_user:
                candidates.append((pending_user[0][0], 1))
            deadline = session.next_deadline()
            if deadline is not None:
                candidates.append((deadline, 2))
            if not candidates:
                break
            t, priority = min(candidates)
            if t > scenario.duration_s:
                break
            if priority == 0:
                batch = session.ingest_feed(feed[feed_idx])
                feed_idx += 1
            elif priority == 1:
                _, _, text = heapq.heappop(pending_user)
                batch = session.on_user_utterance(text, t)
            else:
                batch = session.tick(t)
            all_events.extend(batch)
            consume_reply_steps(batch, t)

        return SimulationResult(session=session, events=all_events,
                                stats=turn_stats(session.transcript))
    finally:
        if own_handle is not None:
            own_handle.close()
