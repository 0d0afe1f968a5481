"""The two-mode robot session: TV watching and conversing.

While TV watching, the robot speaks at Poisson-scheduled intervals, drawing a
disclosure or a question at the configured ratio and filling a template with
the next available keyword. A question switches the session into conversation
mode, where user utterances are answered by the dialog manager until an end
condition fires: user end-intent, more than ``max_no_answer`` consecutive
silences, or cancel.

The session runs on a logical clock (seconds). It is a single-writer state
machine: drivers — the scripted simulation or the service loop — serialize
all calls. Everything is deterministic for a fixed seed.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from typing import Callable

from .dialog import DialogContext, DialogManager
from .embeddings import EmbeddingStore
from .keywords import FeedEvent, KeywordPool, CAPTION
from .templates import (
    DISCLOSURE,
    QUESTION,
    RESPONSE,
    TemplateCorpus,
    realize,
    select_template,
)

logger = logging.getLogger(__name__)

TV_WATCHING = "TVWatching"
CONVERSING = "Conversing"

END_INTENT = "end_intent"
NO_ANSWER = "no_answer"
CANCEL = "cancel"

DEFAULT_END_LEXICON = ("bye", "stop", "let's watch", "that's enough")


@dataclass
class SessionConfig:
    mean_interval_s: float = 80.0
    disclosure_ratio: float = 0.75
    silence_timeout_s: float = 15.0
    max_no_answer: int = 2
    wmd_threshold: float = 0.35
    cooldown_utterances: int = 10
    rng_seed: int = 0
    min_confidence: float = 0.5
    news_max_age_s: float = 7 * 86400.0
    session_start_epoch: float = 0.0
    end_lexicon: tuple[str, ...] = DEFAULT_END_LEXICON

    def __post_init__(self) -> None:
        if not self.mean_interval_s > 0:
            raise ValueError(f"mean_interval_s must be > 0, got {self.mean_interval_s}")
        if not 0.0 < self.disclosure_ratio < 1.0:
            raise ValueError(f"disclosure_ratio must be in (0, 1), got {self.disclosure_ratio}")
        if not self.silence_timeout_s > 0:
            raise ValueError(f"silence_timeout_s must be > 0, got {self.silence_timeout_s}")
        if self.max_no_answer < 0:
            raise ValueError(f"max_no_answer must be >= 0, got {self.max_no_answer}")
        if self.cooldown_utterances < 0:
            raise ValueError(f"cooldown_utterances must be >= 0, got {self.cooldown_utterances}")
        self.end_lexicon = tuple(e.lower() for e in self.end_lexicon)


@dataclass
class TranscriptEntry:
    t: float
    speaker: str  # robot | user | system
    text: str
    kind: str  # disclosure | question | response | user | event
    engine: str | None = None
    conversation_id: int | None = None
    similarity: float | None = None
    keyword: str | None = None
    cause: str | None = None
    repeat: bool = False

    def to_json(self) -> str:
        payload: dict[str, object] = {
            "t": self.t,
            "speaker": self.speaker,
            "text": self.text,
            "kind": self.kind,
        }
        if self.engine is not None:
            payload["engine"] = self.engine
        if self.conversation_id is not None:
            payload["conversation_id"] = self.conversation_id
        if self.similarity is not None:
            payload["similarity"] = self.similarity
        if self.keyword is not None:
            payload["keyword"] = self.keyword
        if self.cause is not None:
            payload["cause"] = self.cause
        if self.repeat:
            payload["repeat"] = True
        return json.dumps(payload, ensure_ascii=False)

    @classmethod
    def from_dict(cls, obj: dict) -> "TranscriptEntry":
        return cls(
            t=float(obj["t"]),
            speaker=obj["speaker"],
            text=obj["text"],
            kind=obj["kind"],
            engine=obj.get("engine"),
            conversation_id=obj.get("conversation_id"),
            similarity=obj.get("similarity"),
            keyword=obj.get("keyword"),
            cause=obj.get("cause"),
            repeat=bool(obj.get("repeat", False)),
        )


def schedule_next(now: float, mean_interval_s: float, rng: random.Random) -> float:
    """Next utterance time: exponential inter-arrival with the given mean.

    Draws are clamped to [1 s, 10 x mean] so the robot neither machine-guns
    nor falls silent for hours (the lower clamp shrinks for sub-second means).
    """
    if not mean_interval_s > 0:
        raise ValueError(f"mean_interval_s must be > 0, got {mean_interval_s}")
    delta = rng.expovariate(1.0 / mean_interval_s)
    upper = 10.0 * mean_interval_s
    lower = min(1.0, upper)
    delta = min(max(delta, lower), upper)
    return now + delta


def draw_utterance_kind(rng: random.Random, disclosure_ratio: float) -> str:
    return DISCLOSURE if rng.random() < disclosure_ratio else QUESTION


class Session:
    """Single TV-watching session; all calls must come from one driver."""

    def __init__(
        self,
        config: SessionConfig,
        store: EmbeddingStore,
        pool: KeywordPool,
        corpus: TemplateCorpus,
        dialog: DialogManager,
        transcript_sink: Callable[[TranscriptEntry], None] | None = None,
    ):
        self.config = config
        self.store = store
        self.pool = pool
        self.corpus = corpus
        self.dialog = dialog
        self.transcript_sink = transcript_sink
        self.rng = random.Random(config.rng_seed)

        self.mode = TV_WATCHING
        self.clock = 0.0
        self.utterance_seq = 0
        self.no_answer_count = 0
        self.conversation_turn = 0
        self.conversation_id = 0
        self.transcript: list[TranscriptEntry] = []
        self.keyword_uses: list[tuple[str, int]] = []
        self.next_utterance_at = schedule_next(0.0, config.mean_interval_s, self.rng)
        self.silence_deadline: float | None = None
        self._pending: TranscriptEntry | None = None  # robot line awaiting an answer
        self._topic_keyword: str | None = None
        self._last_feed_t = 0.0

    # -- helpers ---------------------------------------------------------

    def _append(self, entry: TranscriptEntry) -> None:
        self.transcript.append(entry)
        if self.transcript_sink is not None:
            self.transcript_sink(entry)

    def _robot_event(self, entry: TranscriptEntry) -> dict:
        event: dict[str, object] = {
            "type": "robot_utterance",
            "t": entry.t,
            "text": entry.text,
            "kind": entry.kind,
        }
        if entry.engine is not None:
            event["engine"] = entry.engine
        if entry.similarity is not None:
            event["similarity"] = entry.similarity
        if entry.keyword is not None:
            event["keyword"] = entry.keyword
        if entry.conversation_id is not None:
            event["conversation_id"] = entry.conversation_id
        return event

    def next_deadline(self) -> float | None:
        """Next logical time at which tick() has work to do."""
        if self.mode == TV_WATCHING:
            return self.next_utterance_at
        return self.silence_deadline

    def conversation_turns(self, conversation_id: int) -> int:
        """Turn count: utterances by either party within one conversation."""
        return sum(
            1 for e in self.transcript
            if e.conversation_id == conversation_id and e.speaker in ("robot", "user")
        )

    # -- feed ingestion ----------------------------------------------------

    def ingest_feed(self, event: FeedEvent) -> list[dict]:
        if event.t < self._last_feed_t:
            raise ValueError(
                f"feed timestamps must be non-decreasing ({event.t} < {self._last_feed_t})"
            )
        self._last_feed_t = event.t
        events: list[dict] = []
        if event.kind == CAPTION:
            events.append({"type": "caption_shown", "t": event.t, "text": event.text})
        for surface in self.pool.ingest(event):
            events.append({
                "type": "keyword_extracted",
                "t": event.t,
                "surface": surface,
                "source": event.kind,
            })
        return events

    # -- main entry points -------------------------------------------------

    def tick(self, now: float) -> list[dict]:
        """Advance the session to logical time ``now``, firing due work."""
        if now < self.clock - 1e-9:
            raise ValueError(f"time went backwards: {now} < {self.clock}")
        self.clock = max(self.clock, now)
        events: list[dict] = []
        while True:
            if self.mode == TV_WATCHING and self.next_utterance_at <= now:
                events.extend(self._utterance_slot(self.next_utterance_at))
            elif (self.mode == CONVERSING and self.silence_deadline is not None
                  and self.silence_deadline <= now):
                events.extend(self._silence_elapsed(self.silence_deadline))
            else:
                break
        return events

    def on_user_utterance(self, text: str, now: float) -> list[dict]:
        """Handle user speech; in TV-watching mode it is transcribed, not answered."""
        events = self.tick(now)
        if not text.strip():
            if self.mode == CONVERSING:
                events.extend(self._silence_elapsed(now))
            return events

        entry = TranscriptEntry(
            t=now, speaker="user", text=text, kind="user",
            conversation_id=self.conversation_id if self.mode == CONVERSING else None,
        )
        self._append(entry)
        events.append({
            "type": "user_utterance", "t": now, "text": text,
            "conversation_id": entry.conversation_id,
        })
        if self.mode != CONVERSING:
            return events

        self.no_answer_count = 0
        lowered = text.lower()
        if any(phrase in lowered for phrase in self.config.end_lexicon):
            events.extend(self._end_conversation(now, END_INTENT))
            return events

        context = DialogContext(
            turn_index=self.conversation_turn,
            last_robot_utterance=self._pending.text if self._pending else "",
            last_user_utterance=text,
            topic_keyword=self._topic_keyword,
        )
        chosen = self.dialog.respond(context)
        reply = TranscriptEntry(
            t=now, speaker="robot", text=chosen.reply, kind=RESPONSE,
            engine=chosen.engine, similarity=chosen.similarity,
            conversation_id=self.conversation_id,
        )
        self._append(reply)
        events.append(self._robot_event(reply))
        self.conversation_turn += 1
        self._pending = reply
        self.silence_deadline = now + self.config.silence_timeout_s
        return events

    def cancel(self, now: float) -> list[dict]:
        """Suppress pending speech; end any conversation; return to TV watching."""
        events = self.tick(now)
        note = TranscriptEntry(
            t=now, speaker="system", text="cancelled", kind="event", cause=CANCEL,
            conversation_id=self.conversation_id if self.mode == CONVERSING else None,
        )
        self._append(note)
        events.append({"type": "system_note", "t": now, "text": note.text, "cause": CANCEL})
        if self.mode == CONVERSING:
            events.extend(self._end_conversation(now, CANCEL))
        else:
            self.next_utterance_at = schedule_next(
                now, self.config.mean_interval_s, self.rng
            )
        return events

    # -- internals ---------------------------------------------------------

    def _utterance_slot(self, at: float) -> list[dict]:
        """One scheduled TV-watching utterance opportunity.

        The slot counter advances even when no keyword is available, so
        cooldowns measured in robot utterances can expire while the pool is
        exhausted.
        """
        events: list[dict] = []
        self.utterance_seq += 1
        kind = draw_utterance_kind(self.rng, self.config.disclosure_ratio)
        keyword = self.pool.next_keyword(self.utterance_seq)
        if keyword is None:
            logger.debug("slot %d at %.1fs: no keyword available, skipping",
                         self.utterance_seq, at)
        else:
            template = select_template(keyword, kind, self.corpus, self.store)
            utterance = realize(template, keyword)
            self.keyword_uses.append((keyword.surface, self.utterance_seq))
            conversation_id = None
            if kind == QUESTION:
                self.conversation_id += 1
                conversation_id = self.conversation_id
            entry = TranscriptEntry(
                t=at, speaker="robot", text=utterance.text, kind=kind,
                keyword=keyword.surface, conversation_id=conversation_id,
            )
            self._append(entry)
            events.append(self._robot_event(entry))
            if kind == QUESTION:
                self.mode = CONVERSING
                self.conversation_turn = 1
                self.no_answer_count = 0
                self._pending = entry
                self._topic_keyword = keyword.surface
                self.silence_deadline = at + self.config.silence_timeout_s
                events.append({
                    "type": "mode_changed", "t": at,
                    "from": TV_WATCHING, "to": CONVERSING, "cause": "question",
                })
        self.next_utterance_at = schedule_next(at, self.config.mean_interval_s, self.rng)
        return events

    def _silence_elapsed(self, at: float) -> list[dict]:
        events: list[dict] = []
        self.no_answer_count += 1
        if self.no_answer_count > self.config.max_no_answer:
            events.extend(self._end_conversation(at, NO_ANSWER))
            return events
        if self._pending is not None:
            repeat = TranscriptEntry(
                t=at, speaker="robot", text=self._pending.text, kind=self._pending.kind,
                engine=self._pending.engine, similarity=self._pending.similarity,
                conversation_id=self.conversation_id, repeat=True,
            )
            self._append(repeat)
            events.append(self._robot_event(repeat))
        self.silence_deadline = at + self.config.silence_timeout_s
        return events

    def _end_conversation(self, at: float, cause: str) -> list[dict]:
        ended_id = self.conversation_id
        turns = self.conversation_turns(ended_id)
        entry = TranscriptEntry(
            t=at, speaker="system", text=f"conversation ended ({cause})", kind="event",
            cause=cause, conversation_id=ended_id,
        )
        self._append(entry)
        self.mode = TV_WATCHING
        self.conversation_turn = 0
        self.no_answer_count = 0
        self.silence_deadline = None
        self._pending = None
        self._topic_keyword = None
        self.next_utterance_at = schedule_next(at, self.config.mean_interval_s, self.rng)
        return [
            {"type": "conversation_ended", "t": at, "turns": turns,
             "cause": cause, "conversation_id": ended_id},
            {"type": "mode_changed", "t": at,
             "from": CONVERSING, "to": TV_WATCHING, "cause": cause},
        ]
