"""Topic-linked conversation management across multiple dialog engines.

Retrieval engines (TV program, daily life, news/SNS) unlock cumulatively as
the conversation progresses; candidates are scored by WMD similarity between
the latest robot/user utterance pair and each candidate's cue, with a relaxed
lower bound for pruning. When the best similarity falls below the threshold,
a generative engine answers instead.
"""

from __future__ import annotations

import datetime as _dt
import json
import logging
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Protocol, Sequence

from .embeddings import EmbeddingStore
from .keywords import SimpleTokenizer, Tokenizer
from .wmd import WeightedDoc, nbow, relaxed_wmd, to_similarity, wmd

logger = logging.getLogger(__name__)

TV_PROGRAM = "tv_program"
DAILY_LIFE = "daily_life"
NEWS_SNS = "news_sns"
GENERATIVE = "generative"

ENGINE_ORDER = (TV_PROGRAM, DAILY_LIFE, NEWS_SNS)

DEFAULT_ACKNOWLEDGMENTS = ("I see.", "Is that so?", "Tell me more.")

DEFAULT_WMD_THRESHOLD = 0.35
DEFAULT_NEWS_MAX_AGE_S = 7 * 86400.0
DEFAULT_CANDIDATE_CAP = 50


@dataclass(frozen=True)
class DialogContext:
    """The latest robot/user utterance pair plus the turn index within a conversation."""

    turn_index: int
    last_robot_utterance: str
    last_user_utterance: str
    topic_keyword: str | None = None

    def __post_init__(self) -> None:
        if self.turn_index < 1:
            raise ValueError(f"turn_index must be >= 1, got {self.turn_index}")


@dataclass(frozen=True)
class Candidate:
    cue: str
    reply: str
    timestamp: float | None = None


@dataclass(frozen=True)
class ScoredCandidate:
    """A chosen reply; similarity/distance are None for generative fallbacks."""

    reply: str
    engine: str
    similarity: float | None
    distance: float | None


class DialogEngine(Protocol):
    engine_id: str

    def candidates(self, context: DialogContext) -> Sequence[Candidate]: ...


def available_engines(turn_index: int) -> tuple[str, ...]:
    """Engines unlocked at a turn: tv_program first, then daily_life, then news_sns.

    The generative engine is never in this set; it is the below-threshold
    fallback.
    """
    if turn_index < 1:
        raise ValueError(f"turn_index must be >= 1, got {turn_index}")
    if turn_index == 1:
        return (TV_PROGRAM,)
    if turn_index == 2:
        return (TV_PROGRAM, DAILY_LIFE)
    return ENGINE_ORDER


def _parse_timestamp(value: object) -> float | None:
    if value is None:
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return _dt.datetime.fromisoformat(value.replace("Z", "+00:00")).timestamp()
    raise ValueError(f"unsupported timestamp value: {value!r}")


def load_engine_corpus(path: str | Path) -> list[Candidate]:
    """JSON-lines retrieval corpus: {cue, reply, timestamp?} per line."""
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                records.append(Candidate(
                    cue=str(obj["cue"]),
                    reply=str(obj["reply"]),
                    timestamp=_parse_timestamp(obj.get("timestamp")),
                ))
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    return records


class RetrievalEngine:
    """Deterministic candidate source backed by a fixed corpus."""

    def __init__(self, engine_id: str, records: Sequence[Candidate]):
        self.engine_id = engine_id
        self._records = tuple(records)

    def candidates(self, context: DialogContext) -> Sequence[Candidate]:
        return self._records


class BuiltinGenerative:
    """Deterministic acknowledgment picker standing in for a generative model."""

    engine_id = GENERATIVE

    def __init__(self, replies: Sequence[str] = DEFAULT_ACKNOWLEDGMENTS):
        if not replies:
            raise ValueError("at least one acknowledgment reply is required")
        self.replies = tuple(replies)

    def reply(self, context: DialogContext) -> str:
        text = context.last_user_utterance
        if not text:
            return self.replies[0]
        index = zlib.crc32(text.encode("utf-8")) % len(self.replies)
        return self.replies[index]


class RemoteGenerative:
    """Client for an external generative endpoint; falls back to the builtin.

    Contract: POST {"context_text": ...} -> {"reply": ...} with a 2 s timeout.
    """

    engine_id = GENERATIVE

    def __init__(self, url: str, fallback: BuiltinGenerative | None = None,
                 timeout_s: float = 2.0):
        self.url = url
        self.timeout_s = timeout_s
        self.fallback = fallback or BuiltinGenerative()

    def reply(self, context: DialogContext) -> str:
        import httpx

        text = f"{context.last_robot_utterance} {context.last_user_utterance}".strip()
        try:
            response = httpx.post(self.url, json={"context_text": text},
                                  timeout=self.timeout_s)
            response.raise_for_status()
            reply = response.json().get("reply")
            if isinstance(reply, str) and reply:
                return reply
            logger.warning("generative endpoint returned no reply; using builtin")
        except Exception as exc:  # noqa: BLE001 - any endpoint failure falls back
            logger.warning("generative endpoint failed (%s); using builtin", exc)
        return self.fallback.reply(context)


class DialogManager:
    """Scores retrieval candidates against the context and applies the fallback."""

    def __init__(
        self,
        store: EmbeddingStore,
        engines: Mapping[str, DialogEngine],
        generative: BuiltinGenerative | RemoteGenerative | None = None,
        tokenizer: Tokenizer | None = None,
        wmd_threshold: float = DEFAULT_WMD_THRESHOLD,
        news_max_age_s: float = DEFAULT_NEWS_MAX_AGE_S,
        session_start_epoch: float = 0.0,
        candidate_cap: int = DEFAULT_CANDIDATE_CAP,
    ):
        unknown = set(engines) - set(ENGINE_ORDER)
        if unknown:
            raise ValueError(f"unknown engine ids: {sorted(unknown)}")
        self.store = store
        self.engines = dict(engines)
        self.generative = generative or BuiltinGenerative()
        self.tokenizer = tokenizer or SimpleTokenizer()
        self.wmd_threshold = wmd_threshold
        self.news_max_age_s = news_max_age_s
        self.session_start_epoch = session_start_epoch
        self.candidate_cap = candidate_cap
        self._cue_docs: dict[str, WeightedDoc | None] = {}

    def _cue_doc(self, cue: str) -> WeightedDoc | None:
        if cue not in self._cue_docs:
            tokens = self.tokenizer.tokenize(cue)
            try:
                self._cue_docs[cue] = nbow(tokens, self.store) if tokens else None
            except ValueError:
                self._cue_docs[cue] = None
        return self._cue_docs[cue]

    def _generative_reply(self, context: DialogContext) -> ScoredCandidate:
        return ScoredCandidate(reply=self.generative.reply(context),
                               engine=GENERATIVE, similarity=None, distance=None)

    def respond(self, context: DialogContext, prune: bool = True) -> ScoredCandidate:
        """Best retrieval reply if it clears the similarity threshold, else generative.

        Candidates come from the engines unlocked at the context's turn index;
        ties break by engine order then candidate index. Stale news candidates
        (older than news_max_age_s before session start) are never returned.
        """
        if not self.engines and self.generative is None:
            raise ValueError("no engines registered")
        tokens = self.tokenizer.tokenize(
            f"{context.last_robot_utterance} {context.last_user_utterance}"
        )
        try:
            context_doc = nbow(tokens, self.store)
        except ValueError:
            return self._generative_reply(context)

        news_cutoff = self.session_start_epoch - self.news_max_age_s
        scored: list[tuple[int, int, Candidate, WeightedDoc, float]] = []
        for rank, engine_id in enumerate(available_engines(context.turn_index)):
            engine = self.engines.get(engine_id)
            if engine is None:
                continue
            entries = []
            for index, cand in enumerate(engine.candidates(context)):
                if (engine_id == NEWS_SNS and cand.timestamp is not None
                        and cand.timestamp < news_cutoff):
                    continue
                cue_doc = self._cue_doc(cand.cue)
                if cue_doc is None:
                    continue
                bound = relaxed_wmd(context_doc, cue_doc, self.store) if prune else 0.0
                entries.append((rank, index, cand, cue_doc, bound))
            if prune and len(entries) > self.candidate_cap:
                entries.sort(key=lambda e: (e[4], e[1]))
                entries = entries[: self.candidate_cap]
                entries.sort(key=lambda e: e[1])
            scored.extend(entries)

        best: tuple[float, int, int, Candidate] | None = None
        for rank, index, cand, cue_doc, bound in scored:
            if prune and best is not None and bound >= best[0]:
                continue  # lower bound already rules this candidate out
            distance, _ = wmd(context_doc, cue_doc, self.store)
            if best is None or distance < best[0]:
                best = (distance, rank, index, cand)

        if best is not None:
            distance = best[0]
            similarity = to_similarity(distance)
            if similarity >= self.wmd_threshold:
                return ScoredCandidate(reply=best[3].reply,
                                       engine=available_engines(context.turn_index)[best[1]],
                                       similarity=similarity, distance=distance)
        return self._generative_reply(context)
