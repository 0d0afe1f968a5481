"""Keyword extraction from the simulated TV feed.

Caption lines are tokenized, filtered against a stopword list and the
embedding vocabulary, and pooled; object-detection labels are pooled directly
when their confidence clears the threshold. Selection is cooldown-aware so a
keyword is not reused for a configurable number of robot utterances.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol

from .embeddings import EmbeddingStore

logger = logging.getLogger(__name__)

CAPTION = "caption"
DETECTION = "detection"

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass
class FeedEvent:
    """One item from the TV feed: a caption line or a detection label."""

    kind: str
    text: str
    t: float = 0.0
    confidence: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in (CAPTION, DETECTION):
            raise ValueError(f"unknown feed event kind: {self.kind!r}")
        if self.kind == CAPTION and not self.text.strip():
            raise ValueError("caption text must be non-empty")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")
        if self.kind == CAPTION:
            self.confidence = 1.0

    @classmethod
    def from_json(cls, line: str) -> "FeedEvent":
        obj = json.loads(line)
        return cls(
            kind=obj["kind"],
            text=obj["text"],
            t=float(obj.get("t", 0.0)),
            confidence=float(obj.get("confidence", 1.0)),
        )


@dataclass
class Keyword:
    """An extracted surface form with provenance and cooldown state."""

    surface: str
    source: str
    first_seen: float
    occurrences: int = 1
    cooldown_until_utterance: int = 0


class Tokenizer(Protocol):
    def tokenize(self, text: str) -> list[str]: ...


class SimpleTokenizer:
    """Lowercase, split on whitespace/punctuation; protect dictionary entries.

    Multiword user-dictionary entries are matched greedily (longest first, at
    word boundaries) and emitted as single tokens before the generic split.
    """

    def __init__(self, user_dictionary: Iterable[str] = ()):
        entries = sorted({e.strip().lower() for e in user_dictionary if e.strip()},
                         key=lambda e: (-len(e), e))
        self.user_dictionary: tuple[str, ...] = tuple(entries)
        if entries:
            pattern = "|".join(re.escape(e) for e in entries)
            self._dict_re: re.Pattern[str] | None = re.compile(rf"\b(?:{pattern})\b")
        else:
            self._dict_re = None

    def tokenize(self, text: str) -> list[str]:
        text = text.lower()
        if self._dict_re is None:
            return _WORD_RE.findall(text)
        tokens: list[str] = []
        pos = 0
        for match in self._dict_re.finditer(text):
            tokens.extend(_WORD_RE.findall(text[pos:match.start()]))
            tokens.append(match.group(0))
            pos = match.end()
        tokens.extend(_WORD_RE.findall(text[pos:]))
        return tokens


def tokenize_default(text: str, user_dictionary: Iterable[str] = ()) -> list[str]:
    return SimpleTokenizer(user_dictionary).tokenize(text)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One stopword per line; blank lines ignored; an empty file is legal."""
    words = set()
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            word = line.strip().lower()
            if word:
                words.add(word)
    return frozenset(words)


def load_user_dictionary(path: str | Path) -> tuple[str, ...]:
    """One protected surface per line, matched before splitting."""
    entries = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            entry = line.strip()
            if entry:
                entries.append(entry)
    return tuple(entries)


def load_feed(path: str | Path) -> list[FeedEvent]:
    """JSON-lines feed file: {t, kind, text, confidence?} per line."""
    events = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                events.append(FeedEvent.from_json(line))
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    for prev, cur in zip(events, events[1:]):
        if cur.t < prev.t:
            raise ValueError(f"{path}: feed timestamps must be non-decreasing")
    return events


@dataclass
class KeywordPool:
    """Per-session pool of candidate keywords with cooldown-aware selection."""

    store: EmbeddingStore
    stopwords: frozenset[str] = frozenset()
    tokenizer: Tokenizer = field(default_factory=SimpleTokenizer)
    min_confidence: float = 0.5
    cooldown_utterances: int = 10
    keywords: dict[str, Keyword] = field(default_factory=dict)

    def ingest(self, event: FeedEvent) -> list[str]:
        """Fold a feed event into the pool; returns surfaces newly added."""
        if event.kind == DETECTION:
            if event.confidence < self.min_confidence:
                logger.debug("dropping low-confidence detection %r (%.2f)",
                             event.text, event.confidence)
                return []
            surface = event.text.strip().lower()
            if not surface or surface in self.stopwords:
                return []
            return self._upsert(surface, DETECTION, event.t)
        added: list[str] = []
        for token in self.tokenizer.tokenize(event.text):
            if token in self.stopwords or token not in self.store:
                continue
            added.extend(self._upsert(token, CAPTION, event.t))
        return added

    def _upsert(self, surface: str, source: str, t: float) -> list[str]:
        existing = self.keywords.get(surface)
        if existing is not None:
            existing.occurrences += 1
            return []
        self.keywords[surface] = Keyword(surface=surface, source=source, first_seen=t)
        return [surface]

    def next_keyword(self, current_utterance_seq: int) -> Keyword | None:
        """Highest-priority keyword whose cooldown has expired, or None.

        Priority: most recent first_seen, then higher occurrences, then
        lexicographic. The winner's cooldown is stamped forward.
        """
        eligible = [
            kw for kw in self.keywords.values()
            if kw.cooldown_until_utterance <= current_utterance_seq
        ]
        if not eligible:
            return None
        eligible.sort(key=lambda kw: (-kw.first_seen, -kw.occurrences, kw.surface))
        winner = eligible[0]
        winner.cooldown_until_utterance = current_utterance_seq + self.cooldown_utterances
        return winner
