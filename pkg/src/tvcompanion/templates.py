"""Template corpus management and utterance realization.

A template is a slotted sentence with a single ``***`` marker, a kind
(disclosure or question), and an anchor word that stands in for its topic.
Selection picks the template whose anchor is most cosine-similar to the
keyword; realization substitutes the keyword into the slot verbatim.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

from .embeddings import EmbeddingStore, cosine_similarity
from .keywords import Keyword

logger = logging.getLogger(__name__)

SLOT = "***"

DISCLOSURE = "disclosure"
QUESTION = "question"
RESPONSE = "response"

KINDS = (DISCLOSURE, QUESTION)

# Fallbacks used when a keyword is out of vocabulary, so detection labels
# always realize. Built directly, not loaded, so the corpus length rule does
# not apply to them.
DEFAULT_PATTERNS = {
    DISCLOSURE: "I am curious about ***",
    QUESTION: "What do you think about ***",
}


@dataclass(frozen=True)
class UtteranceTemplate:
    id: int
    kind: str
    anchor: str
    pattern: str


@dataclass
class Utterance:
    """A realized robot line: disclosure, question, or dialog response."""

    text: str
    kind: str
    keyword: str | None = None
    produced_at: float = 0.0
    engine: str | None = None

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("utterance text must be non-empty")
        if (self.kind == RESPONSE) != (self.engine is not None):
            raise ValueError("engine must be set exactly when kind is 'response'")


class TemplateCorpus:
    def __init__(self, templates: list[UtteranceTemplate], rejected_count: int = 0):
        self.templates = templates
        self.rejected_count = rejected_count
        self._by_kind: dict[str, list[UtteranceTemplate]] = {k: [] for k in KINDS}
        for tpl in templates:
            self._by_kind[tpl.kind].append(tpl)
        self._defaults = {
            kind: UtteranceTemplate(id=-1, kind=kind, anchor="", pattern=pattern)
            for kind, pattern in DEFAULT_PATTERNS.items()
        }

    def of_kind(self, kind: str) -> list[UtteranceTemplate]:
        return self._by_kind[kind]

    def default(self, kind: str) -> UtteranceTemplate:
        return self._defaults[kind]

    def __len__(self) -> int:
        return len(self.templates)


def _lines(source: str | Path | IO[str] | Iterable[str]) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as handle:
            yield from handle
    else:
        yield from source


def load_templates(
    source: str | Path | IO[str] | Iterable[str],
    store: EmbeddingStore | None = None,
    max_template_chars: int = 20,
) -> TemplateCorpus:
    """Load a tab-separated template file: ``kind<TAB>anchor<TAB>pattern``.

    Lines starting with ``#`` are comments. Records violating the one-slot or
    length rules (pattern minus slot longer than ``max_template_chars``) are
    rejected with a warning; when a store is given, anchors outside its
    vocabulary are rejected too.
    """
    templates: list[UtteranceTemplate] = []
    rejected = 0
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            logger.warning("template line %d rejected: expected 3 tab-separated fields", lineno)
            rejected += 1
            continue
        kind, anchor, pattern = (p.strip() for p in parts)
        if kind not in KINDS:
            logger.warning("template line %d rejected: unknown kind %r", lineno, kind)
            rejected += 1
            continue
        if pattern.count(SLOT) != 1:
            logger.warning("template line %d rejected: pattern must contain exactly one %r",
                           lineno, SLOT)
            rejected += 1
            continue
        if len(pattern.replace(SLOT, "")) > max_template_chars:
            logger.warning("template line %d rejected: pattern exceeds %d chars without slot",
                           lineno, max_template_chars)
            rejected += 1
            continue
        if store is not None and anchor not in store:
            logger.warning("template line %d rejected: anchor %r not in vocabulary",
                           lineno, anchor)
            rejected += 1
            continue
        templates.append(UtteranceTemplate(id=len(templates) + 1, kind=kind,
                                           anchor=anchor, pattern=pattern))
    if rejected:
        logger.warning("template load: rejected %d record(s)", rejected)
    if not templates:
        raise ValueError("template corpus has zero valid records")
    return TemplateCorpus(templates, rejected_count=rejected)


def dump_templates(corpus: TemplateCorpus) -> str:
    """Serialize accepted records back to the file format."""
    return "".join(f"{t.kind}\t{t.anchor}\t{t.pattern}\n" for t in corpus.templates)


def select_template(
    keyword: Keyword, kind: str, corpus: TemplateCorpus, store: EmbeddingStore
) -> UtteranceTemplate:
    """Template of the requested kind with the anchor most similar to the keyword.

    Out-of-vocabulary keywords get the kind's default template. Ties break to
    the lowest template id.
    """
    candidates = corpus.of_kind(kind)
    if not candidates:
        raise ValueError(f"no templates of kind {kind!r}")
    if keyword.surface not in store:
        return corpus.default(kind)
    best: UtteranceTemplate | None = None
    best_score = float("-inf")
    for tpl in sorted(candidates, key=lambda t: t.id):
        if tpl.anchor not in store:
            continue
        score = cosine_similarity(keyword.surface, tpl.anchor, store)
        if score > best_score:
            best, best_score = tpl, score
    if best is None:
        return corpus.default(kind)
    return best


def realize(template: UtteranceTemplate, keyword: Keyword) -> Utterance:
    """Substitute the keyword into the slot, single pass, no recursive expansion."""
    if not keyword.surface:
        raise ValueError("keyword surface must be non-empty")
    text = template.pattern.replace(SLOT, keyword.surface, 1)
    if template.kind == QUESTION and not text.endswith("?"):
        text += "?"
    return Utterance(text=text, kind=template.kind, keyword=keyword.surface)
