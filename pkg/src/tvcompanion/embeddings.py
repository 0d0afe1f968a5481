"""Word-vector storage, cosine similarity, and a deterministic synthetic generator.

The on-disk format is the plain-text interchange format: a header line
``<count> <dimension>`` followed by one ``<word> <v1> ... <vd>`` row per word,
single-space separated, UTF-8, LF or CRLF line endings.
"""

from __future__ import annotations

import hashlib
import io
import logging
import math
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class VectorFormatError(ValueError):
    """A word-vector stream violates the text format contract."""


class OutOfVocabularyError(LookupError):
    """A word has no vector in the store."""


class EmbeddingStore:
    """Immutable word -> vector map with fixed dimension.

    Safe to share across threads/tasks after construction; vectors are
    read-only float64 arrays.
    """

    def __init__(self, dimension: int, entries: Mapping[str, Sequence[float]]):
        if dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {dimension}")
        if not entries:
            raise ValueError("empty vocabulary")
        self._dimension = int(dimension)
        vectors: dict[str, np.ndarray] = {}
        for word, values in entries.items():
            vec = np.asarray(values, dtype=np.float64)
            if vec.shape != (self._dimension,):
                raise ValueError(
                    f"vector for {word!r} has shape {vec.shape}, expected ({self._dimension},)"
                )
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"vector for {word!r} has non-finite components")
            vec.setflags(write=False)
            vectors[word] = vec
        self._vectors = vectors

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def vocab_size(self) -> int:
        return len(self._vectors)

    def __contains__(self, word: str) -> bool:
        return word in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def words(self) -> Iterator[str]:
        return iter(self._vectors)

    def vector(self, word: str) -> np.ndarray:
        try:
            return self._vectors[word]
        except KeyError:
            raise OutOfVocabularyError(f"word not in vocabulary: {word!r}") from None


def _lines(source: str | Path | IO[str] | Iterable[str]) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as handle:
            yield from handle
    elif isinstance(source, io.TextIOBase) or hasattr(source, "read"):
        yield from source  # type: ignore[misc]
    else:
        yield from source


def load_vectors(source: str | Path | IO[str] | Iterable[str]) -> EmbeddingStore:
    """Parse a word-vector text stream into an :class:`EmbeddingStore`.

    Duplicate words keep their first occurrence and log a warning. The header
    count is informational; the store holds exactly the rows that parsed.
    """
    lines = _lines(source)
    try:
        header = next(lines)
    except StopIteration:
        raise VectorFormatError("empty stream: missing header line") from None
    parts = header.rstrip("\r\n").split(" ")
    if len(parts) != 2:
        raise VectorFormatError(f"malformed header: {header.rstrip()!r}")
    try:
        count, dimension = int(parts[0]), int(parts[1])
    except ValueError:
        raise VectorFormatError(f"malformed header: {header.rstrip()!r}") from None
    if dimension < 1:
        raise VectorFormatError(f"header dimension must be >= 1, got {dimension}")

    entries: dict[str, np.ndarray] = {}
    for lineno, raw in enumerate(lines, start=2):
        line = raw.rstrip("\r\n")
        if not line:
            continue
        fields = line.split(" ")
        word = fields[0]
        if len(fields) - 1 != dimension:
            raise VectorFormatError(
                f"line {lineno}: expected {dimension} components for {word!r}, got {len(fields) - 1}"
            )
        try:
            vec = np.array([float(x) for x in fields[1:]], dtype=np.float64)
        except ValueError:
            raise VectorFormatError(f"line {lineno}: non-numeric component for {word!r}") from None
        if not np.all(np.isfinite(vec)):
            raise VectorFormatError(f"line {lineno}: non-finite component for {word!r}")
        if word in entries:
            logger.warning("duplicate word %r at line %d: keeping first occurrence", word, lineno)
            continue
        entries[word] = vec

    if not entries:
        raise VectorFormatError("empty vocabulary: no vector rows parsed")
    if count != len(entries):
        logger.debug("header count %d != parsed rows %d", count, len(entries))
    return EmbeddingStore(dimension, entries)


def dump_vectors(store: EmbeddingStore, destination: str | Path | IO[str]) -> None:
    """Write a store back in the text format; round-trips exactly through load_vectors."""

    def _write(handle: IO[str]) -> None:
        handle.write(f"{store.vocab_size} {store.dimension}\n")
        for word in store.words():
            comps = " ".join(repr(float(x)) for x in store.vector(word))
            handle.write(f"{word} {comps}\n")

    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8") as handle:
            _write(handle)
    else:
        _write(destination)


def cosine_similarity(a: str, b: str, store: EmbeddingStore) -> float:
    """Cosine of the angle between two in-vocabulary word vectors."""
    va = store.vector(a)
    vb = store.vector(b)
    norm_a = math.sqrt(float(np.dot(va, va)))
    norm_b = math.sqrt(float(np.dot(vb, vb)))
    if norm_a == 0.0 or norm_b == 0.0:
        offender = a if norm_a == 0.0 else b
        raise ValueError(f"zero-norm vector for {offender!r}")
    if a == b:
        return 1.0
    return float(np.dot(va, vb)) / (norm_a * norm_b)


def synthetic_store(seed: int, words: Sequence[str], dimension: int) -> EmbeddingStore:
    """Deterministic unit-norm vectors for tests and demos.

    Each vector depends only on (seed, word, dimension), so equal inputs yield
    byte-identical stores regardless of word order or platform.
    """
    if dimension < 2:
        raise ValueError(f"dimension must be >= 2, got {dimension}")
    if not words:
        raise ValueError("words must be non-empty")
    entries: dict[str, np.ndarray] = {}
    for word in words:
        if word in entries:
            continue
        digest = hashlib.sha256(f"{seed}:{dimension}:{word}".encode("utf-8")).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "big"))
        while True:
            vec = rng.standard_normal(dimension)
            norm = float(np.linalg.norm(vec))
            if norm > 1e-8:
                break
        entries[word] = vec / norm
    return EmbeddingStore(dimension, entries)
