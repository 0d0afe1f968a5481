#!/usr/bin/env python3
"""Regenerate the bundled demo assets deterministically and verify them.

Writes vectors, templates, stopwords, engine corpora, the demo feed, and the
bundled scenarios into src/tvcompanion/assets/, then replays the demo scenario
and asserts the properties the test suite relies on (template selection for
"elephant", the engine sequence of the first scripted conversation, turn-count
ranges). Run from the repository root:

    python3 tools/build_assets.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from tvcompanion import (  # noqa: E402
    Keyword,
    cosine_similarity,
    load_scenario,
    load_templates,
    load_vectors,
    run_scenario,
    select_template,
    synthetic_store,
)

ASSETS = ROOT / "src" / "tvcompanion" / "assets"

DIM = 12
VECTOR_SEED = 424242

VOCAB = [
    # template anchors
    "like", "eat", "go", "watch", "fun",
    # animals
    "elephant", "elephants", "zebra", "panda", "lion", "tortoise", "animal",
    # tv / media
    "show", "movie", "drama", "music", "song", "game", "baseball", "team",
    "channel", "news", "story", "highlights",
    # food
    "curry", "cake", "coffee", "tea", "dinner", "lunch", "cook", "cooking",
    # places
    "zoo", "park", "city", "garden", "home", "town", "gate", "east",
    # other content words
    "love", "saw", "seen", "see", "want", "think", "know", "sounds", "looks",
    "clever", "cute", "great", "nice", "sunny", "day", "week", "today",
    "favorite", "new", "opened", "fresh", "robots", "robot", "latest",
    "bath", "starts", "young", "choice", "plants", "weather", "tell", "says",
    # pronouns and affirmations kept in vocabulary: they anchor cue matching
    "i", "you", "we", "yes",
]

STOPWORDS = [
    "a", "an", "the", "is", "are", "was", "were", "be", "been", "being",
    "do", "does", "did", "to", "of", "in", "on", "at", "by", "for", "with",
    "and", "or", "not", "no", "so", "it", "its", "this", "that", "these",
    "those", "i", "you", "he", "she", "we", "they", "me", "my", "your",
    "what", "who", "how", "when", "where", "why", "have", "has", "had",
    "will", "would", "can", "could", "yes", "up", "out", "about", "just",
]

TEMPLATES = """\
# kind\tanchor\tpattern
disclosure\tlike\tI like ***
disclosure\teat\tI want to eat ***
disclosure\tgo\tI want to go to ***
disclosure\twatch\t*** looks great
disclosure\tfun\t*** is so fun
question\tlike\tDo you like ***
question\teat\tDo you want to eat ***
question\twatch\tDo you watch ***
question\tgo\tHave you been to ***
"""

SESSION_START_EPOCH = 1754784000.0  # pinned so news recency is reproducible
FRESH_TS = SESSION_START_EPOCH - 2 * 86400.0
FRESHER_TS = SESSION_START_EPOCH - 1 * 86400.0
STALE_TS = SESSION_START_EPOCH - 10 * 86400.0

TV_PROGRAM_CORPUS = [
    {"cue": "yes i love elephants",
     "reply": "Me too. The elephants on this show are so clever."},
    {"cue": "what animal is that",
     "reply": "Looks like a young zebra to me."},
    {"cue": "yes i watch this show",
     "reply": "Great choice. This show is my favorite."},
]

DAILY_LIFE_CORPUS = [
    {"cue": "i saw elephants at the zoo",
     "reply": "The zoo sounds fun. I want to go on a sunny day."},
    {"cue": "do you cook dinner at home",
     "reply": "I love curry nights. Cooking relaxes me."},
    {"cue": "my garden looks great today",
     "reply": "A garden is nice. Plants really know the weather."},
]

# The first record is a deliberately stale sentinel with the same cue as the
# fresh one: if the recency filter ever breaks, the index tie-break would
# surface it and the verification below fails.
NEWS_SNS_CORPUS = [
    {"cue": "latest news about the zoo",
     "reply": "Old story: the zoo once lost a tortoise for a month.",
     "timestamp": STALE_TS},
    {"cue": "latest news about the zoo",
     "reply": "Fresh report: a new panda enclosure opened today.",
     "timestamp": FRESH_TS},
    {"cue": "fresh news about new robots",
     "reply": "Breaking: flying cars approved downtown, commutes dropping fast.",
     "timestamp": FRESHER_TS},
]

DEMO_FEED = [
    {"t": 5.0, "kind": "detection", "text": "elephant", "confidence": 0.93},
    {"t": 40.0, "kind": "caption", "text": "The elephants at the zoo love bath time"},
    {"t": 180.0, "kind": "detection", "text": "panda", "confidence": 0.88},
    {"t": 300.0, "kind": "caption", "text": "A new panda garden opened this week"},
    {"t": 600.0, "kind": "detection", "text": "zebra", "confidence": 0.75},
    {"t": 900.0, "kind": "caption", "text": "The lion show starts after the news"},
    {"t": 1200.0, "kind": "detection", "text": "lion", "confidence": 0.81},
    {"t": 1500.0, "kind": "caption", "text": "Baseball game highlights coming up"},
    {"t": 1800.0, "kind": "detection", "text": "baseball", "confidence": 0.9},
]

DEMO_SCRIPT = [
    {"trigger": "after_robot_question", "text": "yes i love elephants", "delay_s": 2.0},
    {"trigger": "after_robot_question", "text": "i saw elephants at the zoo", "delay_s": 2.5},
    {"trigger": "after_robot_question", "text": "tell me the latest news about the zoo", "delay_s": 2.0},
    {"trigger": "after_robot_question", "text": "any news about robots", "delay_s": 2.5},
    {"trigger": "after_robot_question", "text": "wahaha", "delay_s": 2.0},
    {"trigger": "after_robot_question", "text": "ok bye", "delay_s": 1.5},
    {"trigger": "after_robot_question", "text": "do you cook dinner at home", "delay_s": 2.0},
    {"trigger": "after_robot_question", "text": "ok bye now", "delay_s": 1.5},
]

DEMO_SCENARIO = {
    "feed": "../feeds/demo.jsonl",
    "user_script": DEMO_SCRIPT,
    "seed": 20260810,
    "duration_s": 2600.0,
    "config": {
        "session_start_epoch": SESSION_START_EPOCH,
    },
}

SILENT_SCENARIO = {
    "feed": "../feeds/demo.jsonl",
    "user_script": [],
    "seed": 31337,
    "duration_s": 2600.0,
    "config": {
        "session_start_epoch": SESSION_START_EPOCH,
    },
}

USER_DICTIONARY = ["ice cream", "home run", "panda garden"]


def build_vectors() -> None:
    base = synthetic_store(VECTOR_SEED, VOCAB, DIM)
    vectors = {w: np.array(base.vector(w)) for w in VOCAB}

    def mix(word: str, toward: str, amount: float) -> None:
        blended = (1 - amount) * vectors[word] + amount * vectors[toward]
        vectors[word] = blended / np.linalg.norm(blended)

    # Cluster the demo topics so template selection and cue matching behave
    # like trained embeddings would: animals near "like", foods near "eat",
    # places near "go", media near "watch".
    for animal in ("elephant", "elephants", "zebra", "panda", "lion", "tortoise",
                   "animal", "cute"):
        mix(animal, "like", 0.72)
    for food in ("curry", "cake", "coffee", "tea", "dinner", "lunch", "cook",
                 "cooking"):
        mix(food, "eat", 0.7)
    for place in ("zoo", "park", "city", "garden", "town", "gate"):
        mix(place, "go", 0.7)
    for medium in ("show", "movie", "drama", "music", "song", "game", "baseball",
                   "channel", "highlights"):
        mix(medium, "watch", 0.7)
    for newsy in ("news", "story", "latest", "robots", "robot", "fresh"):
        mix(newsy, "tell", 0.6)
    mix("elephants", "elephant", 0.55)

    lines = [f"{len(VOCAB)} {DIM}"]
    for word in VOCAB:
        comps = " ".join(f"{x:.6f}" for x in vectors[word])
        lines.append(f"{word} {comps}")
    (ASSETS / "vectors.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_assets() -> None:
    ASSETS.mkdir(parents=True, exist_ok=True)
    (ASSETS / "engines").mkdir(exist_ok=True)
    (ASSETS / "feeds").mkdir(exist_ok=True)
    (ASSETS / "scenarios").mkdir(exist_ok=True)

    build_vectors()
    (ASSETS / "templates.tsv").write_text(TEMPLATES, encoding="utf-8")
    (ASSETS / "stopwords.txt").write_text("\n".join(STOPWORDS) + "\n", encoding="utf-8")
    (ASSETS / "user_dictionary.txt").write_text(
        "\n".join(USER_DICTIONARY) + "\n", encoding="utf-8")

    for name, corpus in (("tv_program", TV_PROGRAM_CORPUS),
                         ("daily_life", DAILY_LIFE_CORPUS),
                         ("news_sns", NEWS_SNS_CORPUS)):
        path = ASSETS / "engines" / f"{name}.jsonl"
        path.write_text(
            "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in corpus),
            encoding="utf-8")

    (ASSETS / "feeds" / "demo.jsonl").write_text(
        "".join(json.dumps(e, ensure_ascii=False) + "\n" for e in DEMO_FEED),
        encoding="utf-8")
    (ASSETS / "scenarios" / "demo.json").write_text(
        json.dumps(DEMO_SCENARIO, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8")
    (ASSETS / "scenarios" / "silent.json").write_text(
        json.dumps(SILENT_SCENARIO, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8")


def verify() -> None:
    store = load_vectors(ASSETS / "vectors.txt")
    corpus = load_templates(ASSETS / "templates.tsv", store=store)
    elephant = Keyword(surface="elephant", source="detection", first_seen=0.0)

    disclosure = select_template(elephant, "disclosure", corpus, store)
    question = select_template(elephant, "question", corpus, store)
    assert disclosure.pattern == "I like ***", disclosure
    assert question.pattern == "Do you like ***", question
    print(f"template selection ok: {disclosure.pattern!r} / {question.pattern!r}")
    print(f"  cosine(elephant, like) = "
          f"{cosine_similarity('elephant', 'like', store):.3f}")

    scenario = load_scenario(ASSETS / "scenarios" / "demo.json")
    result = run_scenario(scenario)
    stats = result.stats
    print(f"demo: {stats.conversation_count} conversations, "
          f"turns {stats.turn_counts}, mean {stats.mean:.2f}, max {stats.max}")

    responses_by_conv: dict[int, list] = {}
    for entry in result.transcript:
        if entry.kind == "response" and not entry.repeat:
            responses_by_conv.setdefault(entry.conversation_id, []).append(entry)

    first_conv = min(responses_by_conv)
    sequence = [(e.engine, e.text) for e in responses_by_conv[first_conv]]
    for engine, text in sequence:
        print(f"  conv1 {engine}: {text}")
    engines = [engine for engine, _ in sequence]
    assert engines == ["tv_program", "daily_life", "news_sns", "news_sns",
                       "generative"], engines
    assert "tortoise" not in " ".join(t for _, t in sequence), "stale news leaked"

    for conv_id, responses in responses_by_conv.items():
        for i, entry in enumerate(responses, start=1):
            if entry.engine == "news_sns":
                assert i >= 3, (conv_id, i)
        assert responses[0].engine in ("tv_program", "generative")

    assert stats.conversation_count >= 3
    assert 3.0 <= stats.mean <= 9.0, stats.mean

    again = run_scenario(load_scenario(ASSETS / "scenarios" / "demo.json"))
    assert [e.to_json() for e in again.transcript] == \
           [e.to_json() for e in result.transcript]
    print("determinism ok")

    silent = run_scenario(load_scenario(ASSETS / "scenarios" / "silent.json"))
    causes = {e.cause for e in silent.transcript if e.kind == "event"}
    assert causes == {"no_answer"}, causes
    print(f"silent scenario: {silent.stats.conversation_count} conversations, "
          f"all ended by no_answer")


if __name__ == "__main__":
    write_assets()
    verify()
    print("assets written to", ASSETS)
