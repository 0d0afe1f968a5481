import random

import pytest

from tvcompanion import WeightedDoc, synthetic_store


@pytest.fixture(scope="session")
def small_store():
    words = [f"w{i:03d}" for i in range(100)]
    return synthetic_store(11, words, 8)


def random_doc(rng: random.Random, store, max_words: int = 4) -> WeightedDoc:
    vocab = sorted(store.words())
    count = rng.randint(1, max_words)
    words = rng.sample(vocab, count)
    raw = [rng.randint(1, 5) for _ in words]
    total = sum(raw)
    return WeightedDoc(tuple((w, c / total) for w, c in zip(words, raw)))
