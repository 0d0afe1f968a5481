import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_doc
from oracles import transport_2x2_scan, transport_polytope_min_cost
from tvcompanion import (
    WeightedDoc,
    nbow,
    relaxed_wmd,
    synthetic_store,
    to_similarity,
    wmd,
)
from tvcompanion.wmd import _cost_matrix, _integer_masses


class TestWeightedDoc:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            WeightedDoc(())

    def test_rejects_duplicate_words(self):
        with pytest.raises(ValueError, match="unique"):
            WeightedDoc((("a", 0.5), ("a", 0.5)))

    def test_rejects_bad_weights(self):
        with pytest.raises(ValueError):
            WeightedDoc((("a", 0.0), ("b", 1.0)))
        with pytest.raises(ValueError, match="sum to 1"):
            WeightedDoc((("a", 0.9),))


class TestNbow:
    def test_count_normalization(self, small_store):
        doc = nbow(["w000", "w000", "w001"], small_store)
        assert dict(doc.items) == {"w000": 2 / 3, "w001": 1 / 3}

    def test_oov_dropped(self, small_store):
        doc = nbow(["w000", "zzz"], small_store)
        assert dict(doc.items) == {"w000": 1.0}

    def test_all_oov_errors(self, small_store):
        with pytest.raises(ValueError, match="out of vocabulary"):
            nbow(["zzz"], small_store)

    def test_empty_errors(self, small_store):
        with pytest.raises(ValueError, match="empty"):
            nbow([], small_store)


class TestWmd:
    def test_identity(self, small_store):
        rng = random.Random(5)
        for _ in range(20):
            doc = random_doc(rng, small_store)
            distance, _ = wmd(doc, doc, small_store)
            assert distance <= 1e-9

    def test_single_word_docs_forced_plan(self, small_store):
        doc_a = WeightedDoc((("w003", 1.0),))
        doc_b = WeightedDoc((("w007", 1.0),))
        distance, plan = wmd(doc_a, doc_b, small_store)
        expected = float(np.linalg.norm(
            small_store.vector("w003") - small_store.vector("w007")))
        assert abs(distance - expected) < 1e-12
        assert plan.flows == {("w003", "w007"): 1.0}

    def test_2x2_frozen_oracle_value(self):
        # Value computed beforehand with the interval-scan oracle over the
        # 2x2 transport polytope's one free variable (tests/oracles.py).
        store = synthetic_store(42, ["alpha", "beta", "gamma", "delta"], 3)
        doc_a = WeightedDoc((("alpha", 0.25), ("beta", 0.75)))
        doc_b = WeightedDoc((("gamma", 0.5), ("delta", 0.5)))
        distance, _ = wmd(doc_a, doc_b, store)
        assert abs(distance - 1.1100804977063672) < 1e-6
        cost = _cost_matrix(doc_a, doc_b, store)
        rescan = transport_2x2_scan([0.25, 0.75], [0.5, 0.5], cost)
        assert abs(distance - rescan) < 1e-6

    def test_metric_properties_seeded(self, small_store):
        rng = random.Random(17)
        for _ in range(100):
            a = random_doc(rng, small_store)
            b = random_doc(rng, small_store)
            c = random_doc(rng, small_store)
            d_ab, _ = wmd(a, b, small_store)
            d_ba, _ = wmd(b, a, small_store)
            d_bc, _ = wmd(b, c, small_store)
            d_ac, _ = wmd(a, c, small_store)
            assert d_ab >= 0
            assert abs(d_ab - d_ba) <= 1e-9
            assert d_ac <= d_ab + d_bc + 1e-9

    def test_plan_feasibility_and_cost(self, small_store):
        rng = random.Random(23)
        for _ in range(50):
            a = random_doc(rng, small_store)
            b = random_doc(rng, small_store)
            distance, plan = wmd(a, b, small_store)
            assert abs(plan.cost - distance) <= 1e-9
            source = plan.marginal_source()
            target = plan.marginal_target()
            for word, weight in a.items:
                assert abs(source.get(word, 0.0) - weight) <= 1e-9
            for word, weight in b.items:
                assert abs(target.get(word, 0.0) - weight) <= 1e-9
            assert all(mass >= 0 for mass in plan.flows.values())

    def test_oracle_equivalence_small_docs(self, small_store):
        rng = random.Random(31)
        for _ in range(100):
            a = random_doc(rng, small_store, max_words=3)
            b = random_doc(rng, small_store, max_words=3)
            distance, _ = wmd(a, b, small_store)
            cost = _cost_matrix(a, b, small_store)
            expected = transport_polytope_min_cost(a.weights, b.weights, cost)
            assert abs(distance - expected) < 1e-6


class TestRelaxedWmd:
    def test_identity(self, small_store):
        doc = WeightedDoc((("w001", 0.5), ("w002", 0.5)))
        assert relaxed_wmd(doc, doc, small_store) == 0.0

    def test_single_word_tight(self, small_store):
        doc_a = WeightedDoc((("w004", 1.0),))
        doc_b = WeightedDoc((("w009", 1.0),))
        exact, _ = wmd(doc_a, doc_b, small_store)
        assert abs(relaxed_wmd(doc_a, doc_b, small_store) - exact) < 1e-12

    def test_dominated_by_exact_on_1000_pairs(self, small_store):
        rng = random.Random(47)
        for _ in range(1000):
            a = random_doc(rng, small_store)
            b = random_doc(rng, small_store)
            exact, _ = wmd(a, b, small_store)
            assert relaxed_wmd(a, b, small_store) <= exact + 1e-9


class TestToSimilarity:
    def test_zero_maps_to_one(self):
        assert to_similarity(0.0) == 1.0

    def test_closed_form(self):
        assert to_similarity(1.0) == 0.5

    def test_monotone_on_seeded_pairs(self):
        rng = random.Random(3)
        for _ in range(1000):
            d1, d2 = sorted((rng.uniform(0, 10), rng.uniform(0, 10)))
            if d1 == d2:
                continue
            assert to_similarity(d1) > to_similarity(d2)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            to_similarity(-0.1)
        with pytest.raises(ValueError):
            to_similarity(float("nan"))
        with pytest.raises(ValueError):
            to_similarity(float("inf"))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(min_value=1e-6, max_value=1.0), min_size=1, max_size=8))
def test_integer_masses_sum_exactly(raw):
    masses = _integer_masses(raw)
    assert sum(masses) == 10**12
    assert all(m >= 0 for m in masses)
    total = sum(raw)
    for value, mass in zip(raw, masses):
        assert abs(mass / 10**12 - value / total) <= 1.0 / 10**12


_PROPERTY_STORE = synthetic_store(11, [f"w{i:03d}" for i in range(100)], 8)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_wmd_symmetry_property(data):
    store = _PROPERTY_STORE
    vocab = sorted(store.words())
    words_a = data.draw(st.lists(st.sampled_from(vocab), min_size=1, max_size=3,
                                 unique=True))
    words_b = data.draw(st.lists(st.sampled_from(vocab), min_size=1, max_size=3,
                                 unique=True))
    doc_a = WeightedDoc(tuple((w, 1 / len(words_a)) for w in words_a))
    doc_b = WeightedDoc(tuple((w, 1 / len(words_b)) for w in words_b))
    d_ab, _ = wmd(doc_a, doc_b, store)
    d_ba, _ = wmd(doc_b, doc_a, store)
    assert abs(d_ab - d_ba) <= 1e-9
    assert d_ab >= 0
