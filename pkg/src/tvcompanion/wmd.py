"""Word Mover's Distance between short texts over an embedding store.

The exact distance is solved as a min-cost flow on the bipartite word graph:
document weights are apportioned onto an integer grid (largest-remainder, so
each side sums to exactly ``_MASS_SCALE`` units) and the transportation
problem is solved by successive shortest paths with node potentials. Documents
here are tiny (tens of unique words), so exactness is cheap and the result is
deterministic. ``relaxed_wmd`` is the standard one-sided lower bound used only
for candidate pruning.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .embeddings import EmbeddingStore

# Integer mass units per document. 1e12 keeps apportionment error around
# 1e-12 per word, far inside the 1e-9 tolerances on the metric properties.
_MASS_SCALE = 10**12


@dataclass(frozen=True)
class WeightedDoc:
    """Normalized bag-of-words: unique words with positive weights summing to 1."""

    items: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("WeightedDoc must contain at least one word")
        words = [w for w, _ in self.items]
        if len(set(words)) != len(words):
            raise ValueError("WeightedDoc words must be unique")
        total = 0.0
        for word, weight in self.items:
            if not (weight > 0.0 and math.isfinite(weight)):
                raise ValueError(f"weight for {word!r} must be positive and finite")
            total += weight
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1 within 1e-9, got {total}")

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(w for w, _ in self.items)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, w in self.items)


@dataclass(frozen=True)
class TransportPlan:
    """Optimal flows between two documents' words, certifying the distance."""

    flows: Mapping[tuple[str, str], float]
    cost: float

    def marginal_source(self) -> dict[str, float]:
        sums: dict[str, float] = {}
        for (src, _), mass in self.flows.items():
            sums[src] = sums.get(src, 0.0) + mass
        return sums

    def marginal_target(self) -> dict[str, float]:
        sums: dict[str, float] = {}
        for (_, dst), mass in self.flows.items():
            sums[dst] = sums.get(dst, 0.0) + mass
        return sums


def nbow(tokens: Sequence[str], store: EmbeddingStore) -> WeightedDoc:
    """Build a normalized bag-of-words document, dropping out-of-vocabulary tokens."""
    if not tokens:
        raise ValueError("token list is empty")
    counts = Counter(tok for tok in tokens if tok in store)
    if not counts:
        raise ValueError("all tokens are out of vocabulary")
    total = sum(counts.values())
    return WeightedDoc(tuple((word, count / total) for word, count in counts.items()))


def _cost_matrix(doc_a: WeightedDoc, doc_b: WeightedDoc, store: EmbeddingStore) -> np.ndarray:
    va = np.stack([store.vector(w) for w in doc_a.words])
    vb = np.stack([store.vector(w) for w in doc_b.words])
    diff = va[:, None, :] - vb[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _integer_masses(weights: Sequence[float], scale: int = _MASS_SCALE) -> list[int]:
    """Apportion weights onto an integer grid summing to exactly ``scale``."""
    total = sum(weights)
    raw = [w / total * scale for w in weights]
    base = [int(math.floor(x)) for x in raw]
    deficit = scale - sum(base)
    if deficit > 0:
        order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - base[i]), i))
        for i in order[:deficit]:
            base[i] += 1
    elif deficit < 0:
        order = sorted(range(len(raw)), key=lambda i: (raw[i] - base[i], i))
        removed = 0
        for i in order:
            if removed == -deficit:
                break
            if base[i] > 0:
                base[i] -= 1
                removed += 1
    return base


def _solve_transport(
    supply: Sequence[int], demand: Sequence[int], cost: np.ndarray
) -> np.ndarray:
    """Exact transportation solve via successive shortest paths with potentials.

    Supplies and demands are integers with equal totals; the returned integer
    flow matrix is an optimal solution of the scaled problem. Augmentation
    counts stay tiny for the short documents this package handles.
    """
    n, m = len(supply), len(demand)
    flow = np.zeros((n, m), dtype=np.int64)
    rem_a = [int(s) for s in supply]
    rem_b = [int(d) for d in demand]
    pot_a = [0.0] * n
    pot_b = [0.0] * m
    remaining = sum(rem_a)

    while remaining > 0:
        dist_a = [math.inf] * n
        dist_b = [math.inf] * m
        parent_b = [-1] * m  # a-index that reached this b via a forward arc
        parent_a = [-1] * n  # b-index that reached this a via a residual arc
        done_a = [False] * n
        done_b = [False] * m
        for i in range(n):
            if rem_a[i] > 0:
                dist_a[i] = 0.0

        target = -1
        while True:
            best = math.inf
            side = ""
            idx = -1
            for i in range(n):
                if not done_a[i] and dist_a[i] < best:
                    best, side, idx = dist_a[i], "a", i
            for j in range(m):
                if not done_b[j] and dist_b[j] < best:
                    best, side, idx = dist_b[j], "b", j
            if idx < 0:
                break
            if side == "a":
                done_a[idx] = True
                row = cost[idx]
                base = dist_a[idx] + pot_a[idx]
                for j in range(m):
                    if done_b[j]:
                        continue
                    nd = base + row[j] - pot_b[j]
                    if nd < dist_b[j] - 1e-15:
                        dist_b[j] = nd
                        parent_b[j] = idx
            else:
                done_b[idx] = True
                if rem_b[idx] > 0 and target < 0:
                    target = idx
                    break  # cheapest deficit node settled: shortest path found
                col = cost[:, idx]
                base = dist_b[idx] + pot_b[idx]
                for i in range(n):
                    if done_a[i] or flow[i, idx] <= 0:
                        continue
                    nd = base - col[i] - pot_a[i]
                    if nd < dist_a[i] - 1e-15:
                        dist_a[i] = nd
                        parent_a[i] = idx

        if target < 0:
            raise RuntimeError("transport solve failed: no augmenting path")

        # Update potentials with the settled distances (unreached nodes keep
        # theirs plus the target distance so reduced costs stay nonnegative).
        d_t = dist_b[target]
        for i in range(n):
            pot_a[i] += min(dist_a[i], d_t)
        for j in range(m):
            pot_b[j] += min(dist_b[j], d_t)

        # Walk back to a supply node, collecting the path and its bottleneck.
        path: list[tuple[int, int]] = []  # (a, b) forward arcs along the path
        j = target
        while True:
            i = parent_b[j]
            path.append((i, j))
            if parent_a[i] < 0:
                start = i
                break
            j = parent_a[i]
        delta = min(rem_a[start], rem_b[target])
        for k in range(len(path) - 1):
            i_fwd, j_fwd = path[k]
            # residual arc traversed between consecutive forward arcs
            delta = min(delta, int(flow[i_fwd, path[k + 1][1]]))
        # Apply: forward arcs gain mass, the residual arcs between them lose it.
        for k, (i_fwd, j_fwd) in enumerate(path):
            flow[i_fwd, j_fwd] += delta
            if k + 1 < len(path):
                flow[i_fwd, path[k + 1][1]] -= delta
        rem_a[start] -= delta
        rem_b[target] -= delta
        remaining -= delta

    return flow


def wmd(
    doc_a: WeightedDoc, doc_b: WeightedDoc, store: EmbeddingStore
) -> tuple[float, TransportPlan]:
    """Exact Word Mover's Distance with the optimal transport plan.

    Ground cost is the Euclidean distance between word vectors. Deterministic
    for fixed inputs; any cost-optimal plan is acceptable.
    """
    cost = _cost_matrix(doc_a, doc_b, store)
    supply = _integer_masses(doc_a.weights)
    demand = _integer_masses(doc_b.weights)
    flow = _solve_transport(supply, demand, cost)
    masses = flow.astype(np.float64) / _MASS_SCALE
    total = float(np.sum(masses * cost))
    flows: dict[tuple[str, str], float] = {}
    words_a = doc_a.words
    words_b = doc_b.words
    for i, j in zip(*np.nonzero(flow)):
        flows[(words_a[i], words_b[j])] = float(masses[i, j])
    return total, TransportPlan(flows=flows, cost=total)


def relaxed_wmd(doc_a: WeightedDoc, doc_b: WeightedDoc, store: EmbeddingStore) -> float:
    """Lower bound on wmd: each word's mass moves wholly to its nearest counterpart."""
    cost = _cost_matrix(doc_a, doc_b, store)
    bound_a = float(np.dot(doc_a.weights, cost.min(axis=1)))
    bound_b = float(np.dot(doc_b.weights, cost.min(axis=0)))
    return max(bound_a, bound_b)


def to_similarity(distance: float) -> float:
    """Map a distance to (0, 1]: 1 / (1 + d), strictly decreasing."""
    if not math.isfinite(distance) or distance < 0.0:
        raise ValueError(f"distance must be finite and >= 0, got {distance}")
    return 1.0 / (1.0 + distance)
