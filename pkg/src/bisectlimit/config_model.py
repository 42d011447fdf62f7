"""Configuration model: half-edges, matchings, the induced multigraphs and
the matching classes M(alpha, beta, gamma) for a vertex partition (A, B).

Vertices are 1-based throughout. Loops and parallel edges are legal.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .degrees import DegreeSequence
from .errors import FeasibilityError, InvalidInputError, ParityError, ResourceGuardError

ENUMERATION_GUARD = 16


class HalfEdge(NamedTuple):
    vertex: int
    copy: int


@dataclass(frozen=True)
class MultiGraph:
    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise InvalidInputError("negative vertex count")
        norm = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise InvalidInputError(f"edge ({u},{v}) outside 1..{self.n}")
            norm.append((u, v) if u <= v else (v, u))
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def m(self) -> int:
        return len(self.edges)

    def key(self) -> tuple:
        """Order-free identity of the edge multiset."""
        return (self.n, tuple(sorted(self.edges)))

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u - 1] += 1
            deg[v - 1] += 1
        return deg

    def add_edge(self, u: int, v: int) -> "MultiGraph":
        return MultiGraph(self.n, self.edges + ((u, v),))

    def induced(self, vertices: Iterable[int]) -> "MultiGraph":
        """Induced subgraph on ``vertices``, relabelled 1..k in increasing order."""
        vs = sorted(vertices)
        index = {v: i + 1 for i, v in enumerate(vs)}
        edges = tuple((index[u], index[v]) for u, v in self.edges if u in index and v in index)
        return MultiGraph(len(vs), edges)

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj) -> "MultiGraph":
        return cls(int(obj["n"]), tuple(tuple(e) for e in obj["edges"]))

    @classmethod
    def from_json(cls, text: str) -> "MultiGraph":
        return cls.from_dict(json.loads(text))


def _canonical_pairs(pairs) -> tuple[tuple[HalfEdge, HalfEdge], ...]:
    out = []
    for x, y in pairs:
        x, y = HalfEdge(*x), HalfEdge(*y)
        out.append((x, y) if x <= y else (y, x))
    return tuple(sorted(out))


@dataclass(frozen=True)
class Matching:
    """A (possibly partial) matching of the half-edge multiset of ``base``.

    Pairs are stored canonically (smaller half-edge first, pairs sorted), so
    two matchings are equal iff they pair the same half-edges.
    """

    pairs: tuple[tuple[HalfEdge, HalfEdge], ...]
    base: DegreeSequence

    def __post_init__(self):
        pairs = _canonical_pairs(self.pairs)
        seen = set()
        for pair in pairs:
            for h in pair:
                if not (1 <= h.vertex <= self.base.n and 1 <= h.copy <= self.base[h.vertex]):
                    raise InvalidInputError(f"half-edge {tuple(h)} not in H_d")
                if h in seen:
                    raise InvalidInputError(f"half-edge {tuple(h)} matched twice")
                seen.add(h)
        object.__setattr__(self, "pairs", pairs)

    @property
    def is_complete(self) -> bool:
        return 2 * len(self.pairs) == self.base.total

    def matched(self) -> set[HalfEdge]:
        return {h for pair in self.pairs for h in pair}

    def unmatched(self) -> list[HalfEdge]:
        used = self.matched()
        return [h for h in build_half_edges(self.base) if h not in used]

    def to_json(self) -> str:
        return json.dumps([[list(x), list(y)] for x, y in self.pairs])

    @classmethod
    def from_json(cls, text: str, base: DegreeSequence) -> "Matching":
        return cls(tuple((HalfEdge(*x), HalfEdge(*y)) for x, y in json.loads(text)), base)


class EdgeTypeCounts(NamedTuple):
    alpha: int
    beta: int
    gamma: int


def build_half_edges(d: DegreeSequence) -> list[HalfEdge]:
    return [HalfEdge(v, c) for v in range(1, d.n + 1) for c in range(1, d[v] + 1)]


def sample_complete_matching(d: DegreeSequence, seed) -> Matching:
    if d.total % 2:
        raise ParityError(f"total degree {d.total} is odd")
    rng = np.random.default_rng(seed)
    hs = build_half_edges(d)
    order = rng.permutation(len(hs))
    pairs = [(hs[order[i]], hs[order[i + 1]]) for i in range(0, len(hs), 2)]
    return Matching(tuple(pairs), d)


def sample_near_complete_matching(d: DegreeSequence, seed) -> Matching:
    """Uniform maximum matching of H_d.

    Complete when the total degree is even; otherwise exactly one uniformly
    chosen half-edge stays unmatched.
    """
    rng = np.random.default_rng(seed)
    hs = build_half_edges(d)
    order = rng.permutation(len(hs))
    k = len(hs) - (len(hs) % 2)
    pairs = [(hs[order[i]], hs[order[i + 1]]) for i in range(0, k, 2)]
    return Matching(tuple(pairs), d)


def graph_of_matching(m: Matching) -> MultiGraph:
    return MultiGraph(m.base.n, tuple((x.vertex, y.vertex) for x, y in m.pairs))


def _check_partition(n: int, A, B) -> tuple[frozenset, frozenset]:
    A, B = frozenset(int(v) for v in A), frozenset(int(v) for v in B)
    if A & B or (A | B) != frozenset(range(1, n + 1)):
        raise InvalidInputError(f"A={sorted(A)}, B={sorted(B)} do not partition 1..{n}")
    return A, B


def edge_type(u: int, v: int, A) -> str:
    ua, va = u in A, v in A
    if ua and va:
        return "A"
    if not ua and not va:
        return "B"
    return "cross"


def classify_matching(m: Matching, A, B) -> EdgeTypeCounts:
    A, B = _check_partition(m.base.n, A, B)
    c = Counter(edge_type(x.vertex, y.vertex, A) for x, y in m.pairs)
    return EdgeTypeCounts(c["A"], c["B"], c["cross"])


def is_feasible(d: DegreeSequence, A, B, t: EdgeTypeCounts) -> bool:
    A, B = _check_partition(d.n, A, B)
    alpha, beta, gamma = t
    if min(alpha, beta, gamma) < 0:
        return False
    return 2 * alpha + gamma <= d.degree_of(A) and 2 * beta + gamma <= d.degree_of(B)


def feasible_triples(d: DegreeSequence, A, B) -> list[EdgeTypeCounts]:
    """All feasible (alpha, beta, gamma), lexicographically ordered."""
    A, B = _check_partition(d.n, A, B)
    dA, dB = d.degree_of(A), d.degree_of(B)
    out = []
    for gamma in range(min(dA, dB) + 1):
        for alpha in range((dA - gamma) // 2 + 1):
            for beta in range((dB - gamma) // 2 + 1):
                out.append(EdgeTypeCounts(alpha, beta, gamma))
    return sorted(out)


def enumerate_class(d: DegreeSequence, A, B, t: EdgeTypeCounts) -> list[Matching]:
    """Every matching with exactly ``t`` A-, B- and cross-edges, each once."""
    A, B = _check_partition(d.n, A, B)
    if d.total > ENUMERATION_GUARD:
        raise ResourceGuardError(f"{d.total} half-edges exceeds enumeration guard {ENUMERATION_GUARD}")
    t = EdgeTypeCounts(*t)
    if not is_feasible(d, A, B, t):
        return []
    hs = build_half_edges(d)
    in_a = [h.vertex in A for h in hs]
    size = len(hs)
    # suffix counts of A/B half-edges still to be processed, for pruning
    left_a = [0] * (size + 1)
    left_b = [0] * (size + 1)
    for i in range(size - 1, -1, -1):
        left_a[i] = left_a[i + 1] + in_a[i]
        left_b[i] = left_b[i + 1] + (not in_a[i])

    out: list[Matching] = []
    used = [False] * size
    pairs: list[tuple[HalfEdge, HalfEdge]] = []

    def free_after(i, flag):
        return sum(1 for j in range(i, size) if not used[j] and in_a[j] == flag)

    def rec(i, ra, rb, rc):
        while i < size and used[i]:
            i += 1
        if ra == rb == rc == 0:
            out.append(Matching(tuple(pairs), d))
            return
        if i == size:
            return
        fa, fb = free_after(i, True), free_after(i, False)
        if 2 * ra + rc > fa or 2 * rb + rc > fb:
            return
        used[i] = True
        # leave half-edge i unmatched
        rec(i + 1, ra, rb, rc)
        for j in range(i + 1, size):
            if used[j]:
                continue
            if in_a[i] and in_a[j]:
                if not ra:
                    continue
                nxt = (ra - 1, rb, rc)
            elif not in_a[i] and not in_a[j]:
                if not rb:
                    continue
                nxt = (ra, rb - 1, rc)
            else:
                if not rc:
                    continue
                nxt = (ra, rb, rc - 1)
            used[j] = True
            pairs.append((hs[i], hs[j]))
            rec(i + 1, *nxt)
            pairs.pop()
            used[j] = False
        used[i] = False

    rec(0, t.alpha, t.beta, t.gamma)
    return out


def _pick_pair(rng, pool: list, pool_b: list | None = None):
    if pool_b is None:
        i, j = rng.choice(len(pool), size=2, replace=False)
        i, j = int(i), int(j)
        x, y = pool[i], pool[j]
        for k in sorted((i, j), reverse=True):
            pool.pop(k)
        return x, y
    i = int(rng.integers(len(pool)))
    j = int(rng.integers(len(pool_b)))
    return pool.pop(i), pool_b.pop(j)


def sample_in_class(d: DegreeSequence, A, B, t: EdgeTypeCounts, seed, order: str = "ABC") -> Matching:
    """Uniform member of M(t), built by adding uniformly random typed edges.

    ``order`` is the type order ("A", "B", "C" for cross); any order gives
    the same distribution.
    """
    A, B = _check_partition(d.n, A, B)
    t = EdgeTypeCounts(*t)
    if not is_feasible(d, A, B, t):
        raise FeasibilityError(f"{tuple(t)} infeasible")
    rng = np.random.default_rng(seed)
    hs = build_half_edges(d)
    free_a = [h for h in hs if h.vertex in A]
    free_b = [h for h in hs if h.vertex in B]
    pairs = []
    budget = {"A": t.alpha, "B": t.beta, "C": t.gamma}
    for kind in order:
        for _ in range(budget[kind]):
            if kind == "A":
                pairs.append(_pick_pair(rng, free_a))
            elif kind == "B":
                pairs.append(_pick_pair(rng, free_b))
            else:
                pairs.append(_pick_pair(rng, free_a, free_b))
    return Matching(tuple(pairs), d)


# Vertex-level enumeration. Half-edges of one vertex are interchangeable for
# any quantity that depends only on the induced multigraph, so matchings are
# enumerated up to that symmetry with integer multiplicities.

def _graph_weights(degrees: tuple[int, ...], A: frozenset | None, partial: bool):
    n = len(degrees)
    rem = list(degrees)
    edges: list[tuple[int, int]] = []
    out: dict = {}
    in_a = [(v + 1) in A for v in range(n)] if A is not None else [True] * n

    def emit(counts, weight):
        key = (counts, tuple(sorted(edges)))
        out[key] = out.get(key, 0) + weight

    def rec(v, counts, weight):
        while v < n and rem[v] == 0:
            v += 1
        if v == n:
            emit(counts, weight)
            return
        rem[v] -= 1
        if partial:
            rec(v, counts, weight)
        for w in range(v, n):
            mult = rem[w]
            if mult == 0:
                continue
            rem[w] -= 1
            edges.append((v + 1, w + 1))
            if in_a[v] and in_a[w]:
                nc = (counts[0] + 1, counts[1], counts[2])
            elif not in_a[v] and not in_a[w]:
                nc = (counts[0], counts[1] + 1, counts[2])
            else:
                nc = (counts[0], counts[1], counts[2] + 1)
            rec(v, nc, weight * mult)
            edges.pop()
            rem[w] += 1
        rem[v] += 1

    rec(0, (0, 0, 0), 1)
    return out


@lru_cache(maxsize=256)
def class_graph_weights(d: DegreeSequence, A: frozenset, B: frozenset) -> dict:
    """For every feasible triple, the induced-multigraph distribution of M(t).

    Returns ``{EdgeTypeCounts: {edge_tuple: count}}`` where counts are the
    numbers of matchings in the class inducing each edge multiset.
    """
    A, B = _check_partition(d.n, A, B)
    raw = _graph_weights(d.degrees, A, partial=True)
    out: dict = {}
    for (counts, edges), w in raw.items():
        out.setdefault(EdgeTypeCounts(*counts), {})[edges] = w
    return out


@lru_cache(maxsize=256)
def complete_graph_weights(d: DegreeSequence) -> dict:
    """Multigraph distribution of the configuration model: {edge_tuple: count}."""
    if d.total % 2:
        raise ParityError(f"total degree {d.total} is odd")
    raw = _graph_weights(d.degrees, None, partial=False)
    out: dict = {}
    for (_, edges), w in raw.items():
        out[edges] = out.get(edges, 0) + w
    return out


def iter_class_graphs(d: DegreeSequence, A, B, t: EdgeTypeCounts) -> Iterator[tuple[MultiGraph, int]]:
    A, B = _check_partition(d.n, A, B)
    for edges, w in class_graph_weights(d, A, B).get(EdgeTypeCounts(*t), {}).items():
        yield MultiGraph(d.n, edges), w


def random_regular_multigraph(n: int, r: int, seed) -> MultiGraph:
    d = DegreeSequence(tuple([r] * n))
    return graph_of_matching(sample_complete_matching(d, seed))
