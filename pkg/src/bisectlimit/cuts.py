"""Exact and heuristic cut / bisection solvers on signed multigraphs.

Exact solvers enumerate bitmasks with numpy. Bit ``v-1`` of a mask is set
when vertex ``v`` is on side 2; vertex 1 is always on side 1, so every
unordered partition appears once.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numba
import numpy as np

from .config_model import MultiGraph, _check_partition
from .errors import InvalidInputError, ResourceGuardError

EXACT_GUARD = 26
OPTIMA_GUARD = 24
DELTA_GUARD = 12
_CHUNK = 1 << 21


@dataclass(frozen=True)
class SignedGraph:
    graph: MultiGraph
    labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if len(labels) != self.graph.m:
            raise InvalidInputError(f"{len(labels)} labels for {self.graph.m} edges")
        if any(x not in (1, -1) for x in labels):
            raise InvalidInputError("labels must be +1 or -1")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def uniform(cls, g: MultiGraph, label: int = 1) -> "SignedGraph":
        return cls(g, (label,) * g.m)

    @property
    def n(self) -> int:
        return self.graph.n

    def add_edge(self, u: int, v: int, label: int) -> "SignedGraph":
        return SignedGraph(self.graph.add_edge(u, v), self.labels + (label,))


@dataclass(frozen=True)
class Bisection:
    """Two-sided vertex partition; ``side[v-1]`` is 1 or 2, vertex 1 on side 1."""

    side: tuple[int, ...]

    def __post_init__(self):
        side = tuple(int(s) for s in self.side)
        if any(s not in (1, 2) for s in side):
            raise InvalidInputError("sides must be 1 or 2")
        if side and side[0] == 2:
            side = tuple(3 - s for s in side)
        object.__setattr__(self, "side", side)

    @classmethod
    def from_mask(cls, mask: int, n: int) -> "Bisection":
        return cls(tuple(2 if (mask >> i) & 1 else 1 for i in range(n)))

    @classmethod
    def from_sets(cls, V1: Iterable[int], n: int) -> "Bisection":
        V1 = set(V1)
        return cls(tuple(1 if v in V1 else 2 for v in range(1, n + 1)))

    @property
    def mask(self) -> int:
        return sum(1 << i for i, s in enumerate(self.side) if s == 2)

    def parts(self) -> tuple[frozenset, frozenset]:
        V1 = frozenset(v + 1 for v, s in enumerate(self.side) if s == 1)
        V2 = frozenset(v + 1 for v, s in enumerate(self.side) if s == 2)
        return V1, V2

    def is_balanced(self, A=None, B=None) -> bool:
        def ok(vs):
            c = sum(1 if self.side[v - 1] == 1 else -1 for v in vs)
            return abs(c) <= 1

        if not ok(range(1, len(self.side) + 1)):
            return False
        if A is not None and not ok(A):
            return False
        if B is not None and not ok(B):
            return False
        return True


@dataclass(frozen=True)
class CutResult:
    value: int
    witness: Bisection
    optima_count: int | None = None

    def to_dict(self) -> dict:
        out = {"value": int(self.value), "side": list(self.witness.side)}
        if self.optima_count is not None:
            out["optima_count"] = int(self.optima_count)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def signed_cut_value(g: SignedGraph, b: Bisection) -> int:
    if len(b.side) != g.n:
        raise InvalidInputError("bisection does not cover the vertex set")
    return sum(w for (u, v), w in zip(g.graph.edges, g.labels) if b.side[u - 1] != b.side[v - 1])


def seed_sequence(seed) -> np.random.SeedSequence:
    """Accept an int, a sequence of ints or an existing SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


# ---------------------------------------------------------------- masks

def _sizes(k: int) -> tuple[int, ...]:
    return tuple(sorted({k // 2, (k + 1) // 2}))


def _bits(vertices) -> int:
    return sum(1 << (v - 1) for v in vertices)


@lru_cache(maxsize=64)
def _masks(n: int, side2_sizes: tuple[int, ...] | None, a_bits: int = 0,
           a_sizes: tuple[int, ...] | None = None, b_bits: int = 0,
           b_sizes: tuple[int, ...] | None = None) -> np.ndarray:
    """Canonical masks (vertex 1 on side 1) satisfying the size filters."""
    if n > EXACT_GUARD:
        raise ResourceGuardError(f"n={n} exceeds exact-solver guard {EXACT_GUARD}")
    if n <= 1:
        return np.zeros(1, dtype=np.int64)
    total = 1 << (n - 1)
    keep = []
    for start in range(0, total, _CHUNK):
        m = np.arange(start, min(total, start + _CHUNK), dtype=np.int64) << 1
        sel = np.ones(len(m), dtype=bool)
        if side2_sizes is not None:
            sel &= np.isin(np.bitwise_count(m), side2_sizes)
        if a_sizes is not None:
            sel &= np.isin(np.bitwise_count(m & a_bits), a_sizes)
        if b_sizes is not None:
            sel &= np.isin(np.bitwise_count(m & b_bits), b_sizes)
        keep.append(m[sel])
    out = np.concatenate(keep)
    out.setflags(write=False)
    return out


def bisection_masks(n: int) -> np.ndarray:
    return _masks(n, _sizes(n))


def constrained_masks(n: int, A, B) -> np.ndarray:
    A, B = _check_partition(n, A, B)
    return _masks(n, _sizes(n), _bits(A), _sizes(len(A)), _bits(B), _sizes(len(B)))


def all_masks(n: int) -> np.ndarray:
    return _masks(n, None)


def alpha_masks(n: int, ratio: float) -> np.ndarray:
    lo, hi = math.floor(ratio * n), math.ceil(ratio * n)
    sizes = tuple(sorted({lo, hi, n - lo, n - hi}))
    return _masks(n, sizes)


def cut_values(masks: np.ndarray, edges: Sequence[tuple[int, int]], weights: Sequence[int]) -> np.ndarray:
    """Signed cut value of every mask."""
    vals = np.zeros(len(masks), dtype=np.int64)
    for (u, v), w in zip(edges, weights):
        if u == v:
            continue
        cross = ((masks >> (u - 1)) ^ (masks >> (v - 1))) & 1
        if w == 1:
            vals += cross
        else:
            vals += w * cross
    return vals


def crossing_matrix(masks: np.ndarray, edges: Sequence[tuple[int, int]]) -> np.ndarray:
    """(len(masks), len(edges)) 0/1 matrix of which edges each mask cuts."""
    out = np.zeros((len(masks), len(edges)), dtype=np.int8)
    for j, (u, v) in enumerate(edges):
        if u != v:
            out[:, j] = ((masks >> (u - 1)) ^ (masks >> (v - 1))) & 1
    return out


def _best(masks, g: SignedGraph, sign: int = 1) -> CutResult:
    vals = cut_values(masks, g.graph.edges, g.labels) * sign
    i = int(np.argmax(vals))
    return CutResult(int(vals[i]) * sign, Bisection.from_mask(int(masks[i]), g.n))


def _as_signed(g) -> SignedGraph:
    return g if isinstance(g, SignedGraph) else SignedGraph.uniform(g)


def max_cut(g: MultiGraph) -> CutResult:
    """Largest unsigned cut over all (unbalanced) partitions."""
    return _best(all_masks(g.n), SignedGraph.uniform(g))


def min_bisection(g: MultiGraph) -> CutResult:
    return _best(bisection_masks(g.n), SignedGraph.uniform(g), sign=-1)


def max_bisection(g: MultiGraph) -> CutResult:
    return _best(bisection_masks(g.n), SignedGraph.uniform(g))


def signed_max_bisection(g: SignedGraph) -> CutResult:
    g = _as_signed(g)
    return _best(bisection_masks(g.n), g)


def constrained_max_bisection(g: SignedGraph, A, B) -> CutResult:
    """Best signed bisection that also bisects A and B."""
    g = _as_signed(g)
    masks = constrained_masks(g.n, A, B)
    if len(masks) == 0:
        raise AssertionError("no (A,B)-bisection exists")
    return _best(masks, g)


def enumerate_optimal_constrained(g: SignedGraph, A, B) -> list[Bisection]:
    g = _as_signed(g)
    if g.n > OPTIMA_GUARD:
        raise ResourceGuardError(f"n={g.n} exceeds optimum-enumeration guard {OPTIMA_GUARD}")
    masks = constrained_masks(g.n, A, B)
    vals = cut_values(masks, g.graph.edges, g.labels)
    best = vals.max()
    return [Bisection.from_mask(int(m), g.n) for m in masks[vals == best]]


def alpha_cut(g: SignedGraph, ratio: float, mode: str = "max") -> CutResult:
    """Optimum over partitions with one side of size floor or ceil of ratio*n."""
    if not 0 < ratio < 1:
        raise InvalidInputError("ratio must lie in (0, 1)")
    if mode not in ("max", "min"):
        raise InvalidInputError(f"unknown mode {mode!r}")
    g = _as_signed(g)
    return _best(alpha_masks(g.n, ratio), g, sign=1 if mode == "max" else -1)


# ---------------------------------------------------------- local search

@dataclass(frozen=True)
class LocalSearchParams:
    restarts: int = 10
    sweeps: int = 200
    cooling: float = 0.995
    initial_temperature: float | None = None  # default 2 * max degree


def _feasible_sizes(n, A, B):
    whole = _sizes(n)
    if A is None:
        return whole, None, None
    return whole, _sizes(len(A)), _sizes(len(B))


@numba.njit(cache=True)
def _anneal(side, in_a, constrained, ptr, idx, wts, whole_ok, a_ok, b_ok, us, vs, rs, t0, cooling):
    """Metropolis moves on a two-sided partition; returns the best value seen and its sides."""
    n = side.shape[0]
    spin = 1 - 2 * side
    gain = np.zeros(n, dtype=np.int64)
    val = 0
    for u in range(n):
        for j in range(ptr[u], ptr[u + 1]):
            gain[u] += wts[j] * spin[idx[j]]
            if u < idx[j] and spin[u] != spin[idx[j]]:
                val += wts[j]
        gain[u] *= spin[u]
    c2 = 0
    ca2 = 0
    for u in range(n):
        c2 += side[u]
        if in_a[u]:
            ca2 += side[u]
    best = val
    best_side = side.copy()
    temp = t0
    for s in range(us.shape[0]):
        for k in range(n):
            u = us[s, k]
            v = vs[s, k]
            if u == v or side[u] == side[v]:
                # transfer u alone
                d2 = 1 - 2 * side[u]
                nc2 = c2 + d2
                nca2 = ca2 + d2 if in_a[u] else ca2
                if not whole_ok[nc2] or (constrained and not (a_ok[nca2] and b_ok[nc2 - nca2])):
                    continue
                delta = gain[u]
                if delta < 0 and rs[s, k] >= math.exp(delta / temp):
                    continue
                val += delta
                side[u] ^= 1
                spin[u] = -spin[u]
                gain[u] = -gain[u]
                for j in range(ptr[u], ptr[u + 1]):
                    gain[idx[j]] += 2 * wts[j] * spin[idx[j]] * spin[u]
                c2 = nc2
                ca2 = nca2
            else:
                da = 0
                if in_a[u] != in_a[v]:
                    da = 1 - 2 * side[u] if in_a[u] else 1 - 2 * side[v]
                nca2 = ca2 + da
                if constrained and not (a_ok[nca2] and b_ok[c2 - nca2]):
                    continue
                w_uv = 0
                for j in range(ptr[u], ptr[u + 1]):
                    if idx[j] == v:
                        w_uv = wts[j]
                delta = gain[u] + gain[v] - 2 * w_uv * spin[u] * spin[v]
                if delta < 0 and rs[s, k] >= math.exp(delta / temp):
                    continue
                val += delta
                for z in (u, v):
                    side[z] ^= 1
                    spin[z] = -spin[z]
                    gain[z] = -gain[z]
                    for j in range(ptr[z], ptr[z + 1]):
                        gain[idx[j]] += 2 * wts[j] * spin[idx[j]] * spin[z]
                ca2 = nca2
            if val > best:
                best = val
                best_side[:] = side
        temp = max(temp * cooling, 1e-9)
    return best, best_side


def local_search_bisection(g: SignedGraph, constraints=None, params: LocalSearchParams | None = None,
                           seed=0, balanced: bool = True) -> CutResult:
    """Simulated annealing over balance-preserving moves.

    ``constraints`` is ``None`` (plain bisection) or an ``(A, B)`` pair.
    Moves are single-vertex transfers and two-vertex swaps, proposed at
    random and rejected outright when they break a balance constraint.
    With ``balanced=False`` every partition is allowed, giving a max-cut
    heuristic.
    """
    g = _as_signed(g)
    params = params or LocalSearchParams()
    n = g.n
    if n == 0:
        return CutResult(0, Bisection(()))
    A = B = None
    if constraints is not None:
        if not balanced:
            raise InvalidInputError("(A, B) constraints require balanced=True")
        A, B = _check_partition(n, *constraints)
    in_a = np.array([(v + 1) in A for v in range(n)]) if A is not None else np.ones(n, dtype=bool)
    nbrs: list[dict[int, int]] = [dict() for _ in range(n)]
    for (u, v), w in zip(g.graph.edges, g.labels):
        if u == v:
            continue
        nbrs[u - 1][v - 1] = nbrs[u - 1].get(v - 1, 0) + w
        nbrs[v - 1][u - 1] = nbrs[v - 1].get(u - 1, 0) + w
    ptr = np.zeros(n + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(d) for d in nbrs])
    idx = np.array([x for d in nbrs for x in d], dtype=np.int64)
    wts = np.array([w for d in nbrs for w in d.values()], dtype=np.int64)
    deg = max(g.graph.degrees() + [1])
    t0 = params.initial_temperature if params.initial_temperature is not None else 2.0 * deg
    whole, a_sz, b_sz = _feasible_sizes(n, A, B)
    whole_ok = np.zeros(n + 2, dtype=np.bool_)
    whole_ok[list(range(n + 1)) if not balanced else list(whole)] = True
    a_ok = np.zeros(n + 2, dtype=np.bool_)
    b_ok = np.zeros(n + 2, dtype=np.bool_)
    if A is not None:
        a_ok[list(a_sz)] = True
        b_ok[list(b_sz)] = True

    def feasible(c2, ca2):
        return whole_ok[c2] and (A is None or (a_ok[ca2] and b_ok[c2 - ca2]))

    best_val, best_side = None, None
    for ss in seed_sequence(seed).spawn(params.restarts):
        rng = np.random.default_rng(ss)
        # random feasible start: bisect A and B separately
        side = np.zeros(n, dtype=np.int64)  # 0 -> side 1, 1 -> side 2
        if A is None:
            perm = rng.permutation(n)
            side[perm[: n // 2 + rng.integers(0, n % 2 + 1)]] = 1
        else:
            for grp in (np.flatnonzero(in_a), np.flatnonzero(~in_a)):
                perm = rng.permutation(grp)
                side[perm[: len(grp) // 2]] = 1
            if not feasible(int(side.sum()), int(side[in_a].sum())):
                # both parts odd with matching surplus: move one B vertex over
                side[np.flatnonzero(~in_a & (side == 0))[0]] = 1
        us = rng.integers(0, n, size=(params.sweeps, n))
        vs = rng.integers(0, n, size=(params.sweeps, n))
        rs = rng.random((params.sweeps, n))
        val, cur_side = _anneal(side, in_a, A is not None, ptr, idx, wts, whole_ok, a_ok, b_ok,
                                us, vs, rs, float(t0), float(params.cooling))
        if best_val is None or val > best_val:
            best_val, best_side = val, cur_side
    witness = Bisection(tuple(int(s) + 1 for s in best_side))
    return CutResult(int(signed_cut_value(g, witness)), witness)


# ------------------------------------------------- parameter properties

def delta_matrix(param: Callable[[MultiGraph], float], g: MultiGraph) -> np.ndarray:
    """Delta[i, j] = f(G + ij) - f(G), diagonal entries adding loops."""
    if g.n > DELTA_GUARD:
        raise ResourceGuardError(f"n={g.n} exceeds delta-matrix guard {DELTA_GUARD}")
    base = float(param(g))
    out = np.zeros((g.n, g.n))
    for i in range(1, g.n + 1):
        for j in range(i, g.n + 1):
            out[i - 1, j - 1] = out[j - 1, i - 1] = float(param(g.add_edge(i, j))) - base
    return out


def components(g: MultiGraph) -> list[list[int]]:
    parent = list(range(g.n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges:
        parent[find(u)] = find(v)
    groups: dict[int, list[int]] = {}
    for v in range(1, g.n + 1):
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values())


@dataclass
class PropertyReport:
    additive: bool
    lipschitz: bool
    concave: bool
    witnesses: dict


def check_parameter_properties(param: Callable[[MultiGraph], float], g: MultiGraph, parts=None,
                               kappa: float = 1.0, trials: int = 200, seed=0,
                               tol: float = 1e-9) -> PropertyReport:
    """Check additivity, kappa-Lipschitz and concavity of ``param`` at ``g``.

    Additivity compares f(g) with the sum over ``parts`` (default: the
    connected components). Concavity requires x' Delta x <= 0 for x
    orthogonal to the all-ones vector, tested on random zero-sum vectors
    and on the top eigenvalue of the centred Delta matrix.
    """
    witnesses = {}
    parts = parts if parts is not None else components(g)
    whole = float(param(g))
    split = sum(float(param(g.induced(p))) for p in parts)
    additive = abs(whole - split) <= tol
    if not additive:
        witnesses["additive"] = {"whole": whole, "sum_of_parts": split, "parts": [list(p) for p in parts]}

    delta = delta_matrix(param, g)
    worst = float(np.abs(delta).max()) if g.n else 0.0
    lipschitz = worst <= kappa + tol
    if not lipschitz:
        i, j = np.unravel_index(np.abs(delta).argmax(), delta.shape)
        witnesses["lipschitz"] = {"pair": [int(i) + 1, int(j) + 1], "delta": float(delta[i, j])}

    concave = True
    if g.n >= 2:
        rng = np.random.default_rng(seed)
        xs = rng.standard_normal((trials, g.n))
        xs -= xs.mean(axis=1, keepdims=True)
        q = np.einsum("ti,ij,tj->t", xs, delta, xs)
        centre = np.eye(g.n) - 1.0 / g.n
        evals, evecs = np.linalg.eigh(centre @ delta @ centre)
        if q.max() > tol or evals[-1] > tol:
            concave = False
            witnesses["concave"] = {"x": evecs[:, -1].tolist(), "eigenvalue": float(evals[-1]),
                                    "max_sampled_form": float(q.max())}
    return PropertyReport(additive, lipschitz, concave, witnesses)


def edge_count(g: MultiGraph) -> int:
    return g.m


def mc_value(g: MultiGraph) -> int:
    return max_cut(g).value


def mb_value(g: MultiGraph) -> int:
    return max_bisection(g).value


def min_bisection_value(g: MultiGraph) -> int:
    return min_bisection(g).value
