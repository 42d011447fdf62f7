"""Interpolation over matching classes M(alpha, beta, gamma).

F_g(t) is the average of a graph pseudo-parameter g over the uniform
matching in M(t). For g = HB_p^{A,B} this module also provides the
equivalence-class decomposition of the unmatched half-edges relative to
the optimal (A,B)-bisections, the closed-form expected increments for
adding a random A-, B- or cross-edge, and numeric checks of the
Lipschitz, local super-additivity and interpolation inequalities.
"""
from __future__ import annotations

import dataclasses
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from . import cuts
from .config_model import (
    EdgeTypeCounts,
    HalfEdge,
    Matching,
    MultiGraph,
    _check_partition,
    class_graph_weights,
    complete_graph_weights,
    edge_type,
    feasible_triples,
    graph_of_matching,
    is_feasible,
    sample_complete_matching,
    sample_in_class,
)
from .cuts import LocalSearchParams, SignedGraph
from .degrees import DegreeSequence
from .errors import FeasibilityError, InvalidInputError, PreconditionError
from .hybrid import ConstrainedHybridParam, HybridEstimate, HybridParam, _mean_stderr

TOL = 1e-12


def psi(x: float) -> float:
    """7 * sqrt(x * ln(1 + x))."""
    if x < 0:
        raise InvalidInputError("psi is defined on x >= 0")
    return 7.0 * math.sqrt(x * math.log1p(x))


@dataclass
class CheckReport:
    passed: bool
    lhs: float
    rhs: float
    slack: float
    witness: str = ""
    details: dict = field(default_factory=dict)

    @classmethod
    def compare(cls, lhs, rhs, witness: str = "", tol: float = TOL, **details) -> "CheckReport":
        lhs, rhs = float(lhs), float(rhs)
        ok = lhs <= rhs + tol
        return cls(ok, lhs, rhs, rhs - lhs, "" if ok else witness, details)

    def to_dict(self) -> dict:
        out = {"passed": self.passed, "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack,
               "witness": self.witness}
        if self.details:
            out["details"] = self.details
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), default=float)


# ------------------------------------------------------------- F values

def _mean(items: Iterable[tuple[object, int]]):
    """Weighted mean, exact when every value is rational."""
    total_w = 0
    exact = True
    acc_exact = Fraction(0)
    acc_float = 0.0
    for val, w in items:
        total_w += w
        if exact and isinstance(val, Rational):
            acc_exact += Fraction(val) * w
        else:
            if exact:
                acc_float = float(acc_exact)
                exact = False
            acc_float += float(val) * w
    if total_w == 0:
        raise FeasibilityError("empty class")
    return acc_exact / total_w if exact else acc_float / total_w


def F_exact(param: Callable[[MultiGraph], float], d: DegreeSequence, A, B, t: EdgeTypeCounts) -> float:
    """Exact average of ``param`` over the uniform matching in M(t)."""
    return float(F_value(param, d, A, B, t))


def F_value(param, d: DegreeSequence, A, B, t):
    A, B = _check_partition(d.n, A, B)
    t = EdgeTypeCounts(*t)
    if not is_feasible(d, A, B, t):
        raise FeasibilityError(f"{tuple(t)} infeasible")
    weights = class_graph_weights(d, A, B)[t]
    return _mean((param(MultiGraph(d.n, edges)), w) for edges, w in weights.items())


def F_mc(param, d: DegreeSequence, A, B, t: EdgeTypeCounts, samples: int, seed) -> HybridEstimate:
    A, B = _check_partition(d.n, A, B)
    t = EdgeTypeCounts(*t)
    if not is_feasible(d, A, B, t):
        raise FeasibilityError(f"{tuple(t)} infeasible")
    seeds = cuts.seed_sequence(seed).spawn(samples)
    vals = [float(param(graph_of_matching(sample_in_class(d, A, B, t, s)))) for s in seeds]
    mean, se = _mean_stderr(vals)
    return HybridEstimate(mean, se, samples, "monte-carlo")


def adjacent_pairs(d: DegreeSequence, A, B) -> list[tuple[EdgeTypeCounts, EdgeTypeCounts]]:
    """Feasible triple pairs differing by one in exactly one coordinate."""
    triples = feasible_triples(d, A, B)
    have = set(triples)
    out = []
    for t in triples:
        for k in range(3):
            u = list(t)
            u[k] += 1
            u = EdgeTypeCounts(*u)
            if u in have:
                out.append((t, u))
    return out


def check_lipschitz_F(param, d: DegreeSequence, A, B, pairs) -> CheckReport:
    cache: dict = {}

    def F(t):
        t = EdgeTypeCounts(*t)
        if t not in cache:
            cache[t] = F_value(param, d, A, B, t)
        return cache[t]

    worst = None
    for t, u in pairs:
        gap = abs(F(t) - F(u))
        l1 = sum(abs(x - y) for x, y in zip(t, u))
        excess = gap - l1
        if worst is None or excess > worst[0]:
            worst = (excess, gap, l1, t, u)
    if worst is None:
        return CheckReport(True, 0.0, 0.0, 0.0)
    _, gap, l1, t, u = worst
    return CheckReport.compare(gap, l1, witness=f"{tuple(t)} vs {tuple(u)}", pairs=len(pairs))


# --------------------------------------------------- class decomposition

class ClassPair(NamedTuple):
    o_A: int
    p_A: int
    o_B: int
    p_B: int
    O: tuple = ()
    P: tuple = ()


@dataclass(frozen=True)
class ClassDecomposition:
    """Opposing class pairs (O_i, P_i) of the unmatched half-edges."""

    pairs: tuple[ClassPair, ...]

    @classmethod
    def from_counts(cls, counts: Iterable[Sequence[int]]) -> "ClassDecomposition":
        return cls(tuple(ClassPair(*c[:4]) for c in counts))

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def a(self) -> int:
        return sum(c.o_A + c.p_A for c in self.pairs)

    @property
    def b(self) -> int:
        return sum(c.o_B + c.p_B for c in self.pairs)

    @property
    def has_empty_partner(self) -> bool:
        return any((c.o_A + c.o_B == 0) != (c.p_A + c.p_B == 0) for c in self.pairs)


def _signed(m: Matching, labels) -> SignedGraph:
    return SignedGraph(graph_of_matching(m), tuple(labels))


def half_edge_classes(m: Matching, labels, A, B) -> ClassDecomposition:
    """Group unmatched half-edges by their side pattern over all optimal
    (A,B)-bisections; pair each pattern with its complement."""
    A, B = _check_partition(m.base.n, A, B)
    optima = cuts.enumerate_optimal_constrained(_signed(m, labels), A, B)
    classes: dict[tuple, list[HalfEdge]] = {}
    for h in m.unmatched():
        pattern = tuple(b.side[h.vertex - 1] for b in optima)
        classes.setdefault(pattern, []).append(h)
    pairs = []
    done = set()
    for pattern in sorted(classes, key=lambda pt: classes[pt][0]):
        if pattern in done:
            continue
        other = tuple(3 - s for s in pattern)
        done.update((pattern, other))
        O = tuple(classes[pattern])
        P = tuple(classes.get(other, ()))
        pairs.append(ClassPair(
            sum(h.vertex in A for h in O), sum(h.vertex in A for h in P),
            sum(h.vertex in B for h in O), sum(h.vertex in B for h in P), O, P,
        ))
    return ClassDecomposition(tuple(pairs))


def increment_fraction(dec: ClassDecomposition, p, edge_type: str, variant: str = "exact") -> Fraction:
    if variant not in ("exact", "paper"):
        raise InvalidInputError(f"unknown variant {variant!r}")
    p = Fraction(p)
    q = 1 - p
    a, b = dec.a, dec.b
    cs = dec.pairs
    if edge_type in ("A", "B"):
        n = a if edge_type == "A" else b
        if n < 2:
            raise PreconditionError(f"need two unmatched {edge_type} half-edges, have {n}")
        xs = [(c.o_A, c.p_A) if edge_type == "A" else (c.o_B, c.p_B) for c in cs]
        if variant == "exact":
            same = sum(Fraction(o * (o - 1) + r * (r - 1), n * (n - 1)) for o, r in xs)
            opposed = sum(Fraction(2 * o * r, n * (n - 1)) for o, r in xs)
        else:
            # squares corrected by the without-replacement term in the +1
            # part, but an a^2 normalisation in the -1 part
            same = sum(Fraction(o * o + r * r, n * n)
                       - Fraction(o * (n - o) + r * (n - r), n * n * (n - 1)) for o, r in xs)
            opposed = sum(Fraction(2 * o * r, n * n) for o, r in xs)
        return p * (1 - same) + q * (-opposed)
    if edge_type == "cross":
        if a < 1 or b < 1:
            raise PreconditionError("cross edge needs unmatched half-edges on both sides")
        same = sum(Fraction(c.o_A * c.o_B + c.p_A * c.p_B, a * b) for c in cs)
        opposed = sum(Fraction(c.o_A * c.p_B + c.p_A * c.o_B, a * b) for c in cs)
        return p * (1 - same) + q * (-opposed)
    raise InvalidInputError(f"unknown edge type {edge_type!r}")


def increment_formula(dec: ClassDecomposition, p: float, edge_type: str, variant: str = "exact") -> float:
    """Closed-form expected change of MB^{A,B} when a uniformly random
    labelled edge of ``edge_type`` joins two unmatched half-edges.

    ``variant="exact"`` normalises both label terms by the number of
    unordered pairs; ``variant="paper"`` normalises the -1 term by a^2
    (b^2) instead, which overstates it for small a.
    """
    return float(increment_fraction(dec, p, edge_type, variant))


def _eligible(x: HalfEdge, y: HalfEdge, A, edge_kind: str) -> bool:
    return edge_type(x.vertex, y.vertex, A) == edge_kind


def increment_bruteforce_fraction(m: Matching, labels, A, B, p, edge_kind: str) -> Fraction:
    A, B = _check_partition(m.base.n, A, B)
    if edge_kind not in ("A", "B", "cross"):
        raise InvalidInputError(f"unknown edge type {edge_kind!r}")
    g = _signed(m, labels)
    base = cuts.constrained_max_bisection(g, A, B).value
    free = m.unmatched()
    cache: dict = {}
    p = Fraction(p)
    total = Fraction(0)
    count = 0
    for x, y in itertools.combinations(free, 2):
        if not _eligible(x, y, A, edge_kind):
            continue
        key = (min(x.vertex, y.vertex), max(x.vertex, y.vertex))
        if key not in cache:
            up = cuts.constrained_max_bisection(g.add_edge(*key, 1), A, B).value - base
            down = cuts.constrained_max_bisection(g.add_edge(*key, -1), A, B).value - base
            cache[key] = (up, down)
        up, down = cache[key]
        total += p * up + (1 - p) * down
        count += 1
    if count == 0:
        raise PreconditionError(f"no unmatched pair for a {edge_kind} edge")
    return total / count


def increment_bruteforce(m: Matching, labels, A, B, p: float, edge_kind: str) -> float:
    """Direct expectation over all eligible unmatched half-edge pairs and both labels."""
    return float(increment_bruteforce_fraction(m, labels, A, B, p, edge_kind))


# ------------------------------------------------------------- checks

def max_delta(d: DegreeSequence, A, B, t: EdgeTypeCounts) -> int:
    """Largest delta with (alpha, beta, gamma + delta) feasible."""
    alpha, beta, gamma = t
    return min(d.degree_of(A) - 2 * alpha - gamma, d.degree_of(B) - 2 * beta - gamma)


def check_local_superadd(d: DegreeSequence, A, B, t: EdgeTypeCounts, delta: int, p: float,
                         param=None) -> CheckReport:
    """1/2 (F(a+1,b,c) + F(a,b+1,c)) <= F(a,b,c+1) + 2/delta."""
    A, B = _check_partition(d.n, A, B)
    alpha, beta, gamma = t
    if delta < 2:
        raise PreconditionError("delta must be at least 2")
    if not is_feasible(d, A, B, EdgeTypeCounts(alpha, beta, gamma + delta)):
        raise FeasibilityError(f"({alpha},{beta},{gamma}+{delta}) infeasible")
    param = param or ConstrainedHybridParam(A, B, p)
    fa = F_value(param, d, A, B, (alpha + 1, beta, gamma))
    fb = F_value(param, d, A, B, (alpha, beta + 1, gamma))
    fc = F_value(param, d, A, B, (alpha, beta, gamma + 1))
    lhs = (fa + fb) / 2
    rhs = fc + Fraction(2, delta)
    return CheckReport.compare(lhs, rhs, witness=f"t={tuple(t)}, delta={delta}, p={p}")


def _sos(dec: ClassDecomposition):
    a, b = dec.a, dec.b
    half_p1 = -Fraction(1, 2) * sum(
        (Fraction(c.o_A, a) - Fraction(c.o_B, b)) ** 2 + (Fraction(c.p_A, a) - Fraction(c.p_B, b)) ** 2
        for c in dec.pairs)
    half_p05 = -Fraction(1, 4) * sum(
        (Fraction(c.o_A + c.p_A, a) - Fraction(c.o_B + c.p_B, b)) ** 2 for c in dec.pairs)
    return half_p1, half_p05


def desired_form(dec: ClassDecomposition, p) -> Fraction:
    """The quadratic form that must be nonpositive; affine in p."""
    a, b = dec.a, dec.b
    if a < 1 or b < 1:
        raise PreconditionError("need a >= 1 and b >= 1")
    p = Fraction(p)
    first = sum(
        Fraction(c.o_A ** 2 + c.p_A ** 2, a * a) + Fraction(c.o_B ** 2 + c.p_B ** 2, b * b)
        - Fraction(2 * c.o_A * c.o_B + 2 * c.p_A * c.p_B, a * b)
        for c in dec.pairs)
    second = sum(
        Fraction(2 * c.o_A * c.p_A, a * a) + Fraction(2 * c.o_B * c.p_B, b * b)
        - Fraction(2 * c.o_A * c.p_B + 2 * c.p_A * c.o_B, a * b)
        for c in dec.pairs)
    return -p / 2 * first - (1 - p) / 2 * second


def check_desired_inequality(dec: ClassDecomposition, p: float) -> CheckReport:
    value = desired_form(dec, p)
    sos_p1, sos_half = _sos(dec)
    return CheckReport.compare(
        value, 0, witness=f"decomposition {[tuple(c[:4]) for c in dec.pairs]}, p={p}",
        sos_p1=float(sos_p1), sos_half=float(sos_half),
        form_p1=float(desired_form(dec, 1)), form_half=float(desired_form(dec, Fraction(1, 2))),
        sos_agree=bool(sos_p1 == desired_form(dec, 1) and sos_half == desired_form(dec, Fraction(1, 2))),
    )


def check_interpolation_inequality(param, d: DegreeSequence, A, B, gamma: int) -> CheckReport:
    """F(dA//2, dB//2, 0) <= F((dA-g)//2, (dB-g)//2, g) + psi(g)."""
    A, B = _check_partition(d.n, A, B)
    dA, dB = d.degree_of(A), d.degree_of(B)
    if not 0 <= gamma <= min(dA, dB):
        raise FeasibilityError(f"gamma={gamma} outside 0..{min(dA, dB)}")
    lhs = F_value(param, d, A, B, (dA // 2, dB // 2, 0))
    mid = F_value(param, d, A, B, ((dA - gamma) // 2, (dB - gamma) // 2, gamma))
    return CheckReport.compare(lhs, float(mid) + psi(gamma), witness=f"gamma={gamma}",
                               interpolated=float(mid), psi=psi(gamma))


def expected_over_model(param, d: DegreeSequence):
    """E[param(G_d)] by exhaustive enumeration of complete matchings."""
    return _mean((param(MultiGraph(d.n, edges)), w) for edges, w in complete_graph_weights(d).items())


def check_corollary_average(param, d: DegreeSequence, A, B) -> CheckReport:
    """F(dA//2, dB//2, 0) <= E[param(G_d)] + psi(|E(G_d)|)."""
    A, B = _check_partition(d.n, A, B)
    lhs = F_value(param, d, A, B, (d.degree_of(A) // 2, d.degree_of(B) // 2, 0))
    avg = expected_over_model(param, d)
    slack_fn = psi(d.total // 2)
    return CheckReport.compare(lhs, float(avg) + slack_fn, witness=f"d={list(d.degrees)}",
                               expectation=float(avg), psi=slack_fn)


def _subadd_parts(d: DegreeSequence, A, B):
    A, B = _check_partition(d.n, A, B)
    if not A or not B:
        raise PreconditionError("both parts of the partition must be nonempty")
    if d.degree_of(A) % 2 or d.degree_of(B) % 2:
        raise PreconditionError("d(A) and d(B) must both be even")
    return A, B, d.restrict(A), d.restrict(B)


def check_subadditivity(d: DegreeSequence, A, B, p: float, mode: str = "exact", samples: int = 2000,
                        seed=0, exact_limit: int = 14,
                        params: LocalSearchParams | None = None) -> CheckReport:
    """E[HB_p(G_{d|A})] + E[HB_p(G_{d|B})] <= E[HB_p^{A,B}(G_d)] + psi(|E(G_d)|).

    Exact mode enumerates every complete matching. Monte Carlo mode draws
    ``samples`` (graph, labeling) pairs per expectation, solving exactly up
    to ``exact_limit`` vertices and by local search beyond; the comparison
    is widened by three combined standard errors.
    """
    A, B, dA, dB = _subadd_parts(d, A, B)
    edges = d.total // 2
    if mode == "exact":
        hb = HybridParam(p)
        left = expected_over_model(hb, dA) + expected_over_model(hb, dB)
        right = expected_over_model(ConstrainedHybridParam(A, B, p), d)
        return CheckReport.compare(left, float(right) + psi(edges), witness=f"d={list(d.degrees)}",
                                   expectation_constrained=float(right), psi=psi(edges))
    if mode != "mc":
        raise InvalidInputError(f"unknown mode {mode!r}")
    root = cuts.seed_sequence(seed)
    sa, sb, sab = root.spawn(3)
    ea = _model_mc(dA, p, samples, sa, None, exact_limit, params)
    eb = _model_mc(dB, p, samples, sb, None, exact_limit, params)
    eab = _model_mc(d, p, samples, sab, (A, B), exact_limit, params)
    sigma = math.sqrt(ea.stderr ** 2 + eb.stderr ** 2 + eab.stderr ** 2)
    lhs = ea.value + eb.value
    rhs = eab.value + psi(edges)
    return CheckReport.compare(lhs, rhs + 3 * sigma, witness=f"d={list(d.degrees)}",
                               stderr=sigma, solver=ea.solver if ea.solver == eab.solver else "mixed")


def _model_mc(d: DegreeSequence, p, samples, seedseq, constraints, exact_limit, params) -> HybridEstimate:
    """Estimate E[HB_p(G_d)] (or its constrained form) from (graph, labeling) draws."""
    heuristic = d.n > exact_limit
    params = params or LocalSearchParams(restarts=2, sweeps=40)
    vals = []
    for s in seedseq.spawn(samples):
        gs, ls, hs = s.spawn(3)
        g = graph_of_matching(sample_complete_matching(d, gs))
        rng = np.random.default_rng(ls)
        sg = SignedGraph(g, tuple(int(x) for x in np.where(rng.random(g.m) < p, 1, -1)))
        if heuristic:
            vals.append(cuts.local_search_bisection(sg, constraints, params, hs).value)
        elif constraints is None:
            vals.append(cuts.signed_max_bisection(sg).value)
        else:
            vals.append(cuts.constrained_max_bisection(sg, *constraints).value)
    mean, se = _mean_stderr(vals)
    return HybridEstimate(mean, se, samples, "monte-carlo", "heuristic" if heuristic else "exact")


# ------------------------------------------------------------- sweeps

def _partitions(total: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    largest = total if largest is None else largest
    if total == 0:
        yield ()
        return
    for first in range(min(total, largest), 0, -1):
        for rest in _partitions(total - first, first):
            yield (first,) + rest


def canonical_splits(d: DegreeSequence) -> Iterator[tuple[frozenset, frozenset]]:
    """Vertex partitions (A, B) up to permutations of equal-degree vertices.

    Within each run of equal degrees A takes a prefix, so isomorphic
    choices are produced once.
    """
    runs: list[list[int]] = []
    for v in range(1, d.n + 1):
        if runs and d[runs[-1][0]] == d[v]:
            runs[-1].append(v)
        else:
            runs.append([v])
    for takes in itertools.product(*[range(len(r) + 1) for r in runs]):
        A = frozenset(v for r, k in zip(runs, takes) for v in r[:k])
        yield A, frozenset(range(1, d.n + 1)) - A


def enumerable_instances(max_half_edges: int, min_half_edges: int = 1, even_only: bool = False):
    """Degree sequences (positive entries, non-increasing) with their canonical splits."""
    for total in range(min_half_edges, max_half_edges + 1):
        if even_only and total % 2:
            continue
        for degs in _partitions(total):
            d = DegreeSequence(degs)
            for A, B in canonical_splits(d):
                yield d, A, B


def matching_from_edges(d: DegreeSequence, edges) -> Matching:
    """A representative matching inducing ``edges`` (copies assigned in order)."""
    used = [0] * (d.n + 1)
    pairs = []
    for u, v in edges:
        used[u] += 1
        x = HalfEdge(u, used[u])
        used[v] += 1
        y = HalfEdge(v, used[v])
        pairs.append((x, y))
    return Matching(tuple(pairs), d)


def all_labelings(m: int) -> Iterator[tuple[int, ...]]:
    return itertools.product((1, -1), repeat=m)


# ------------------------------------------------ batched increment sweep

@dataclass
class IncrementSweep:
    """Outcome of comparing closed-form and brute-force increments over
    every (matching, labeling) of one instance, for both added-edge labels."""

    rows: int = 0
    comparisons: int = 0
    mismatches: list = field(default_factory=list)
    empty_partner_rows: int = 0


_LABEL_CACHE: dict[int, np.ndarray] = {}


def _labelings(m: int) -> np.ndarray:
    if m not in _LABEL_CACHE:
        idx = np.arange(1 << m, dtype=np.int64)
        _LABEL_CACHE[m] = ((idx[:, None] >> np.arange(m, dtype=np.int64)) & 1) * 2 - 1
    return _LABEL_CACHE[m]


def increment_sweep(d: DegreeSequence, A, B) -> IncrementSweep:
    """Exhaustive check of the exact increment formulas on one instance.

    Rows are every induced multigraph of every feasible class (matchings
    that induce the same multigraph give identical rows) under every
    labeling of its non-loop edges. For each row and each edge type the
    expected changes under a +1 and a -1 added edge are computed twice:
    from opposing-class sizes (closed form) and by re-solving MB^{A,B}
    after adding each eligible edge. Both are compared as exact integers
    scaled by the number of eligible half-edge pairs.
    """
    A, B = _check_partition(d.n, A, B)
    n = d.n
    masks = cuts.constrained_masks(n, A, B)
    pair_list = [(u, v) for u in range(1, n + 1) for v in range(u, n + 1)]
    pair_index = {e: i for i, e in enumerate(pair_list)}
    pc = cuts.crossing_matrix(masks, pair_list).astype(np.int64)  # M x P
    in_a = np.array([v in A for v in range(1, n + 1)])
    degs = np.array(d.degrees, dtype=np.int64)

    vals_blocks, resid_blocks, tags = [], [], []
    for t, ws in class_graph_weights(d, A, B).items():
        for edges in ws:
            live = [pair_index[e] for e in edges if e[0] != e[1]]
            labs = _labelings(len(live))
            vals = labs @ pc[:, live].T if live else np.zeros((1, len(masks)), dtype=np.int64)
            deg = np.zeros(n, dtype=np.int64)
            for u, v in edges:
                deg[u - 1] += 1
                deg[v - 1] += 1
            vals_blocks.append(vals)
            resid_blocks.append(np.broadcast_to(degs - deg, (len(vals), n)))
            tags.extend((tuple(t), edges, i) for i in range(len(vals)))
    V = np.concatenate(vals_blocks)
    r = np.concatenate(resid_blocks)
    R = len(V)
    out = IncrementSweep(rows=R)

    best = V.max(axis=1)
    opt = (V == best[:, None]).astype(np.int64)
    nopt = opt.sum(axis=1)
    sep = opt @ pc  # optima separating each vertex pair
    P = len(pair_list)
    same_m = np.zeros((R, n, n), dtype=bool)
    opp_m = np.zeros((R, n, n), dtype=bool)
    up = np.zeros((R, P), dtype=np.int64)
    down = np.zeros((R, P), dtype=np.int64)
    mult = np.zeros((R, P), dtype=np.int64)
    kind = []
    for j, (u, v) in enumerate(pair_list):
        same_m[:, u - 1, v - 1] = same_m[:, v - 1, u - 1] = sep[:, j] == 0
        opp_m[:, u - 1, v - 1] = opp_m[:, v - 1, u - 1] = sep[:, j] == nopt
        col = pc[:, j]
        if u != v:
            up[:, j] = (V + col).max(axis=1) - best
            down[:, j] = (V - col).max(axis=1) - best
            mult[:, j] = r[:, u - 1] * r[:, v - 1]
        else:
            mult[:, j] = r[:, u - 1] * (r[:, u - 1] - 1) // 2
        kind.append(edge_type(u, v, A))
    kind = np.array(kind)

    # class of a vertex = smallest vertex never separated from it
    rep = same_m.argmax(axis=1)  # R x n
    onehot = rep[:, :, None] == np.arange(n)[None, None, :]
    rA = r * in_a
    rB = r * ~in_a
    sA = np.einsum("rv,rvc->rc", rA, onehot)
    sB = np.einsum("rv,rvc->rc", rB, onehot)
    # opposing class: the class of any vertex separated from c by every optimum
    has_partner = opp_m.any(axis=2)
    partner = np.take_along_axis(rep, opp_m.argmax(axis=2), axis=1)
    pA = np.where(has_partner, np.take_along_axis(sA, partner, axis=1), 0)
    pB = np.where(has_partner, np.take_along_axis(sB, partner, axis=1), 0)
    is_rep = rep == np.arange(n)[None, :]
    occupied = (sA + sB) * is_rep > 0
    partner_occupied = np.where(has_partner, np.take_along_axis(sA + sB, partner, axis=1), 0) > 0
    out.empty_partner_rows = int((occupied & ~partner_occupied).any(axis=1).sum())

    a = rA.sum(axis=1)
    b = rB.sum(axis=1)
    sA, sB, pA, pB = sA * is_rep, sB * is_rep, pA * is_rep, pB * is_rep
    formula = {
        # (pairs, increase count under +1, decrease count under -1)
        "A": (a * (a - 1) // 2, a * (a - 1) // 2 - (sA * (sA - 1) // 2).sum(1), -(sA * pA).sum(1) // 2),
        "B": (b * (b - 1) // 2, b * (b - 1) // 2 - (sB * (sB - 1) // 2).sum(1), -(sB * pB).sum(1) // 2),
        "cross": (a * b, a * b - (sA * sB).sum(1), -(sA * pB).sum(1)),
    }
    for name, (pairs, f_up, f_down) in formula.items():
        sel = kind == name
        b_pairs = (mult[:, sel]).sum(1)
        b_up = (mult[:, sel] * up[:, sel]).sum(1)
        b_down = (mult[:, sel] * down[:, sel]).sum(1)
        live = pairs > 0
        out.comparisons += 2 * int(live.sum())
        bad = live & ((b_pairs != pairs) | (b_up != f_up) | (b_down != f_down))
        for i in np.flatnonzero(bad)[:5]:
            out.mismatches.append({
                "d": list(d.degrees), "A": sorted(A), "class": tags[i][0], "edges": tags[i][1],
                "labeling": int(tags[i][2]), "type": name,
                "formula": (int(pairs[i]), int(f_up[i]), int(f_down[i])),
                "bruteforce": (int(b_pairs[i]), int(b_up[i]), int(b_down[i])),
            })
    return out


# ------------------------------------------- batched interpolation sweep

def _monomial(S: np.ndarray) -> list[int]:
    """Coefficients c_j with sum_k S[k] p^k (1-p)^(m-k) = sum_j c_j p^j."""
    m = len(S) - 1
    c = [0] * (m + 1)
    for k, s in enumerate(S):
        s = int(s)
        if s:
            for i in range(m - k + 1):
                c[k + i] += s * math.comb(m - k, i) * (-1) ** i
    return c


def class_polynomials(d: DegreeSequence, A, B) -> dict[EdgeTypeCounts, tuple[list[int], int]]:
    """For every feasible class t, (numerator coefficients, total weight) with
    F_{HB_p^{A,B}}(t) = sum_j num[j] p^j / weight, computed from all member graphs.
    """
    A, B = _check_partition(d.n, A, B)
    n = d.n
    masks = cuts.constrained_masks(n, A, B)
    pair_list = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    pair_index = {e: i for i, e in enumerate(pair_list)}
    pc = cuts.crossing_matrix(masks, pair_list).astype(np.int64)
    out = {}
    for t, graphs in class_graph_weights(d, A, B).items():
        num: list[int] = []
        total = 0
        for edges, w in graphs.items():
            live = [pair_index[e] for e in edges if e[0] != e[1]]
            labs = _labelings(len(live))
            best = (labs @ pc[:, live].T).max(axis=1) if live else np.zeros(1, dtype=np.int64)
            pos = np.bitwise_count(np.arange(len(labs), dtype=np.int64))
            S = np.bincount(pos, weights=best, minlength=len(live) + 1).round().astype(np.int64)
            c = _monomial(S)
            if len(c) > len(num):
                num.extend([0] * (len(c) - len(num)))
            for j, x in enumerate(c):
                num[j] += w * x
            total += w
        out[EdgeTypeCounts(*t)] = (num, total)
    return out


def _poly_value(poly: tuple[list[int], int], p: Fraction) -> Fraction:
    num, w = poly
    return sum((c * p**j for j, c in enumerate(num) if c), Fraction(0)) / w


@dataclass
class InterpolationSweep:
    """Outcome of the local super-additivity and interpolation checks on one instance."""

    superadd_checks: int = 0
    interpolation_checks: int = 0
    failures: list = field(default_factory=list)
    min_superadd_slack: float = math.inf
    min_interpolation_slack: float = math.inf


def interpolation_sweep(d: DegreeSequence, A, B, ps: Sequence) -> InterpolationSweep:
    """Every local super-additivity check at maximal delta and every
    interpolation inequality of one instance, for each p in ``ps``."""
    A, B = _check_partition(d.n, A, B)
    polys = class_polynomials(d, A, B)
    dA, dB = d.degree_of(A), d.degree_of(B)
    out = InterpolationSweep()
    for p in ps:
        p = Fraction(p)
        F = {t: _poly_value(poly, p) for t, poly in polys.items()}
        for t in polys:
            delta = max_delta(d, A, B, t)
            if delta < 2:
                continue
            a, b, c = t
            lhs = (F[(a + 1, b, c)] + F[(a, b + 1, c)]) / 2
            slack = F[(a, b, c + 1)] + Fraction(2, delta) - lhs
            out.superadd_checks += 1
            out.min_superadd_slack = min(out.min_superadd_slack, float(slack))
            if slack < -TOL:
                out.failures.append(("local_superadd", tuple(t), delta, str(p), float(slack)))
        top = F[(dA // 2, dB // 2, 0)]
        for gamma in range(min(dA, dB) + 1):
            mid = F[((dA - gamma) // 2, (dB - gamma) // 2, gamma)]
            slack = float(mid) + psi(gamma) - float(top)
            out.interpolation_checks += 1
            out.min_interpolation_slack = min(out.min_interpolation_slack, slack)
            if slack < -TOL:
                out.failures.append(("interpolation", gamma, str(p), slack))
    return out


def sweep_jsonl(instances, ps: Sequence = (Fraction(1, 2), Fraction(3, 4), 1),
                increments: bool = False) -> Iterator[str]:
    """One JSON line per (d, A, B) instance with the interpolation sweep
    outcome and, optionally, the increment-formula sweep."""
    for d, A, B in instances:
        row = {"degrees": list(d.degrees), "A": sorted(A), "B": sorted(B)}
        if A and B:
            sw = dataclasses.asdict(interpolation_sweep(d, A, B, ps))
            row["interpolation"] = {k: (None if v == math.inf else v) for k, v in sw.items()}
        if increments:
            row["increments"] = dataclasses.asdict(increment_sweep(d, A, B))
        yield json.dumps(row, default=float)
