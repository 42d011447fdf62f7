"""Hybrid bisection values: expected signed max-bisection under i.i.d. +-1
edge labels (+1 with probability p).

Exact values are polynomials in p. ``hybrid_polynomial`` returns integer
coefficients S[k] = sum of optima over labelings with k positive labels, so
that HB_p = sum_k S[k] p^k (1-p)^(m-k) where m counts non-loop edges (loop
labels never affect a cut and marginalise out).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import cuts
from .config_model import MultiGraph, _check_partition
from .cuts import LocalSearchParams, SignedGraph
from .errors import InvalidInputError, ResourceGuardError

LABELING_GUARD = 20
_BLOCK = 1 << 22


def _chunk(rows: int) -> int:
    return max(1, _BLOCK // max(rows, 1))


@dataclass(frozen=True)
class HybridEstimate:
    value: float
    stderr: float
    samples: int
    mode: str  # "exact" or "monte-carlo"
    solver: str = "exact"

    def to_dict(self) -> dict:
        out = {"value": self.value, "stderr": self.stderr, "samples": self.samples, "mode": self.mode}
        if self.solver != "exact":
            out["solver"] = self.solver
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _check_p(p):
    if not 0 <= p <= 1:
        raise InvalidInputError(f"p={p} outside [0, 1]")


def sample_labeling(g: MultiGraph, p: float, seed) -> SignedGraph:
    _check_p(p)
    rng = np.random.default_rng(seed)
    labels = np.where(rng.random(g.m) < p, 1, -1)
    return SignedGraph(g, tuple(int(x) for x in labels))


def _masks_for(n, A, B):
    if A is None:
        return cuts.bisection_masks(n)
    return cuts.constrained_masks(n, A, B)


@lru_cache(maxsize=1 << 16)
def _polynomial(n: int, edges: tuple, A: frozenset | None, B: frozenset | None) -> tuple[int, ...]:
    live = [e for e in edges if e[0] != e[1]]
    m = len(live)
    if m > LABELING_GUARD:
        raise ResourceGuardError(f"{m} edges exceeds labeling guard {LABELING_GUARD}")
    masks = _masks_for(n, A, B)
    cross = np.unique(cuts.crossing_matrix(masks, live), axis=0).astype(np.int64)
    coeffs = np.zeros(m + 1, dtype=np.int64)
    bit = np.arange(m, dtype=np.int64)
    step = _chunk(len(cross))
    for start in range(0, 1 << m, step):
        idx = np.arange(start, min(1 << m, start + step), dtype=np.int64)
        labels = ((idx[:, None] >> bit) & 1) * 2 - 1
        best = (labels @ cross.T).max(axis=1) if m else np.zeros(len(idx), dtype=np.int64)
        np.add.at(coeffs, np.bitwise_count(idx).astype(np.int64), best)
    return tuple(int(c) for c in coeffs)


def hybrid_polynomial(g: MultiGraph, A=None, B=None) -> tuple[int, ...]:
    if A is not None:
        A, B = _check_partition(g.n, A, B)
    return _polynomial(g.n, tuple(sorted(g.edges)), A, B)


def eval_polynomial(coeffs, p) -> Fraction:
    """sum_k coeffs[k] p^k (1-p)^(m-k), exactly for the binary value of p."""
    p = Fraction(p)
    q = 1 - p
    m = len(coeffs) - 1
    return sum((c * p**k * q ** (m - k) for k, c in enumerate(coeffs) if c), Fraction(0))


def _degenerate(g: MultiGraph, p, A, B) -> int:
    label = 1 if p == 1 else -1
    sg = SignedGraph.uniform(g, label)
    if A is None:
        return cuts.signed_max_bisection(sg).value
    return cuts.constrained_max_bisection(sg, A, B).value


def hybrid_exact_fraction(g: MultiGraph, p, A=None, B=None) -> Fraction:
    _check_p(p)
    if p in (0, 1):
        # one labeling carries all the weight
        return Fraction(_degenerate(g, p, A, B))
    return eval_polynomial(hybrid_polynomial(g, A, B), p)


def hybrid_exact(g: MultiGraph, p: float) -> HybridEstimate:
    return HybridEstimate(float(hybrid_exact_fraction(g, p)), 0.0, 1 << g.m, "exact")


def constrained_hybrid_exact(g: MultiGraph, A, B, p: float) -> HybridEstimate:
    return HybridEstimate(float(hybrid_exact_fraction(g, p, A, B)), 0.0, 1 << g.m, "exact")


def _sample_labels(m: int, p: float, samples: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.where(rng.random((samples, m)) < p, 1, -1).astype(np.int64)


def _mean_stderr(values) -> tuple[float, float]:
    vals = np.asarray(values, dtype=float)
    if len(vals) < 2:
        return float(vals.mean()), 0.0
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals)))


def _mc(g: MultiGraph, p, samples, seed, solver, A, B, params) -> HybridEstimate:
    _check_p(p)
    if samples < 2:
        raise InvalidInputError("need at least 2 samples")
    if solver not in ("exact", "heuristic"):
        raise InvalidInputError(f"unknown solver {solver!r}")
    labels = _sample_labels(g.m, p, samples, seed)
    if solver == "exact":
        masks = _masks_for(g.n, A, B)
        cross = cuts.crossing_matrix(masks, g.edges).astype(np.int64)
        cross = np.unique(cross, axis=0)
        step = _chunk(len(cross))
        vals = np.concatenate([
            (labels[i:i + step] @ cross.T).max(axis=1) for i in range(0, samples, step)
        ]) if g.m else np.zeros(samples)
    else:
        params = params or LocalSearchParams()
        constraints = None if A is None else (A, B)
        seeds = cuts.seed_sequence(seed).spawn(samples)
        vals = [
            cuts.local_search_bisection(SignedGraph(g, tuple(int(x) for x in row)), constraints, params, s).value
            for row, s in zip(labels, seeds)
        ]
    mean, se = _mean_stderr(vals)
    return HybridEstimate(mean, se, samples, "monte-carlo", solver)


def hybrid_mc(g: MultiGraph, p: float, samples: int, seed, solver: str = "exact",
              params: LocalSearchParams | None = None) -> HybridEstimate:
    """Sample-mean estimate of HB_p; heuristic solving yields a lower-biased proxy."""
    return _mc(g, p, samples, seed, solver, None, None, params)


def constrained_hybrid_mc(g: MultiGraph, A, B, p: float, samples: int, seed, solver: str = "exact",
                          params: LocalSearchParams | None = None) -> HybridEstimate:
    A, B = _check_partition(g.n, A, B)
    return _mc(g, p, samples, seed, solver, A, B, params)


class HybridParam:
    """HB_p as a graph parameter, exact, returning Fractions."""

    def __init__(self, p):
        _check_p(p)
        self.p = p

    def __call__(self, g: MultiGraph) -> Fraction:
        return hybrid_exact_fraction(g, self.p)

    def __repr__(self):
        return f"HB_{self.p}"


class ConstrainedHybridParam:
    """HB_p^{A,B} as a graph pseudo-parameter, exact, returning Fractions."""

    def __init__(self, A, B, p):
        _check_p(p)
        self.A, self.B, self.p = frozenset(A), frozenset(B), p

    def __call__(self, g: MultiGraph) -> Fraction:
        return hybrid_exact_fraction(g, self.p, self.A, self.B)

    def __repr__(self):
        return f"HB_{self.p}^(A={sorted(self.A)},B={sorted(self.B)})"
