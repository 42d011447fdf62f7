"""Degree sequences, finitely supported degree distributions and the
tail-sum Wasserstein distance between them."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidInputError

_MASS_TOL = 1e-12


@dataclass(frozen=True)
class DegreeSequence:
    """Per-vertex degrees; vertex ``i`` (1-based) has degree ``degrees[i-1]``."""

    degrees: tuple[int, ...]
    total: int = field(init=False)

    def __post_init__(self):
        degs = tuple(int(x) for x in self.degrees)
        if len(degs) == 0:
            raise InvalidInputError("degree sequence must have at least one vertex")
        if any(x < 0 for x in degs):
            raise InvalidInputError(f"negative degree in {degs}")
        object.__setattr__(self, "degrees", degs)
        object.__setattr__(self, "total", sum(degs))

    @property
    def n(self) -> int:
        return len(self.degrees)

    def __len__(self):
        return len(self.degrees)

    def __getitem__(self, vertex: int) -> int:
        if not 1 <= vertex <= self.n:
            raise IndexError(vertex)
        return self.degrees[vertex - 1]

    def degree_of(self, vertices: Iterable[int]) -> int:
        """Total degree d(S) of a vertex set."""
        return sum(self.degrees[v - 1] for v in vertices)

    def restrict(self, vertices: Iterable[int]) -> "DegreeSequence":
        """Restriction to ``vertices``, relabelled 1..|S| in increasing order."""
        vs = sorted(vertices)
        return DegreeSequence(tuple(self.degrees[v - 1] for v in vs))

    def to_json(self) -> str:
        return json.dumps(list(self.degrees))

    @classmethod
    def from_json(cls, text: str) -> "DegreeSequence":
        return cls(tuple(json.loads(text)))


@dataclass(frozen=True)
class DegreeDistribution:
    """Probability mass on a finite set of nonnegative integers."""

    mass: Mapping[int, float]
    mean: float = field(init=False)

    def __post_init__(self):
        clean = {}
        for k, p in self.mass.items():
            k = int(k)
            p = float(p)
            if k < 0:
                raise InvalidInputError(f"negative support point {k}")
            if p < 0:
                raise InvalidInputError(f"negative mass {p} at {k}")
            if p > 0:
                clean[k] = clean.get(k, 0.0) + p
        total = math.fsum(clean.values())
        if abs(total - 1.0) > _MASS_TOL:
            raise InvalidInputError(f"masses sum to {total!r}, not 1")
        object.__setattr__(self, "mass", dict(sorted(clean.items())))
        object.__setattr__(self, "mean", math.fsum(k * p for k, p in clean.items()))

    def __getitem__(self, k: int) -> float:
        return self.mass.get(k, 0.0)

    @property
    def support(self) -> list[int]:
        return list(self.mass)

    def to_json(self) -> str:
        return json.dumps({"mass": {str(k): p for k, p in self.mass.items()}})

    @classmethod
    def from_json(cls, text: str) -> "DegreeDistribution":
        obj = json.loads(text)
        return cls({int(k): p for k, p in obj["mass"].items()})


def empirical_distribution(d: DegreeSequence | Sequence[int]) -> DegreeDistribution:
    degs = d.degrees if isinstance(d, DegreeSequence) else tuple(d)
    if len(degs) == 0:
        raise InvalidInputError("empirical distribution of an empty sequence")
    n = len(degs)
    counts: dict[int, int] = {}
    for x in degs:
        counts[x] = counts.get(x, 0) + 1
    return DegreeDistribution({k: c / n for k, c in counts.items()})


def regular_distribution(r: int) -> DegreeDistribution:
    if r < 0:
        raise InvalidInputError("degree must be nonnegative")
    return DegreeDistribution({int(r): 1.0})


def truncated_poisson(lam: float, cutoff: int) -> DegreeDistribution:
    """Poisson(lam) restricted to 0..cutoff and renormalised."""
    if not lam > 0:
        raise InvalidInputError("lambda must be positive")
    if cutoff < 1:
        raise InvalidInputError("cutoff must be at least 1")
    logs = [k * math.log(lam) - lam - math.lgamma(k + 1) for k in range(cutoff + 1)]
    weights = [math.exp(x) for x in logs]
    z = math.fsum(weights)
    return DegreeDistribution({k: w / z for k, w in enumerate(weights)})


def wasserstein(mu: DegreeDistribution, nu: DegreeDistribution) -> float:
    """W(mu, nu) = sum_{i>=1} |sum_{k>=i} (mu(k) - nu(k))|."""
    top = max(mu.support + nu.support + [0])
    tail = 0.0
    tails = []
    # tails accumulate from the top down; i = 0 is excluded
    for k in range(top, 0, -1):
        tail += mu[k] - nu[k]
        tails.append(abs(tail))
    return math.fsum(tails)


def sample_iid_degrees(mu: DegreeDistribution, n: int, seed) -> DegreeSequence:
    if n <= 0:
        raise InvalidInputError("n must be positive")
    rng = np.random.default_rng(seed)
    ks = np.array(mu.support, dtype=np.int64)
    ps = np.array([mu.mass[k] for k in mu.support])
    if len(ks) == 1:
        return DegreeSequence(tuple([int(ks[0])] * n))
    draws = rng.choice(ks, size=n, p=ps / ps.sum())
    return DegreeSequence(tuple(int(x) for x in draws))


@dataclass(frozen=True)
class ConvergenceReport:
    n: int
    histogram_gap: dict[int, float]
    max_histogram_gap: float
    mean_gap: float
    tol: float
    passed: bool


def check_distributional_convergence(
    sequences: Sequence[DegreeSequence], mu: DegreeDistribution, tol: float = 0.05
) -> ConvergenceReport:
    """Compare the largest-n sequence of a family against ``mu``.

    Both the per-degree frequencies and the mean must be within ``tol``;
    the two conditions are independent (a single hub can move the mean
    without moving any frequency by more than 1/n).
    """
    if not sequences:
        raise InvalidInputError("need at least one degree sequence")
    d = max(sequences, key=lambda s: s.n)
    emp = empirical_distribution(d)
    keys = sorted(set(emp.support) | set(mu.support))
    gaps = {k: abs(emp[k] - mu[k]) for k in keys}
    max_gap = max(gaps.values())
    mean_gap = abs(d.total / d.n - mu.mean)
    return ConvergenceReport(
        n=d.n,
        histogram_gap=gaps,
        max_histogram_gap=max_gap,
        mean_gap=mean_gap,
        tol=tol,
        passed=max_gap < tol and mean_gap < tol,
    )
