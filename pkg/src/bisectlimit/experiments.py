"""Declarative experiments over random graphs from the configuration model.

An experiment is described by an :class:`ExperimentConfig` (usually loaded
from JSON) and executed with :func:`run_experiment`. Every random draw is
derived from ``(master_seed, n, replica)``:

* ``replica_seed(master_seed, n, replica)`` is the first 64-bit word of
  ``SeedSequence([master_seed, n, replica])`` and is written to the output;
* ``SeedSequence(replica_seed).spawn(3)`` gives independent streams for
  the degree sequence, the half-edge matching and the labels/solver.

Replicas may run on a thread pool; results are always reduced in
``(n, replica)`` order, so outputs do not depend on the thread count.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import cuts
from .config_model import (
    MultiGraph,
    feasible_triples,
    graph_of_matching,
    sample_complete_matching,
    sample_near_complete_matching,
)
from .cuts import LocalSearchParams, SignedGraph
from .degrees import (
    DegreeDistribution,
    DegreeSequence,
    empirical_distribution,
    regular_distribution,
    sample_iid_degrees,
    truncated_poisson,
    wasserstein,
)
from .errors import ConfigError, InvalidInputError
from .hybrid import HybridParam, hybrid_mc
from .interpolation import (
    TOL,
    CheckReport,
    ClassDecomposition,
    check_local_superadd,
    check_subadditivity,
    class_graph_weights,
    desired_form,
    enumerable_instances,
    expected_over_model,
    half_edge_classes,
    matching_from_edges,
    max_delta,
    psi,
)

KINDS = ("convergence", "subadditivity", "concentration", "conjecture", "mu-lipschitz", "p-scan")
FORMATS = ("csv", "jsonl", "plotdata")
CSV_FIELDS = ("n", "replica", "seed", "value", "value_per_n", "stderr", "runtime_ms")
# exhaustive labeling/matching enumeration is used below this many half-edges
EXACT_MODEL_HALF_EDGES = 12


# ------------------------------------------------------------------ config

@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    model: dict
    sizes: tuple[int, ...] = ()
    p: float = 1.0
    replicas: int = 1
    solver: str = "exact"
    master_seed: int = 0
    output: str | None = None
    format: str = "csv"
    samples: int = 200
    model_b: dict | None = None
    threads: int = 1
    record_runtime: bool = False
    epsilons: tuple[float, ...] | None = None
    p_grid: tuple[float, ...] | None = None
    max_half_edges: int = 6
    local_search: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.solver not in ("exact", "heuristic"):
            raise ConfigError(f"solver must be 'exact' or 'heuristic', got {self.solver!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        sizes = tuple(int(n) for n in self.sizes)
        if not sizes and self.model.get("type") == "explicit":
            sizes = (len(self.model.get("degrees", ())),)
        if self.kind != "p-scan":
            if not sizes:
                raise ConfigError("sizes must be a nonempty list")
            if any(n < 1 for n in sizes):
                raise ConfigError("sizes must be positive")
            if any(a >= b for a, b in zip(sizes, sizes[1:])):
                raise ConfigError("sizes must be strictly ascending")
        object.__setattr__(self, "sizes", sizes)
        if self.replicas < 1:
            raise ConfigError("replicas must be at least 1")
        if self.samples < 2:
            raise ConfigError("samples must be at least 2")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if not 0 <= self.p <= 1:
            raise ConfigError(f"p={self.p} outside [0, 1]")
        for key in ("epsilons", "p_grid"):
            val = getattr(self, key)
            if val is not None:
                object.__setattr__(self, key, tuple(float(x) for x in val))
        if self.p_grid is not None and any(not 0 <= q <= 1 for q in self.p_grid):
            raise ConfigError("p_grid entries must lie in [0, 1]")
        if self.kind == "mu-lipschitz":
            if self.model_b is None:
                raise ConfigError("mu-lipschitz needs model_b")
            if len(sizes) != 1:
                raise ConfigError("mu-lipschitz compares two models at a single n")
        # validate model specs eagerly so that errors surface before any work
        for spec in (self.model, self.model_b):
            if spec is not None:
                for n in sizes or (None,):
                    _check_model(spec, n)
        if self.solver == "exact" and self.kind in ("convergence", "concentration", "conjecture",
                                                    "mu-lipschitz"):
            big = [n for n in sizes if n > cuts.EXACT_GUARD]
            if big:
                raise ConfigError(f"exact solver refused for n={big} > {cuts.EXACT_GUARD}; "
                                  "use solver 'heuristic'")
        unknown = set(self.local_search) - {f.name for f in dataclasses.fields(LocalSearchParams)}
        if unknown:
            raise ConfigError(f"unknown local_search keys {sorted(unknown)}")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        missing = {"kind", "model"} - set(data)
        if missing:
            raise ConfigError(f"missing config keys {sorted(missing)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_json(text)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for key in ("sizes", "epsilons", "p_grid"):
            if out[key] is not None:
                out[key] = list(out[key])
        return out

    @property
    def params(self) -> LocalSearchParams:
        return LocalSearchParams(**self.local_search)

    @property
    def estimate_kind(self) -> str:
        return "lower-bound" if self.solver == "heuristic" else "exact"


def _check_model(spec: dict, n: int | None) -> None:
    kind = spec.get("type") if isinstance(spec, dict) else None
    try:
        if kind == "regular":
            r = int(spec["r"])
            if r < 0:
                raise ConfigError("r must be nonnegative")
        elif kind == "poisson":
            truncated_poisson(float(spec["lam"]), int(spec["cutoff"]))
        elif kind == "histogram":
            model_distribution(spec)
        elif kind == "explicit":
            degs = DegreeSequence(tuple(spec["degrees"]))
            if n is not None and degs.n != n:
                raise ConfigError(f"explicit degrees have length {degs.n}, size is {n}")
        else:
            raise ConfigError(f"model type must be regular, poisson, histogram or explicit, got {kind!r}")
    except KeyError as exc:
        raise ConfigError(f"model {kind!r} missing field {exc}") from exc
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from exc


def model_distribution(spec: dict) -> DegreeDistribution:
    kind = spec["type"]
    if kind == "regular":
        return regular_distribution(int(spec["r"]))
    if kind == "poisson":
        return truncated_poisson(float(spec["lam"]), int(spec["cutoff"]))
    if kind == "histogram":
        return DegreeDistribution({int(k): float(v) for k, v in spec["mass"].items()})
    if kind == "explicit":
        return empirical_distribution(spec["degrees"])
    raise ConfigError(f"unknown model type {kind!r}")


def replica_seed(master_seed: int, n: int, replica: int) -> int:
    state = np.random.SeedSequence([master_seed, n, replica]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def _streams(seed: int):
    return np.random.SeedSequence(seed).spawn(3)


def repair_parity(d: DegreeSequence, rng, vertices: Sequence[int] | None = None) -> tuple[DegreeSequence, int]:
    """Make the degree total over ``vertices`` even by bumping one random vertex."""
    vertices = list(vertices) if vertices is not None else list(range(1, d.n + 1))
    if d.degree_of(vertices) % 2 == 0:
        return d, 0
    v = vertices[int(rng.integers(len(vertices)))]
    degs = list(d.degrees)
    degs[v - 1] += 1
    return DegreeSequence(tuple(degs)), 1


def draw_degrees(spec: dict, n: int, seed, repair: bool = True) -> tuple[DegreeSequence, int]:
    """Degree sequence for size ``n`` and the number of parity repairs applied."""
    kind = spec["type"]
    rng = np.random.default_rng(seed)
    if kind == "explicit":
        d = DegreeSequence(tuple(spec["degrees"]))
    elif kind == "regular":
        d = DegreeSequence((int(spec["r"]),) * n)
    else:
        d = sample_iid_degrees(model_distribution(spec), n, rng)
    if not repair:
        return d, 0
    return repair_parity(d, rng)


# ----------------------------------------------------------------- records

@dataclass(frozen=True)
class ResultRecord:
    n: int
    replica: int
    seed: int
    value: float
    value_per_n: float
    stderr: float = 0.0
    runtime_ms: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("n must be positive")
        if self.value_per_n != self.value / self.n:
            raise InvalidInputError("value_per_n must equal value / n")

    @classmethod
    def make(cls, n: int, replica: int, seed: int, value, stderr=0.0, runtime_ms=0.0) -> "ResultRecord":
        value = float(value)
        return cls(n, replica, seed, value, value / n, float(stderr), float(runtime_ms))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ResultRecord":
        return cls(**data)


@dataclass
class ExperimentResult:
    kind: str
    records: list[ResultRecord] = field(default_factory=list)
    summary: list[dict] = field(default_factory=list)
    report: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "records": [r.to_dict() for r in self.records],
            "summary": self.summary,
            "report": self.report,
            "metadata": self.metadata,
        }


def _mean_se(values: Sequence[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if len(arr) < 2:
        return float(arr.mean()), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(len(arr)))


def summarize(records: Sequence[ResultRecord]) -> list[dict]:
    """Per-n mean and standard error of value_per_n, sorted by n."""
    by_n: dict[int, list[float]] = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r.value_per_n)
    rows = []
    for n in sorted(by_n):
        mean, se = _mean_se(by_n[n])
        rows.append({"n": n, "mean": mean, "stderr": se, "replicas": len(by_n[n])})
    return rows


def trend(summary: Sequence[dict]) -> dict:
    """Successive differences of the per-n means and their stderr-weighted spread."""
    means = np.array([row["mean"] for row in summary])
    ses = np.array([row["stderr"] for row in summary])
    if len(means) and np.all(ses > 0):
        w = 1.0 / ses**2
    else:
        w = np.ones(len(means))
    centre = float(np.sum(w * means) / np.sum(w)) if len(means) else 0.0
    spread = float(np.sqrt(np.sum(w * (means - centre) ** 2) / np.sum(w))) if len(means) else 0.0
    diffs = [float(b - a) for a, b in zip(means, means[1:])]
    return {"weighted_mean": centre, "weighted_spread": spread, "differences": diffs}


def _run_tasks(fn: Callable, tasks: Sequence, threads: int) -> list:
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


def _timed(cfg: ExperimentConfig, fn: Callable):
    start = time.perf_counter()
    out = fn()
    elapsed = (time.perf_counter() - start) * 1000.0 if cfg.record_runtime else 0.0
    return out, elapsed


# ---------------------------------------------------------------- values

def signed_value(sg: SignedGraph, solver: str, params: LocalSearchParams, seed) -> int:
    if solver == "exact":
        return cuts.signed_max_bisection(sg).value
    return cuts.local_search_bisection(sg, None, params, seed).value


def hybrid_value(g: MultiGraph, p: float, cfg: ExperimentConfig, seed) -> tuple[float, float]:
    """HB_p of a fixed graph: exact at p in {0, 1}, labeling Monte Carlo otherwise."""
    if p in (0, 1):
        sg = SignedGraph.uniform(g, 1 if p == 1 else -1)
        return float(signed_value(sg, cfg.solver, cfg.params, seed)), 0.0
    est = hybrid_mc(g, p, cfg.samples, seed, cfg.solver, cfg.params)
    return est.value, est.stderr


# ------------------------------------------------------------ convergence

def _convergence_task(cfg: ExperimentConfig):
    def task(key):
        n, replica = key
        seed = replica_seed(cfg.master_seed, n, replica)
        s_deg, s_match, s_label = _streams(seed)

        def work():
            d, repairs = draw_degrees(cfg.model, n, s_deg)
            g = graph_of_matching(sample_complete_matching(d, s_match))
            return hybrid_value(g, cfg.p, cfg, s_label), repairs

        ((value, se), repairs), ms = _timed(cfg, work)
        return ResultRecord.make(n, replica, seed, value, se, ms), repairs

    return task


def run_convergence(cfg: ExperimentConfig) -> ExperimentResult:
    """HB_p of one sampled graph per (n, replica), with per-n summaries."""
    keys = [(n, i) for n in cfg.sizes for i in range(cfg.replicas)]
    outs = _run_tasks(_convergence_task(cfg), keys, cfg.threads)
    records = [rec for rec, _ in outs]
    repairs: dict[int, int] = {}
    for rec, k in outs:
        repairs[rec.n] = repairs.get(rec.n, 0) + k
    summary = summarize(records)
    for row in summary:
        row["parity_repairs"] = repairs[row["n"]]
    return ExperimentResult("convergence", records, summary, {"trend": trend(summary)})


# ----------------------------------------------------------- concentration

def azuma_bound(eps: float, total_degree: int) -> float:
    if total_degree == 0:
        return 1.0 if eps <= 0 else 0.0
    return math.exp(-eps * eps / (4.0 * total_degree))


def run_concentration(cfg: ExperimentConfig) -> ExperimentResult:
    """Empirical tails of HB_p(G_d) around its sample mean against the Azuma bound.

    The degree sequence is fixed for the whole run (drawn once for i.i.d.
    models); each replica redraws the matching and the labels.
    """
    n = cfg.sizes[0]
    d, repairs = draw_degrees(cfg.model, n, np.random.SeedSequence([cfg.master_seed, n]))

    def task(replica):
        seed = replica_seed(cfg.master_seed, n, replica)
        _, s_match, s_label = _streams(seed)

        def work():
            g = graph_of_matching(sample_complete_matching(d, s_match))
            return hybrid_value(g, cfg.p, cfg, s_label)

        (value, se), ms = _timed(cfg, work)
        return ResultRecord.make(n, replica, seed, value, se, ms)

    records = _run_tasks(task, list(range(cfg.replicas)), cfg.threads)
    values = np.array([r.value for r in records])
    mean = float(values.mean())
    scale = math.sqrt(d.total)
    grid = cfg.epsilons if cfg.epsilons is not None else tuple(np.linspace(0.0, 3.0, 10))
    rows = []
    for k in grid:
        eps = float(k) * scale
        empirical = float(np.mean(np.abs(values - mean) >= eps))
        bound = azuma_bound(eps, d.total)
        noise = math.sqrt(bound * (1 - bound) / len(values))
        rows.append({"epsilon": eps, "empirical": empirical, "bound": bound, "noise": noise,
                     "passed": empirical <= bound + 3 * noise + TOL})
    report = {
        "n": n, "degrees": list(d.degrees), "total_degree": d.total, "parity_repairs": repairs,
        "replicas": len(values), "mean": mean, "grid": rows, "passed": all(r["passed"] for r in rows),
    }
    return ExperimentResult("concentration", records, summarize(records), report)


# -------------------------------------------------------------- conjecture

def conjecture_residual(g: MultiGraph, solver: str = "exact", params: LocalSearchParams | None = None,
                        seed=0) -> dict:
    """MC(G) + mB(G) - |E(G)|.

    Heuristic solving yields a lower bound on MC and an upper bound on mB,
    so the heuristic residual is reported as a bracket of those two bounds.
    """
    if solver == "exact":
        mc = cuts.max_cut(g).value
        mb = cuts.min_bisection(g).value
        return {"kind": "value", "max_cut": mc, "min_bisection": mb, "edges": g.m,
                "residual": mc + mb - g.m}
    params = params or LocalSearchParams()
    s1, s2 = cuts.seed_sequence(seed).spawn(2)
    mc = cuts.local_search_bisection(SignedGraph.uniform(g, 1), None, params, s1, balanced=False).value
    mb = -cuts.local_search_bisection(SignedGraph.uniform(g, -1), None, params, s2).value
    return {"kind": "bracket", "max_cut_lower": mc, "min_bisection_upper": mb, "edges": g.m,
            "residual": mc + mb - g.m}


def run_conjecture(cfg: ExperimentConfig) -> ExperimentResult:
    def task(key):
        n, replica = key
        seed = replica_seed(cfg.master_seed, n, replica)
        s_deg, s_match, s_solve = _streams(seed)

        def work():
            d, _ = draw_degrees(cfg.model, n, s_deg)
            g = graph_of_matching(sample_complete_matching(d, s_match))
            return conjecture_residual(g, cfg.solver, cfg.params, s_solve)

        res, ms = _timed(cfg, work)
        return ResultRecord.make(n, replica, seed, res["residual"], 0.0, ms), res

    keys = [(n, i) for n in cfg.sizes for i in range(cfg.replicas)]
    outs = _run_tasks(task, keys, cfg.threads)
    records = [rec for rec, _ in outs]
    summary = summarize(records)
    per_n = []
    for row in summary:
        res = [r for rec, r in outs if rec.n == row["n"]]
        mean, se = _mean_se([r["residual"] for r in res])
        per_n.append({"n": row["n"], "residual_mean": mean, "residual_stderr": se,
                      "residual_per_n": mean / row["n"], "kind": res[0]["kind"]})
    report = {"per_n": per_n, "residual_kind": "bracket" if cfg.solver == "heuristic" else "value"}
    if cfg.solver == "heuristic":
        report["note"] = "max_cut is a lower bound and min_bisection an upper bound"
    return ExperimentResult("conjecture", records, summary, report)


# ------------------------------------------------------------ mu-lipschitz

def _model_draw(d: DegreeSequence, p: float, cfg: ExperimentConfig, seed) -> float:
    s_match, s_label, s_solve = cuts.seed_sequence(seed).spawn(3)
    sampler = sample_complete_matching if d.total % 2 == 0 else sample_near_complete_matching
    g = graph_of_matching(sampler(d, s_match))
    if p in (0, 1):
        sg = SignedGraph.uniform(g, 1 if p == 1 else -1)
    else:
        rng = np.random.default_rng(s_label)
        sg = SignedGraph(g, tuple(int(x) for x in np.where(rng.random(g.m) < p, 1, -1)))
    return float(signed_value(sg, cfg.solver, cfg.params, s_solve))


def run_mu_lipschitz(cfg: ExperimentConfig) -> CheckReport:
    """|E f(G_d)/n - E f(G_d')/n| <= 2 W(emp(d), emp(d')) for f = HB_p.

    Small even instances are averaged exactly. Otherwise both expectations
    are estimated from ``samples`` draws that share random numbers, and
    the bound is widened by three standard errors of the paired difference.
    Odd totals use a uniform maximum matching (one half-edge left over).
    """
    n = cfg.sizes[0]
    d1, _ = draw_degrees(cfg.model, n, np.random.SeedSequence([cfg.master_seed, n]), repair=False)
    d2, _ = draw_degrees(cfg.model_b, n, np.random.SeedSequence([cfg.master_seed, n]), repair=False)
    w = wasserstein(empirical_distribution(d1), empirical_distribution(d2))
    small = all(d.total % 2 == 0 and d.total <= EXACT_MODEL_HALF_EDGES for d in (d1, d2))
    if small and cfg.solver == "exact":
        f = HybridParam(_exact_p(cfg.p))
        e1, e2 = expected_over_model(f, d1), expected_over_model(f, d2)
        gap = abs(Fraction(e1) - Fraction(e2)) / n
        return CheckReport.compare(gap, 2 * w, witness=f"d={list(d1.degrees)}, d'={list(d2.degrees)}",
                                   mode="exact", wasserstein=w, mean_a=float(e1) / n, mean_b=float(e2) / n)

    def task(i):
        seed = replica_seed(cfg.master_seed, n, i)
        return _model_draw(d1, cfg.p, cfg, seed), _model_draw(d2, cfg.p, cfg, seed)

    pairs = np.array(_run_tasks(task, list(range(cfg.samples)), cfg.threads))
    x, y = pairs[:, 0] / n, pairs[:, 1] / n
    gap = abs(float(x.mean() - y.mean()))
    _, se = _mean_se(x - y)
    return CheckReport.compare(gap, 2 * w + 3 * se, witness=f"d={list(d1.degrees)}, d'={list(d2.degrees)}",
                               mode="monte-carlo", wasserstein=w, stderr=se,
                               mean_a=float(x.mean()), mean_b=float(y.mean()))


# ------------------------------------------------------------------ p-scan

def _exact_p(p) -> Fraction:
    """Nearest simple fraction, so that 0.05 is treated as 1/20."""
    return Fraction(p).limit_denominator(1 << 20)


def _decompositions(d, A, B):
    """Distinct opposing-class decompositions over every graph and labeling of every class."""
    seen: dict[tuple, ClassDecomposition] = {}
    for _t, graphs in class_graph_weights(d, A, B).items():
        for edges in graphs:
            m = matching_from_edges(d, edges)
            live = sum(1 for u, v in edges if u != v)
            for bits in range(1 << live):
                labels = []
                k = 0
                for u, v in edges:
                    if u == v:
                        labels.append(1)
                    else:
                        labels.append(1 if (bits >> k) & 1 else -1)
                        k += 1
                dec = half_edge_classes(m, labels, A, B)
                if dec.a >= 1 and dec.b >= 1:
                    seen.setdefault(dec.pairs, dec)
    return list(seen.values())


def run_p_scan(cfg: ExperimentConfig) -> ExperimentResult:
    """Scan the desired quadratic form and local super-additivity over a p-grid.

    Every enumerable instance with at most ``max_half_edges`` half-edges is
    visited. Negative slack marks a violation; violations are reported,
    most negative first, and never raise.
    """
    grid = cfg.p_grid if cfg.p_grid is not None else tuple(round(0.05 * k, 2) for k in range(10))
    entries = []
    for d, A, B in enumerable_instances(cfg.max_half_edges):
        if not A or not B:
            continue
        inst = {"degrees": list(d.degrees), "A": sorted(A), "B": sorted(B)}
        for dec in _decompositions(d, A, B):
            f0, f1 = desired_form(dec, 0), desired_form(dec, 1)
            for p in grid:
                form = f0 + _exact_p(p) * (f1 - f0)
                entries.append({"instance": inst, "check": "desired", "p": p, "slack": float(-form),
                                "witness": [list(c[:4]) for c in dec.pairs]})
        for t in feasible_triples(d, A, B):
            delta = max_delta(d, A, B, t)
            if delta < 2:
                continue
            for p in grid:
                rep = check_local_superadd(d, A, B, t, delta, _exact_p(p))
                entries.append({"instance": inst, "check": "local_superadd", "p": p, "slack": rep.slack,
                                "witness": [*t, delta]})
    entries.sort(key=lambda e: e["slack"])
    violations = [e for e in entries if e["slack"] < -TOL]
    min_slack = {}
    for e in entries:
        key = f"{e['check']}@{e['p']}"
        min_slack[key] = min(min_slack.get(key, math.inf), e["slack"])
    report = {"p_grid": list(grid), "checked": len(entries), "violations": violations,
              "min_slack": min_slack, "worst": entries[:20]}
    return ExperimentResult("p-scan", [], [], report)


# ---------------------------------------------------------- subadditivity

RESAMPLE_LIMIT = 100


def even_split_degrees(spec: dict, n: int, rng) -> tuple[DegreeSequence, list[int], list[int], int, int]:
    """Degrees with even totals on both halves A = [1..ceil(n/2)] and B = the rest.

    Sequences are redrawn until both totals are even; models that can never
    get there (fixed odd halves) fall back to parity repair of each half.
    Returns the degrees, A, B, the number of redraws and of repairs.
    """
    A = list(range(1, (n + 1) // 2 + 1))
    B = list(range(len(A) + 1, n + 1))
    for attempt in range(RESAMPLE_LIMIT):
        d, _ = draw_degrees(spec, n, rng, repair=False)
        if d.degree_of(A) % 2 == 0 and d.degree_of(B) % 2 == 0:
            return d, A, B, attempt, 0
        if spec["type"] in ("regular", "explicit"):
            break
    d, ra = repair_parity(d, rng, A)
    d, rb = repair_parity(d, rng, B)
    return d, A, B, attempt, ra + rb


def run_subadditivity(cfg: ExperimentConfig) -> ExperimentResult:
    """Subadditivity check on sampled degree sequences split into halves."""
    def task(key):
        n, replica = key
        seed = replica_seed(cfg.master_seed, n, replica)
        s_deg, s_check, _ = _streams(seed)

        def work():
            d, A, B, redraws, repairs = even_split_degrees(cfg.model, n, np.random.default_rng(s_deg))
            exact = cfg.solver == "exact" and d.total <= EXACT_MODEL_HALF_EDGES
            rep = check_subadditivity(
                d, A, B, cfg.p, mode="exact" if exact else "mc", samples=cfg.samples, seed=s_check,
                exact_limit=14 if cfg.solver == "exact" else 0, params=cfg.params)
            rep.details.update(degrees=list(d.degrees), redraws=redraws, parity_repairs=repairs)
            return rep

        rep, ms = _timed(cfg, work)
        return ResultRecord.make(n, replica, seed, rep.slack, rep.details.get("stderr", 0.0), ms), rep

    keys = [(n, i) for n in cfg.sizes for i in range(cfg.replicas)] if min(cfg.sizes) >= 2 else []
    if not keys:
        raise ConfigError("subadditivity needs n >= 2 so both parts are nonempty")
    outs = _run_tasks(task, keys, cfg.threads)
    records = [rec for rec, _ in outs]
    checks = [rep.to_dict() for _, rep in outs]
    report = {"checks": checks, "passed": all(c["passed"] for c in checks)}
    return ExperimentResult("subadditivity", records, summarize(records), report)


# ------------------------------------------------------------ fekete probe

def fekete_probe(mu: DegreeDistribution, sizes: Sequence[int], p: float = 1.0, replicas: int = 20,
                 master_seed: int = 0, solver: str = "exact") -> CheckReport:
    """Near-superadditivity of s_n = E[HB_p(G^IID_{mu,n})] estimated by Monte Carlo.

    Checks s_{m+k} >= s_m + s_k - psi(mean(mu) (m+k)/2) - 3 sigma for all
    m <= k in ``sizes`` whose sum is also in ``sizes``.
    """
    cfg = ExperimentConfig(kind="convergence", model={"type": "histogram", "mass": dict(mu.mass)},
                           sizes=tuple(sorted(set(sizes))), p=p, replicas=replicas, solver=solver,
                           master_seed=master_seed)
    res = run_convergence(cfg)
    s = {}
    for row in res.summary:
        n = row["n"]
        s[n] = (row["mean"] * n, row["stderr"] * n)
    worst = None
    checked = 0
    for m in cfg.sizes:
        for k in cfg.sizes:
            if k < m or m + k not in s:
                continue
            checked += 1
            (sm, em), (sk, ek), (smk, emk) = s[m], s[k], s[m + k]
            sigma = math.sqrt(em**2 + ek**2 + emk**2)
            rep = CheckReport.compare(sm + sk, smk + psi(mu.mean * (m + k) / 2) + 3 * sigma,
                                      witness=f"m={m}, k={k}")
            if worst is None or rep.slack < worst.slack:
                worst = rep
    if worst is None:
        raise InvalidInputError("no (m, k) pairs with m + k among the sizes")
    worst.details.update(pairs=checked, estimates={n: v for n, (v, _) in s.items()})
    return worst


# --------------------------------------------------------------- emission

def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def emit_outputs(records: Sequence[ResultRecord], fmt: str, path) -> list[Path]:
    """Write records as csv, jsonl or plotdata; returns the files written."""
    if not records:
        raise InvalidInputError("no records to emit")
    if fmt not in FORMATS:
        raise InvalidInputError(f"unknown format {fmt!r}")
    path = Path(path)
    if fmt == "csv":
        path.write_bytes(format_records(records, "csv").encode())
        return [path]
    if fmt == "jsonl":
        path.write_bytes(format_records(records, "jsonl").encode())
        return [path]
    rows = summarize(records)
    err = Path(f"{path}.err")
    path.write_bytes("".join(f"{r['n']} {_fmt(r['mean'])}\n" for r in rows).encode())
    err.write_bytes("".join(f"{r['n']} {_fmt(r['stderr'])}\n" for r in rows).encode())
    return [path, err]


def format_records(records: Sequence[ResultRecord], fmt: str) -> str:
    if fmt == "jsonl":
        return "".join(json.dumps(r.to_dict()) + "\n" for r in records)
    if fmt != "csv":
        raise InvalidInputError(f"format {fmt!r} has no single-text form")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        writer.writerow([_fmt(getattr(r, name)) for name in CSV_FIELDS])
    return buf.getvalue()


def read_csv(path) -> list[ResultRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [ResultRecord(int(r["n"]), int(r["replica"]), int(r["seed"]), float(r["value"]),
                         float(r["value_per_n"]), float(r["stderr"]), float(r["runtime_ms"]))
            for r in rows]


def read_jsonl(path) -> list[ResultRecord]:
    with open(path) as fh:
        return [ResultRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


# ---------------------------------------------------------------- dispatch

RUNNERS: dict[str, Callable[[ExperimentConfig], object]] = {
    "convergence": run_convergence,
    "subadditivity": run_subadditivity,
    "concentration": run_concentration,
    "conjecture": run_conjecture,
    "mu-lipschitz": run_mu_lipschitz,
    "p-scan": run_p_scan,
}


def run_experiment(cfg: ExperimentConfig, output=None) -> ExperimentResult:
    """Run ``cfg`` and, when an output path is set, write data plus a metadata sidecar.

    The sidecar ``<output>.meta.json`` holds the config, per-n summaries,
    the kind-specific report and whether values are exact or lower bounds.
    """
    out = RUNNERS[cfg.kind](cfg)
    if isinstance(out, CheckReport):
        out = ExperimentResult(cfg.kind, report=out.to_dict())
    # thread count is left out so the sidecar is identical for any parallelism
    config = {k: v for k, v in cfg.to_dict().items() if k not in ("threads", "output")}
    out.metadata = {
        "config": config,
        "estimate": cfg.estimate_kind,
        "lower_bound": cfg.solver == "heuristic",
    }
    output = output if output is not None else cfg.output
    if output is not None:
        path = Path(output)
        if out.records:
            emit_outputs(out.records, cfg.format, path)
        else:
            path.write_bytes((json.dumps(out.report, indent=2, default=float) + "\n").encode())
        meta = {**out.metadata, "summary": out.summary, "report": out.report}
        Path(f"{path}.meta.json").write_bytes(
            (json.dumps(meta, indent=2, sort_keys=True, default=float) + "\n").encode())
    return out
