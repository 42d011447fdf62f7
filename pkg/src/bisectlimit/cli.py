"""Command-line entry point: ``bisectlimit <command> [options]``.

Commands: gen, cut, hybrid, interp-check, experiment. Options can come
from flags or from ``--config file.json`` (snake_case keys matching the
flag names); flags win. Results go to ``--out`` or, failing that, to
standard output as JSON (CSV for experiments that write records).

Exit codes: 0 success, 2 configuration or input error, 3 resource guard.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import cuts, experiments, hybrid, interpolation
from .config_model import (
    EdgeTypeCounts,
    MultiGraph,
    graph_of_matching,
    sample_complete_matching,
    sample_in_class,
)
from .cuts import LocalSearchParams, SignedGraph
from .degrees import DegreeSequence
from .errors import BisectLimitError, ConfigError, InvalidInputError, ResourceGuardError

EXIT_OK, EXIT_CONFIG, EXIT_GUARD = 0, 2, 3

OBJECTIVES = ("max-cut", "min-bisection", "max-bisection", "signed-max-bisection",
              "constrained-max-bisection", "alpha-cut", "local-search")
CHECKS = ("subadditivity", "lipschitz", "local-superadd", "interpolation", "corollary", "desired")


def _ints(text) -> list[int]:
    if isinstance(text, list):
        return [int(x) for x in text]
    return [int(x) for x in str(text).split(",") if x.strip()]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with option values")
    p.add_argument("--seed", type=int, help="random seed (master seed for experiments)")
    p.add_argument("--threads", type=int, help="worker threads")
    p.add_argument("--out", help="output path; standard output when absent")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bisectlimit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="sample a configuration-model multigraph")
    _add_common(gen)
    gen.add_argument("--degrees", help="comma-separated degree sequence")
    gen.add_argument("--model", help='degree model as JSON, e.g. {"type": "regular", "r": 3}')
    gen.add_argument("--n", type=int, help="vertex count for --model")
    gen.add_argument("--A", dest="A", help="part A for class sampling")
    gen.add_argument("--B", dest="B", help="part B for class sampling")
    gen.add_argument("--edge-class", dest="edge_class", help="alpha,beta,gamma for class sampling")

    cut = sub.add_parser("cut", help="solve a cut or bisection problem")
    _add_common(cut)
    cut.add_argument("--graph", help="graph JSON file with n, edges and optional labels")
    cut.add_argument("--objective", choices=OBJECTIVES)
    cut.add_argument("--A", dest="A")
    cut.add_argument("--B", dest="B")
    cut.add_argument("--ratio", type=float, help="side ratio for alpha-cut")
    cut.add_argument("--mode", choices=("max", "min"), help="alpha-cut direction")
    cut.add_argument("--restarts", type=int)
    cut.add_argument("--sweeps", type=int)

    hyb = sub.add_parser("hybrid", help="hybrid bisection value HB_p")
    _add_common(hyb)
    hyb.add_argument("--graph")
    hyb.add_argument("--p", type=float)
    hyb.add_argument("--mode", choices=("exact", "mc"))
    hyb.add_argument("--samples", type=int)
    hyb.add_argument("--solver", choices=("exact", "heuristic"))
    hyb.add_argument("--A", dest="A")
    hyb.add_argument("--B", dest="B")

    chk = sub.add_parser("interp-check", help="run an interpolation check and print its report")
    _add_common(chk)
    chk.add_argument("--kind", choices=CHECKS)
    chk.add_argument("--degrees")
    chk.add_argument("--A", dest="A")
    chk.add_argument("--B", dest="B")
    chk.add_argument("--p", type=float)
    chk.add_argument("--mode", choices=("exact", "mc"))
    chk.add_argument("--samples", type=int)
    chk.add_argument("--edge-class", dest="edge_class", help="alpha,beta,gamma")
    chk.add_argument("--delta", type=int)
    chk.add_argument("--gamma", type=int)

    exp = sub.add_parser("experiment", help="run an experiment config")
    _add_common(exp)
    exp.add_argument("--format", choices=experiments.FORMATS)
    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    opts = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    if args.config is None:
        return opts
    try:
        data = json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {args.config}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    if args.command == "experiment":
        return {**opts, "experiment": data}
    unknown = set(data) - set(opts)
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    return {k: (v if v is not None else data.get(k)) for k, v in opts.items()}


def _need(opts: dict, *keys) -> None:
    missing = [k for k in keys if opts.get(k) is None]
    if missing:
        raise ConfigError(f"missing option(s): {', '.join('--' + k.replace('_', '-') for k in missing)}")


def _load_graph(spec) -> tuple[MultiGraph, tuple[int, ...] | None]:
    if isinstance(spec, dict):
        data = spec
    else:
        try:
            data = json.loads(Path(spec).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read graph {spec}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid graph JSON: {exc}") from exc
    try:
        g = MultiGraph.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"graph needs 'n' and 'edges': {exc}") from exc
    labels = data.get("labels")
    return g, tuple(labels) if labels is not None else None


def _parts(opts):
    if (opts.get("A") is None) != (opts.get("B") is None):
        raise ConfigError("--A and --B go together")
    if opts.get("A") is None:
        return None, None
    return _ints(opts["A"]), _ints(opts["B"])


def cmd_gen(opts: dict) -> dict:
    seed = opts.get("seed") or 0
    if opts.get("degrees") is not None:
        d = DegreeSequence(tuple(_ints(opts["degrees"])))
    else:
        _need(opts, "model", "n")
        model = opts["model"] if isinstance(opts["model"], dict) else json.loads(opts["model"])
        experiments._check_model(model, opts["n"])
        d, _ = experiments.draw_degrees(model, int(opts["n"]), [seed, 1])
    A, B = _parts(opts)
    if opts.get("edge_class") is not None:
        if A is None:
            raise ConfigError("--edge-class needs --A and --B")
        m = sample_in_class(d, A, B, EdgeTypeCounts(*_ints(opts["edge_class"])), seed)
    else:
        m = sample_complete_matching(d, seed)
    return {
        "degrees": list(d.degrees),
        "matching": json.loads(m.to_json()),
        "graph": graph_of_matching(m).to_dict(),
    }


def cmd_cut(opts: dict) -> dict:
    _need(opts, "graph", "objective")
    g, labels = _load_graph(opts["graph"])
    sg = SignedGraph(g, labels) if labels is not None else SignedGraph.uniform(g, 1)
    A, B = _parts(opts)
    obj = opts["objective"]
    if obj == "max-cut":
        res = cuts.max_cut(g)
    elif obj == "min-bisection":
        res = cuts.min_bisection(g)
    elif obj == "max-bisection":
        res = cuts.max_bisection(g)
    elif obj == "signed-max-bisection":
        res = cuts.signed_max_bisection(sg)
    elif obj == "constrained-max-bisection":
        if A is None:
            raise ConfigError("constrained-max-bisection needs --A and --B")
        res = cuts.constrained_max_bisection(sg, A, B)
    elif obj == "alpha-cut":
        _need(opts, "ratio")
        res = cuts.alpha_cut(sg, opts["ratio"], opts.get("mode") or "max")
    elif obj == "local-search":
        params = LocalSearchParams(**{k: opts[k] for k in ("restarts", "sweeps") if opts.get(k) is not None})
        res = cuts.local_search_bisection(sg, None if A is None else (A, B), params, opts.get("seed") or 0)
    else:
        raise ConfigError(f"unknown objective {obj!r}")
    return {"objective": obj, **res.to_dict()}


def cmd_hybrid(opts: dict) -> dict:
    _need(opts, "graph", "p")
    g, _ = _load_graph(opts["graph"])
    A, B = _parts(opts)
    p = opts["p"]
    if (opts.get("mode") or "exact") == "exact":
        value = hybrid.hybrid_exact_fraction(g, Fraction(p).limit_denominator(1 << 20), A, B)
        out = hybrid.HybridEstimate(float(value), 0.0, 1 << g.m, "exact").to_dict()
        out["fraction"] = str(value)
        return out
    samples = opts.get("samples") or 1000
    solver = opts.get("solver") or "exact"
    seed = opts.get("seed") or 0
    if A is None:
        return hybrid.hybrid_mc(g, p, samples, seed, solver).to_dict()
    return hybrid.constrained_hybrid_mc(g, A, B, p, samples, seed, solver).to_dict()


def cmd_interp_check(opts: dict) -> dict:
    _need(opts, "kind", "degrees", "A", "B")
    d = DegreeSequence(tuple(_ints(opts["degrees"])))
    A, B = _parts(opts)
    p = opts.get("p") if opts.get("p") is not None else 1.0
    exact_p = Fraction(p).limit_denominator(1 << 20)
    kind = opts["kind"]
    param = hybrid.ConstrainedHybridParam(A, B, exact_p)
    if kind == "subadditivity":
        rep = interpolation.check_subadditivity(d, A, B, exact_p if (opts.get("mode") or "exact") == "exact" else p,
                                                mode=opts.get("mode") or "exact",
                                                samples=opts.get("samples") or 2000, seed=opts.get("seed") or 0)
    elif kind == "lipschitz":
        rep = interpolation.check_lipschitz_F(param, d, A, B, interpolation.adjacent_pairs(d, A, B))
    elif kind == "local-superadd":
        _need(opts, "edge_class")
        t = EdgeTypeCounts(*_ints(opts["edge_class"]))
        delta = opts.get("delta") or interpolation.max_delta(d, A, B, t)
        rep = interpolation.check_local_superadd(d, A, B, t, delta, exact_p)
    elif kind == "interpolation":
        _need(opts, "gamma")
        rep = interpolation.check_interpolation_inequality(param, d, A, B, opts["gamma"])
    elif kind == "corollary":
        rep = interpolation.check_corollary_average(param, d, A, B)
    elif kind == "desired":
        # decomposition of the empty matching unless a class sample is requested
        if opts.get("edge_class") is not None:
            m = sample_in_class(d, A, B, EdgeTypeCounts(*_ints(opts["edge_class"])), opts.get("seed") or 0)
        else:
            m = interpolation.matching_from_edges(d, ())
        labels = (1,) * len(m.pairs)
        rep = interpolation.check_desired_inequality(interpolation.half_edge_classes(m, labels, A, B), exact_p)
    else:
        raise ConfigError(f"unknown check {kind!r}")
    return {"kind": kind, **rep.to_dict()}


def cmd_experiment(opts: dict):
    if "experiment" not in opts:
        raise ConfigError("experiment needs --config")
    data = dict(opts["experiment"])
    if opts.get("seed") is not None:
        data["master_seed"] = opts["seed"]
    if opts.get("threads") is not None:
        data["threads"] = opts["threads"]
    if opts.get("format") is not None:
        data["format"] = opts["format"]
    if opts.get("out") is not None:
        data["output"] = opts["out"]
    cfg = experiments.ExperimentConfig.from_dict(data)
    result = experiments.run_experiment(cfg)
    if cfg.output is not None:
        return None
    if result.records and cfg.format in ("csv", "jsonl"):
        return experiments.format_records(result.records, cfg.format)
    return result.to_dict()


COMMANDS = {
    "gen": cmd_gen,
    "cut": cmd_cut,
    "hybrid": cmd_hybrid,
    "interp-check": cmd_interp_check,
    "experiment": cmd_experiment,
}


def _emit(result, out: str | None) -> None:
    if result is None:
        return
    text = result if isinstance(result, str) else json.dumps(result, indent=2, default=float) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        opts = _merge_config(args)
        if opts.get("threads") is not None and opts["threads"] < 1:
            raise ConfigError("--threads must be at least 1")
        result = COMMANDS[args.command](opts)
        if args.command != "experiment":
            _emit(result, opts.get("out"))
        else:
            _emit(result, None)
    except ResourceGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigError, InvalidInputError, BisectLimitError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main() -> None:
    sys.exit(cli_main())
