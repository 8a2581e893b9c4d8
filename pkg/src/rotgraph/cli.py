"""Command-line front end: ``rotgraph {build,verify,chromatic,diameter,distance}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .graphs import Graph, GraphError, load_graph, parse_family
from .reports import SCHEMA, Report, dumps

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

ENV_MAX_TREES = "ROTGRAPH_MAX_TREES"
ENV_TIME_BUDGET = "ROTGRAPH_TIME_BUDGET"
ENV_WORKERS = "ROTGRAPH_WORKERS"

DEFAULT_MAX_TREES = 500_000
DEEP_MAX_TREES = 5_000_000


class UsageError(Exception):
    pass


def default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


@dataclass
class RunConfig:
    command: str
    family: str | None = None
    graph_file: str | None = None
    max_trees: int = DEFAULT_MAX_TREES
    time_budget: float | None = None
    workers: int = 1
    seed: int = 0
    deep: bool = False
    orbits: str = "auto"
    edge_labels: bool = True
    output: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.max_trees <= 0:
            raise UsageError("--max-trees must be positive")
        if self.time_budget is not None and self.time_budget <= 0:
            raise UsageError("--time-budget must be positive")
        if self.workers <= 0:
            raise UsageError("--workers must be positive")

    def graph(self) -> Graph:
        if (self.family is None) == (self.graph_file is None):
            raise UsageError("give exactly one of --family or --graph")
        if self.family is not None:
            return parse_family(self.family)
        return load_graph(self.graph_file)

    def source(self) -> str:
        return self.family or str(self.graph_file)


def _env_number(name: str, kind):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    try:
        return kind(raw)
    except ValueError:
        raise UsageError(f"{name}={raw!r} is not a number") from None


def make_config(args: argparse.Namespace) -> RunConfig:
    deep = getattr(args, "deep", False)
    max_trees = args.max_trees or _env_number(ENV_MAX_TREES, int) or (DEEP_MAX_TREES if deep else DEFAULT_MAX_TREES)
    budget = args.time_budget if args.time_budget is not None else _env_number(ENV_TIME_BUDGET, float)
    workers = args.workers or _env_number(ENV_WORKERS, int) or default_workers()
    return RunConfig(
        command=args.command,
        family=getattr(args, "family", None),
        graph_file=getattr(args, "graph", None),
        max_trees=max_trees,
        time_budget=budget,
        workers=workers,
        seed=args.seed,
        deep=deep,
        orbits=getattr(args, "orbits", "auto"),
        edge_labels=not getattr(args, "no_edge_labels", False),
        output=getattr(args, "json", None),
    )


def _emit(body: dict, cfg: RunConfig) -> None:
    body = {"schema": SCHEMA, **body}
    text = json.dumps(body, indent=2, default=str)
    print(text)
    if cfg.output:
        Path(cfg.output).write_text(text + "\n", encoding="utf-8")


def _build(cfg: RunConfig, G: Graph | None = None, labels: bool | None = None):
    from .rotation import build_rotation_graph

    G = G if G is not None else cfg.graph()
    return build_rotation_graph(G, cap=cfg.max_trees, edge_labels=cfg.edge_labels if labels is None else labels)


# commands --------------------------------------------------------------------------


def cmd_build(cfg: RunConfig, args) -> int:
    from .rotation import save_json

    RG = _build(cfg)
    if args.dot:
        Path(args.dot).write_text(RG.to_dot(), encoding="utf-8")
    if args.graph_json:
        save_json(RG, args.graph_json)
    if args.binary:
        RG.write_binary(args.binary)
    _emit({"command": "build", "graph": cfg.source(), "stats": RG.stats()}, cfg)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    from .suites import run_suite

    reports = run_suite(
        args.suite,
        deep=cfg.deep,
        seed=cfg.seed,
        workers=cfg.workers,
        checkpoint_dir=args.checkpoint_dir,
    )
    for r in reports:
        print(str(r), file=sys.stderr)
    text = dumps(reports, command="verify", suite=args.suite, deep=cfg.deep, seed=cfg.seed)
    print(text)
    if cfg.output:
        Path(cfg.output).write_text(text + "\n", encoding="utf-8")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_chromatic(cfg: RunConfig, args) -> int:
    from .coloring import (
        chromatic_number_exact,
        complete_bipartite_coloring,
        lift_along,
        properness_report,
        threshold_construction,
    )

    G = cfg.graph()
    body: dict = {"command": "chromatic", "graph": cfg.source()}
    passed = True
    if args.lifted:
        name, _, params = (cfg.family or "").partition(":")
        if name in ("kpq", "complete_bipartite"):
            p, q = (int(x) for x in params.split(","))
            lc = complete_bipartite_coloring(p, q, cap=cfg.max_trees)
        else:
            lc = lift_along(threshold_construction(G), cap=cfg.max_trees)
        rep = Report("lifted_coloring", cfg.source())
        for r in lc.reports:
            rep.merge(r)
        passed = rep.passed
        body["lifted"] = {"colors": lc.coloring.k, "steps": [s.kind for s in lc.steps], "report": rep.to_json()}
    if args.exact or not args.lifted:
        RG = _build(cfg, G, labels=False)
        res = chromatic_number_exact(RG, budget=args.budget, seed=cfg.seed)
        if not res.exact:
            _emit({**body, "exact": res.to_json(), "error": "search budget exhausted"}, cfg)
            return EXIT_USAGE
        rep = properness_report(RG, res.coloring, cfg.source())
        passed = passed and rep.passed
        body["value"] = res.value
        body["exact"] = res.to_json()
    body["passed"] = passed
    _emit(body, cfg)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_diameter(cfg: RunConfig, args) -> int:
    from .metrics import diameter, orbit_reduce, twin_class_generators

    G = cfg.graph()
    RG = _build(cfg, G, labels=False)
    orb = None
    if cfg.orbits == "auto":
        gens = twin_class_generators(G)
        orb = orbit_reduce(G, RG, gens) if gens else None
    res = diameter(
        RG,
        orb,
        checkpoint=args.checkpoint,
        time_budget=cfg.time_budget,
        workers=cfg.workers,
        seed=cfg.seed,
    )
    out = res.to_json()
    a, b = res.witness_pair
    out["witness_trees"] = [RG.label(a), RG.label(b)]
    _emit({"command": "diameter", "graph": cfg.source(), **out}, cfg)
    return EXIT_OK


def _read_tree(spec: str, G: Graph):
    from .trees import tree_from_json, validate

    p = Path(spec)
    data = json.loads(p.read_text()) if p.exists() else json.loads(spec)
    T = tree_from_json(data, G.n)
    validate(G, T)
    return T


def cmd_distance(cfg: RunConfig, args) -> int:
    from .metrics import distance, shortest_path, witness_trees

    if args.witness:
        G, T, T2, claimed = witness_trees(args.witness)
        cfg.family = cfg.family or "witness:" + args.witness
    else:
        if not (args.from_tree and args.to_tree):
            raise UsageError("give --from and --to, or --witness")
        G = cfg.graph()
        T, T2, claimed = _read_tree(args.from_tree, G), _read_tree(args.to_tree, G), None
    RG = _build(cfg, G, labels=False)
    a, b = RG.ordinal(T), RG.ordinal(T2)
    body = {"command": "distance", "graph": cfg.source(), "value": distance(RG, a, b)}
    if args.path:
        body["path"] = [RG.label(i) for i in shortest_path(RG, a, b)]
    passed = True
    if claimed is not None:
        body["expected"] = claimed
        passed = body["value"] == claimed
    _emit(body, cfg)
    return EXIT_OK if passed else EXIT_FAIL


# parser ----------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, graph: bool = True) -> None:
    if graph:
        src = p.add_mutually_exclusive_group()
        src.add_argument("--family", help="family spec, e.g. complete:4, path:6, star:5, kpq:2,3, spk:2,3, threshold:iuu")
        src.add_argument("--graph", help="graph file (JSON or edge list)")
    p.add_argument("--max-trees", type=int, default=None, help=f"cap on |V(R)| (env {ENV_MAX_TREES})")
    p.add_argument("--time-budget", type=float, default=None, help=f"seconds (env {ENV_TIME_BUDGET})")
    p.add_argument("--workers", type=int, default=None, help=f"BFS worker processes (env {ENV_WORKERS})")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", metavar="PATH", help="also write the JSON result here")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rotgraph", description="Rotation graphs of graph associahedra.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build R(G) and write exports")
    _common(p)
    p.add_argument("--dot", help="Graphviz output path")
    p.add_argument("--graph-json", help="JSON output path (trees and labelled edges)")
    p.add_argument("--binary", help="compact binary output path")
    p.add_argument("--no-edge-labels", action="store_true")

    p = sub.add_parser("verify", help="run a verification suite over the built-in corpus")
    _common(p, graph=False)
    p.add_argument("--suite", default="all", choices=["counts", "partitions", "quotients", "colorings", "distances", "all"])
    p.add_argument("--deep", action="store_true", help="add the q = 7, 8 diameter runs")
    p.add_argument("--checkpoint-dir", default=None)

    p = sub.add_parser("chromatic", help="chromatic number of R(G)")
    _common(p)
    p.add_argument("--exact", action="store_true", help="certified exact value (default)")
    p.add_argument("--lifted", action="store_true", help="3-coloring lifted from R(P_3)")
    p.add_argument("--budget", type=int, default=2_000_000, help="backtracking node budget")

    p = sub.add_parser("diameter", help="diameter of R(G)")
    _common(p)
    p.add_argument("--orbits", choices=["auto", "none"], default="auto")
    p.add_argument("--deep", action="store_true", help=f"raise the tree cap to {DEEP_MAX_TREES}")
    p.add_argument("--checkpoint", default=None, help="resume file for per-source eccentricities")

    p = sub.add_parser("distance", help="distance between two search trees")
    _common(p)
    p.add_argument("--from", dest="from_tree", help="tree JSON file or literal")
    p.add_argument("--to", dest="to_tree", help="tree JSON file or literal")
    p.add_argument("--witness", help="stored witness pair name (e.g. spk23_far)")
    p.add_argument("--path", action="store_true", help="also print one geodesic")
    return ap


COMMANDS = {
    "build": cmd_build,
    "verify": cmd_verify,
    "chromatic": cmd_chromatic,
    "diameter": cmd_diameter,
    "distance": cmd_distance,
}


def main(argv: list[str] | None = None) -> int:
    from .metrics import BudgetExceededError
    from .rotation import CapExceededError
    from .trees import TreeError

    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = make_config(args)
        return COMMANDS[args.command](cfg, args)
    except CapExceededError as exc:
        print(json.dumps({"schema": SCHEMA, "error": str(exc), "partial": {"trees": exc.partial, "cap": exc.cap}}))
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(json.dumps({"schema": SCHEMA, "error": str(exc), "partial": exc.partial}))
        return EXIT_USAGE
    except (UsageError, GraphError, TreeError, KeyError, json.JSONDecodeError, OSError) as exc:
        print(f"rotgraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
