"""``foonplan`` command line: plan, validate, stats, bench, merge."""

from __future__ import annotations

import argparse
import contextlib
import gc
import json
import os
import sys
import time
from collections import Counter
from pathlib import Path

import numpy as np

from .errors import FoonError, IdentifierConflict, ParseError
from .foontext import export_json, load_corpus, parse_subgraph, tree_to_dict
from .graph import ObjectNode, merge, validate
from .lexicon import DISHES_PATH, MOTIONS_PATH, TAXONOMY_PATH, load_dish_rules, load_motion_flags
from .pipeline import CORPUS_DIR, QUERIES_PATH, VECTORS_PATH, Planner, parse_ingredient, parse_queries
from .progress import FORMATS, lines_to_dict, render
from .retrieval import PlanRequest, retrieve_task_tree
from .semantics import SimilarityConfig

EXIT_OK, EXIT_FATAL, EXIT_PARTIAL = 0, 1, 2


def _corpus_default() -> str:
    return os.environ.get("FOON_CORPUS") or str(CORPUS_DIR)


def _vectors_default() -> str:
    return os.environ.get("FOON_VECTORS") or str(VECTORS_PATH)


def _config_args(p: argparse.ArgumentParser, planning: bool = True) -> None:
    p.add_argument("--corpus", default=None, help="directory of .foon files (env FOON_CORPUS)")
    if planning:
        p.add_argument("--vectors", default=None, help="word-vector file (env FOON_VECTORS)")
        p.add_argument("--taxonomy", default=str(TAXONOMY_PATH))
        p.add_argument("--dish-rules", default=str(DISHES_PATH))
        p.add_argument("--tau", type=float, default=None, help="similarity threshold (default 0.90)")
        p.add_argument("--top-k", type=int, default=None, help="substitute candidates shown (default 5)")
    p.add_argument("--motions", default=str(MOTIONS_PATH))


def _resolve(args) -> dict:
    cfg = {
        "corpus": args.corpus or _corpus_default(),
        "motions": args.motions,
    }
    if hasattr(args, "vectors"):
        sim = SimilarityConfig(
            **{k: v for k, v in (("tau", args.tau), ("top_k", args.top_k)) if v is not None}
        )
        cfg.update(
            vectors=args.vectors or _vectors_default(),
            taxonomy=args.taxonomy,
            dish_rules=args.dish_rules,
            tau=sim.tau,
            top_k=sim.top_k,
        )
    for key in ("corpus", "motions", "vectors", "taxonomy", "dish_rules"):
        if key in cfg and not Path(cfg[key]).exists():
            raise FoonError(f"{key.replace('_', '-')} path does not exist: {cfg[key]}")
    return cfg


def _planner(cfg: dict) -> Planner:
    return Planner.load(
        cfg["corpus"],
        cfg["vectors"],
        cfg["taxonomy"],
        cfg["motions"],
        cfg["dish_rules"],
        SimilarityConfig(cfg["tau"], cfg["top_k"]),
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def read_kitchen(path: str | Path) -> frozenset[ObjectNode]:
    """One ``name:state`` item per line; ``#`` comments and blank lines ignored."""
    items = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, state = parse_ingredient(line)
        if state is None:
            raise FoonError(f"{path}:{lineno}: kitchen items need a state (name:state)")
        items.add(ObjectNode(name, (state,)))
    return frozenset(items)


def _prompt_chooser(name, candidates):
    print(f"\n{name!r} is not in the corpus. Substitute candidates:", file=sys.stderr)
    for k, (cand, score) in enumerate(candidates, start=1):
        print(f"  {k}. {cand} ({score:.3f})", file=sys.stderr)
    print("Pick 1-{} or type a name [1]: ".format(len(candidates)), end="", file=sys.stderr, flush=True)
    answer = sys.stdin.readline().strip()
    if not answer:
        return candidates[0][0] if candidates else None
    if answer.isdigit() and 1 <= int(answer) <= len(candidates):
        return candidates[int(answer) - 1][0]
    return answer.lower()


def _tree_text(result) -> str:
    tree = result.tree
    rows = [f"reference recipe: {result.recipe_id}", f"goal: {tree.goal}", ""]
    for i, (u, p) in enumerate(zip(tree.units, tree.provenance), start=1):
        ins = " + ".join(map(str, u.inputs))
        outs = " + ".join(map(str, u.outputs))
        rows.append(f"{i:>3}. {u.verb}: {ins} -> {outs}  [{p.origin}:{p.source_recipe}]")
    return "\n".join(rows) + "\n\n"


def cmd_plan(args) -> int:
    cfg = _resolve(args)
    if args.dump_config:
        print(json.dumps(cfg, indent=2, sort_keys=True))
        return EXIT_OK
    if not args.dish:
        raise FoonError("--dish is required")
    if not args.ingredients:
        raise FoonError("give at least one ingredient")
    overrides = {}
    for item in args.override:
        name, sep, cand = item.partition("=")
        if not sep or not name.strip() or not cand.strip():
            raise FoonError(f"bad --override {item!r}; use name=candidate")
        overrides[name.strip().lower()] = cand.strip().lower()
    planner = _planner(cfg)
    if args.kitchen:
        planner.kitchen = read_kitchen(args.kitchen)
    req = PlanRequest(tuple(parse_ingredient(t) for t in args.ingredients), args.dish)
    result = planner.plan(req, overrides, _prompt_chooser if args.interactive else None)
    lines = result.lines
    if args.format == "json":
        data = {
            "recipe_id": result.recipe_id,
            "tree": tree_to_dict(result.tree),
            "progress": lines_to_dict(lines),
            "errors": [f"{e.ingredient}: {e}" for e in result.errors],
            "warnings": [f"{w.ingredient}: {w}" for w in result.warnings],
        }
        text = json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    elif args.format == "dot":
        text = render(lines, "dot")
    else:
        text = _tree_text(result) + render(lines, "text")
    _emit(text, args.out)
    for w in result.warnings:
        print(f"warning: {w.ingredient}: {w}", file=sys.stderr)
    for e in result.errors:
        print(f"error: {type(e).__name__}: {e.ingredient}: {e}", file=sys.stderr)
    return EXIT_PARTIAL if result.errors else EXIT_OK


def cmd_validate(args) -> int:
    corpus = Path(args.corpus or _corpus_default())
    if not corpus.is_dir():
        raise FoonError(f"not a directory: {corpus}")
    files = sorted(corpus.glob("*.foon"))
    if not files:
        print("0 files")
        return EXIT_OK
    problems = []
    subgraphs = []
    for path in files:
        try:
            subgraphs.append(parse_subgraph(path.read_bytes(), source=path.name))
        except ParseError as exc:
            problems.append(f"parse-error: {exc}")
    try:
        foon = merge(subgraphs)
        diags = validate(foon, load_motion_flags(args.motions).keys(), load_dish_rules(args.dish_rules).classes)
        problems += [str(d) for d in diags]
    except IdentifierConflict as exc:
        problems.append(f"identifier-conflict: {exc}")
    for p in problems:
        print(p)
    print(f"{len(files)} files, {len(problems)} problems")
    return EXIT_FATAL if problems else EXIT_OK


def corpus_stats(corpus: str | Path) -> dict:
    subgraphs = load_corpus(corpus)
    foon = merge(subgraphs)
    return {
        "subgraphs": len(subgraphs),
        "units_before_dedup": sum(len(sg.units) for sg in subgraphs),
        "units_after_dedup": len(foon.units),
        "distinct_objects": len(foon.object_nodes()),
        "distinct_motions": len({u.verb for u in foon.units}),
        "dish_classes": dict(sorted(Counter(sg.dish_type for sg in subgraphs).items())),
        "ingredient_vocabulary": len(foon.ingredient_names()),
    }


def cmd_stats(args) -> int:
    corpus = Path(args.corpus or _corpus_default())
    if not corpus.is_dir():
        raise FoonError(f"not a directory: {corpus}")
    stats = corpus_stats(corpus)
    if args.json:
        print(json.dumps(stats, indent=2))
    else:
        for key, value in stats.items():
            if isinstance(value, dict):
                value = ", ".join(f"{k}={v}" for k, v in value.items()) or "-"
            print(f"{key}: {value}")
    return EXIT_OK


@contextlib.contextmanager
def _no_gc():
    """Collect once, then keep the collector out of timed regions, as ``timeit`` does."""
    was_enabled = gc.isenabled()
    gc.collect()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


def time_plan(planner: Planner, req: PlanRequest, repetitions: int) -> tuple[float, int]:
    """Best-of-``repetitions`` wall time in seconds, and retrieved path length."""
    best = float("inf")
    n = 0
    with _no_gc():
        for _ in range(repetitions):
            t0 = time.perf_counter()
            result = planner.plan(req)
            best = min(best, time.perf_counter() - t0)
            n = len(result.reference)
    return best, n


def chain_timings(sizes, repetitions: int = 5):
    """Retrieval time against path length over synthetic single-ingredient chains."""
    from .evalkit import chain_foon
    from .semantics import VectorStore

    store = VectorStore(2, {"dough": np.array([1.0, 0.0]), "bowl": np.array([0.0, 1.0])})
    out = []
    for n in sizes:
        foon, start, goal = chain_foon(n)
        kitchen = {start, ObjectNode("bowl", ("empty",))}
        best = float("inf")
        with _no_gc():
            for _ in range(repetitions):
                t0 = time.perf_counter()
                tree = retrieve_task_tree(goal, ["dough"], kitchen, foon, store)
                best = min(best, time.perf_counter() - t0)
        out.append((len(tree), best))
    return out


def linear_fit(xs, ys) -> tuple[float, float, float]:
    """Least-squares slope, intercept and R^2."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    total = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / total if total > 0 else 1.0
    return float(slope), float(intercept), r2


def cmd_bench(args) -> int:
    cfg = _resolve(args)
    planner = _planner(cfg)
    queries = parse_queries(Path(args.queries).read_text(encoding="utf-8"))
    if not queries:
        raise FoonError("queries file lists no requests")
    times = []
    print("query\tdish\tms\tn")
    for k, req in enumerate(queries, start=1):
        secs, n = time_plan(planner, req, args.repetitions)
        times.append(secs * 1000)
        print(f"{k}\t{req.dish_type}\t{secs * 1000:.2f}\t{n}")
    print(f"mean_ms: {np.mean(times):.2f}")
    print(f"p95_ms: {np.percentile(times, 95):.2f}")
    if args.linearity:
        sizes = [10, 50, 100, 200, 400, 600, 800, 1000]
        pts = chain_timings(sizes, args.repetitions)
        slope, _, r2 = linear_fit([n for n, _ in pts], [t for _, t in pts])
        for n, t in pts:
            print(f"chain\t{n}\t{t * 1000:.3f}")
        print(f"chain_slope_us_per_unit: {slope * 1e6:.3f}")
        print(f"chain_r2: {r2:.4f}")
    return EXIT_OK


def cmd_merge(args) -> int:
    dirs = args.dirs or [args.corpus or _corpus_default()]
    subgraphs = [sg for d in dirs for sg in load_corpus(d)]
    _emit(export_json(merge(subgraphs), indent=2 if args.pretty else None) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="foonplan", description="Recipe task-tree planning over a FOON corpus.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan a task tree for a set of ingredients")
    p.add_argument("ingredients", nargs="*", help="name or name:state")
    p.add_argument("--dish", help="dish class, e.g. salad")
    p.add_argument("--kitchen", help="file of name:state items available at the start")
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--override", action="append", default=[], metavar="NAME=CANDIDATE")
    p.add_argument("--interactive", action="store_true", help="ask which substitute to use")
    p.add_argument("--dump-config", action="store_true", help="print the effective configuration and exit")
    _config_args(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("validate", help="parse and check a corpus")
    _config_args(p, planning=False)
    p.add_argument("--dish-rules", default=str(DISHES_PATH))
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="corpus summary counts")
    _config_args(p, planning=False)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="time a query suite")
    p.add_argument("--queries", default=str(QUERIES_PATH))
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--linearity", action="store_true", help="also time synthetic chains of 10..1000 units")
    _config_args(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("merge", help="print the merged FOON as JSON")
    p.add_argument("dirs", nargs="*", help="corpus directories (default: --corpus)")
    p.add_argument("--out")
    p.add_argument("--pretty", action="store_true")
    _config_args(p, planning=False)
    p.set_defaults(func=cmd_merge)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FoonError, OSError, ValueError) as exc:
        print(f"foonplan: error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
