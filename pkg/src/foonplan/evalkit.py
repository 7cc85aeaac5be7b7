"""Oracles and scoring helpers for checking planner output.

``brute_force_retrieve`` re-derives retrieval by trying every producer choice
with independent code; the rest turns per-ingredient {0, 1, 2} judgments into
recipe verdicts and threshold curves.
"""

from __future__ import annotations

import csv
import io
import random
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import IncompleteLabels, OracleTooLarge, UnreachableItem
from .graph import FunctionalUnit, ObjectNode, Subgraph, UniversalFOON, merge
from .lexicon import MotionLexicon, new_states
from .progress import _carrier, compute_progress_lines
from .retrieval import PlanRequest, Provenance, TaskTree
from .semantics import SimilarityConfig, VectorStore, similarity

DEFAULT_UNIT_BOUND = 60
DEFAULT_RUN_BOUND = 200_000
ERROR_CATEGORIES = ("substitution", "state", "motion", "integration")


# -- brute-force retrieval oracle ------------------------------------------------


def _overlap(n: ObjectNode, I: Sequence[str], store: VectorStore, tau: float) -> int:
    names = list(n.ingredients) if n.is_container else list(n.ingredients) + [n.name]
    count = 0
    for a in set(names):
        for i in I:
            if a == i:
                count += 1
                break
            s = similarity(store, a, i)
            if s is not None and s >= tau:
                count += 1
                break
    return count


def _depends(start: Iterable[ObjectNode], target: ObjectNode, edges: Mapping) -> bool:
    frontier = set(start)
    reached: set[ObjectNode] = set()
    while frontier:
        if target in frontier:
            return True
        reached |= frontier
        frontier = {m for n in frontier for m in edges.get(n, ())} - reached
    return False


def _simple_order(chosen: Sequence[tuple[ObjectNode, FunctionalUnit]], kitchen) -> list[FunctionalUnit]:
    """Quadratic stable topological sort of the reversed, deduplicated selection.

    Each item depends on the unit picked for it, not on any unit that
    happens to list it among its outputs.
    """
    picked = dict(chosen)
    seq: list[FunctionalUnit] = []
    for _, u in reversed(chosen):
        if u not in seq:
            seq.append(u)

    def maker(n: ObjectNode):
        if n in picked:
            return picked[n]
        return next((p for p in seq if n in p.outputs), None)

    pending = list(seq)
    placed: list[FunctionalUnit] = []
    while pending:
        for u in pending:
            ok = True
            for n in u.inputs:
                m = None if n in kitchen else maker(n)
                if m is not None and m != u and m not in placed:
                    ok = False
                    break
            if ok:
                placed.append(u)
                pending.remove(u)
                break
        else:
            raise RuntimeError("oracle selection has a dependency cycle")
    return placed


def brute_force_retrieve(
    goal: ObjectNode,
    I: Iterable[str],
    kitchen: Iterable[ObjectNode],
    foon: UniversalFOON,
    store: VectorStore,
    cfg: SimilarityConfig = SimilarityConfig(),
    bound: int = DEFAULT_UNIT_BOUND,
    max_runs: int = DEFAULT_RUN_BOUND,
) -> TaskTree:
    """Enumerate every run of producer choices and keep the best.

    A run is ranked by its sequence of choices, each valued by (summed input
    overlap, fewer inputs, source recipe, unit identity). Runs that hit an
    unproducible item take part in the ranking; if the best run is one of
    them the same ``UnreachableItem`` is raised that retrieval would raise.
    """
    if len(foon.units) > bound:
        raise OracleTooLarge(f"FOON has {len(foon.units)} units, oracle bound is {bound}")
    I = sorted(set(I))
    kitchen = frozenset(getattr(kitchen, "items", kitchen))
    by_output: dict[ObjectNode, list[FunctionalUnit]] = defaultdict(list)
    for u in foon.units:
        for o in set(u.outputs):
            by_output[o].append(u)
    overlap: dict[ObjectNode, int] = {}

    def value(u: FunctionalUnit):
        total = 0
        for n in u.inputs:
            if n not in overlap:
                overlap[n] = _overlap(n, I, store, cfg.tau)
            total += overlap[n]
        return (-total, len(u.inputs), u.source_recipe, u.key)

    best: list = []  # [(keys, chosen, failed_item)]
    runs = 0

    def explore(queue: tuple, seen: frozenset, edges: dict, keys: tuple, chosen: tuple):
        nonlocal runs
        while queue and queue[0] in kitchen:
            queue = queue[1:]
        if not queue:
            runs += 1
            _offer(keys, chosen, None)
            return
        item, rest = queue[0], queue[1:]
        options = [u for u in by_output.get(item, ()) if not _depends(u.inputs, item, edges)]
        if not options:
            runs += 1
            _offer(keys, chosen, item)
            return
        if runs > max_runs:
            raise OracleTooLarge(f"more than {max_runs} candidate runs")
        for u in options:
            new = [n for n in dict.fromkeys(u.inputs) if n not in seen]
            explore(
                rest + tuple(new),
                seen | set(new),
                {**edges, item: u.inputs},
                keys + (value(u),),
                chosen + ((item, u),),
            )

    def _offer(keys, chosen, failed):
        if not best or keys < best[0][0]:
            best[:] = [(keys, chosen, failed)]

    explore((goal,), frozenset({goal}), {}, (), ())
    keys, chosen, failed = best[0]
    if failed is not None:
        raise UnreachableItem(failed)
    units = _simple_order(chosen, kitchen)
    return TaskTree(units, goal, [Provenance(u.source_recipe, "retrieved") for u in units])


def summed_score(tree: TaskTree, I: Iterable[str], store: VectorStore, cfg: SimilarityConfig = SimilarityConfig()) -> int:
    """Total input overlap across a tree's units."""
    I = sorted(set(I))
    return sum(_overlap(n, I, store, cfg.tau) for u in tree.units for n in u.inputs)


# -- verdicts ---------------------------------------------------------------------


@dataclass(frozen=True)
class IngredientScore:
    ingredient: str
    score: int
    category: str | None = None

    def __post_init__(self):
        if self.score not in (0, 1, 2):
            raise ValueError(f"score must be 0, 1 or 2, got {self.score}")
        if self.category is not None and self.category not in ERROR_CATEGORIES:
            raise ValueError(f"unknown error category {self.category!r}")


@dataclass(frozen=True)
class RecipeVerdict:
    scores: tuple[IngredientScore, ...]

    @property
    def correct_fraction(self) -> float:
        if not self.scores:
            return 1.0
        return sum(1 for s in self.scores if s.score == 2) / len(self.scores)

    def passes(self, threshold: float) -> bool:
        return self.correct_fraction >= threshold - 1e-12


def score_tree(tree: TaskTree, labels: Mapping[str, int | IngredientScore]) -> RecipeVerdict:
    """Verdict for a tree from human or automatic per-ingredient labels."""
    names = sorted(tree.ingredient_names())
    missing = [n for n in names if n not in labels]
    if missing:
        raise IncompleteLabels(f"no label for: {', '.join(missing)}")
    out = []
    for n in names:
        lab = labels[n]
        out.append(lab if isinstance(lab, IngredientScore) else IngredientScore(n, int(lab)))
    return RecipeVerdict(tuple(out))


def thresholds(start: float = 0.5, stop: float = 1.0, step: float = 0.1) -> list[float]:
    n = int(round((stop - start) / step))
    return [round(start + k * step, 10) for k in range(n + 1)]


def threshold_curve(verdicts: Sequence[RecipeVerdict], points: Sequence[float] | None = None) -> list[tuple[float, float]]:
    """Fraction of recipes passing at each threshold."""
    points = thresholds() if points is None else points
    if not verdicts:
        return [(t, 0.0) for t in points]
    return [(t, sum(v.passes(t) for v in verdicts) / len(verdicts)) for t in points]


def curve_csv(curve: Sequence[tuple[float, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["threshold", "fraction_passing"])
    for t, f in curve:
        w.writerow([f"{t:.1f}", f"{f:.4f}"])
    return buf.getvalue()


def load_labels(path: str | Path) -> dict[str, dict[str, IngredientScore]]:
    """``recipe_id<TAB>ingredient<TAB>score[<TAB>error_category]`` per line."""
    out: dict[str, dict[str, IngredientScore]] = defaultdict(dict)
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) not in (3, 4):
            raise ValueError(f"{path}:{lineno}: expected 3 or 4 tab-separated fields")
        rid, name, score = parts[0].strip(), parts[1].strip().lower(), parts[2].strip()
        category = parts[3].strip() or None if len(parts) == 4 else None
        try:
            out[rid][name] = IngredientScore(name, int(score), category)
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    return dict(out)


# -- automatic structural checks ----------------------------------------------------


def auto_structural_checks(tree: TaskTree, req: PlanRequest, lex: MotionLexicon) -> dict[str, int]:
    """Provisional per-ingredient scores.

    0 if the ingredient has no progress line. 1 if its line is broken: a
    step starts from a state the previous step did not leave, the last step
    does not leave the state the goal holds it in, or a verb introduces a
    state it never yields anywhere in the corpus. 2 otherwise. A mixture's
    existing state is not charged to the verb that adds one more ingredient.
    """
    lines = compute_progress_lines(tree)
    out = {}
    for name in sorted(set(req.names)):
        line = lines.get(name)
        if line is None or not line.steps:
            out[name] = 0
            continue
        out[name] = 2 if _line_sound(tree, line, lex) else 1
    return out


def _line_sound(tree: TaskTree, line, lex: MotionLexicon) -> bool:
    steps = line.steps
    if any(a.after != b.before for a, b in zip(steps, steps[1:])):
        return False
    held = _carrier((tree.goal,), line.ingredient)
    if held is not None and tuple(sorted(held.states)) != steps[-1].after:
        return False
    for step in steps:
        unit = tree.units[step.unit]
        carrier = _carrier(unit.outputs, line.ingredient)
        if carrier is None:
            continue
        fresh = {s for n, s in new_states(unit) if n == carrier.name} - set(step.before)
        known = lex.states_for(step.verb)
        if any(s not in known for s in fresh):
            return False
    return True


# -- synthetic FOONs -----------------------------------------------------------------

_NAMES = ("tomato", "onion", "carrot", "potato", "lettuce", "cucumber", "apple", "lemon", "garlic", "salt")
_STATES = ("whole", "sliced", "diced", "chopped", "peeled", "mixed", "boiled", "juiced")
_VERBS = ("slice", "dice", "chop", "peel", "mix", "boil", "pour", "squeeze")


def random_foon(
    rng: random.Random, n_units: int = 12, n_nodes: int = 14, recipes: int = 3, composite_p: float = 0.3
) -> tuple[UniversalFOON, list[ObjectNode]]:
    """A random FOON (cycles allowed) and its pool of object nodes."""
    pool: list[ObjectNode] = []
    while len(pool) < n_nodes:
        name = rng.choice(_NAMES)
        state = rng.choice(_STATES)
        if rng.random() < composite_p:
            node = ObjectNode("bowl", (state,), tuple(rng.sample(_NAMES, rng.randint(1, 3))))
        else:
            node = ObjectNode(name, (state,))
        if node not in pool:
            pool.append(node)
    units = []
    for _ in range(n_units):
        ins = rng.sample(pool, rng.randint(1, 3))
        outs = rng.sample(pool, rng.randint(1, 2))
        units.append(FunctionalUnit(tuple(ins), rng.choice(_VERBS), tuple(outs), f"r{rng.randrange(recipes)}"))
    return merge([], extra_units=units), pool


def random_query(rng: random.Random, foon: UniversalFOON, pool: Sequence[ObjectNode]):
    """A producible goal, a random kitchen and a random ingredient request."""
    produced = sorted({o for u in foon.units for o in u.outputs})
    goal = rng.choice(produced)
    kitchen = {n for n in pool if n != goal and rng.random() < 0.4}
    I = rng.sample(_NAMES, rng.randint(1, 4))
    return goal, kitchen, I


def chain_foon(n: int, name: str = "dough") -> tuple[UniversalFOON, ObjectNode, ObjectNode]:
    """``n`` units turning ``name{s0}`` into ``name{sn}`` one step at a time, plus distractors."""
    units = []
    for k in range(n):
        units.append(
            FunctionalUnit(
                (ObjectNode(name, (f"s{k}",)), ObjectNode("bowl", ("empty",))),
                "mix",
                (ObjectNode(name, (f"s{k + 1}",)),),
                "chain",
            )
        )
    sg = Subgraph.from_units("chain", "bread", units)
    return merge([sg]), ObjectNode(name, ("s0",)), ObjectNode(name, (f"s{n}",))
