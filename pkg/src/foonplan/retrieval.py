"""Reference goal selection and best-first task-tree retrieval."""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import UnknownDishClass, UnreachableItem
from .graph import FunctionalUnit, ObjectNode, UniversalFOON, units_producing
from .semantics import SimilarityConfig, VectorStore, matches


@dataclass(frozen=True)
class PlanRequest:
    """Requested ingredients as (name, state) pairs; a ``None`` state is resolved later."""

    ingredients: tuple[tuple[str, str | None], ...]
    dish_type: str

    def __post_init__(self):
        cleaned = []
        for name, state in self.ingredients:
            name = " ".join(name.strip().lower().split())
            if not name:
                raise ValueError("ingredient names must be non-empty")
            state = " ".join(state.strip().lower().split()) if state else None
            cleaned.append((name, state or None))
        if not cleaned:
            raise ValueError("a plan request needs at least one ingredient")
        object.__setattr__(self, "ingredients", tuple(cleaned))
        object.__setattr__(self, "dish_type", self.dish_type.strip().lower())

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.ingredients]

    def nodes(self) -> list[ObjectNode]:
        return [ObjectNode(n, (s,)) for n, s in self.ingredients if s]


@dataclass(frozen=True)
class Kitchen:
    items: frozenset[ObjectNode] = frozenset()

    def __contains__(self, node: ObjectNode) -> bool:
        return node in self.items

    def __iter__(self):
        return iter(self.items)

    def __or__(self, other: Iterable[ObjectNode]) -> Kitchen:
        return Kitchen(self.items | frozenset(other))


@dataclass(frozen=True)
class Provenance:
    source_recipe: str
    origin: str = "retrieved"  # retrieved | copied | synthesized


@dataclass
class TaskTree:
    units: list[FunctionalUnit]
    goal: ObjectNode
    provenance: list[Provenance] = field(default_factory=list)

    def __post_init__(self):
        self.units = list(self.units)
        if not self.provenance:
            self.provenance = [Provenance(u.source_recipe) for u in self.units]
        self.provenance = list(self.provenance)
        if len(self.provenance) != len(self.units):
            raise ValueError("provenance must have one entry per unit")

    def __len__(self) -> int:
        return len(self.units)

    def copy(self) -> TaskTree:
        return TaskTree(list(self.units), self.goal, list(self.provenance))

    def same_as(self, other: TaskTree) -> bool:
        return self.goal == other.goal and [u.key for u in self.units] == [u.key for u in other.units]

    def produced(self) -> set[ObjectNode]:
        return {o for u in self.units for o in u.outputs}

    def leaves(self) -> list[ObjectNode]:
        """Starting items (inputs no unit produces), in first-use order."""
        produced = self.produced()
        seen: dict[ObjectNode, None] = {}
        for u in self.units:
            for n in u.inputs:
                if n not in produced:
                    seen.setdefault(n, None)
        return list(seen)

    def ingredient_leaves(self) -> list[ObjectNode]:
        return [n for n in self.leaves() if not n.is_utensil and not n.ingredients]

    def ingredient_names(self) -> set[str]:
        """Plain non-utensil object names plus every composite member."""
        names: set[str] = set()
        for u in self.units:
            for n in (*u.inputs, *u.outputs):
                if n.ingredients:
                    names.update(n.ingredients)
                elif not n.is_utensil:
                    names.add(n.name)
        return names

    def problems(self, kitchen: Iterable[ObjectNode] | None = None) -> list[str]:
        """Violations of executable ordering, connectivity and single-goal shape."""
        out: list[str] = []
        if not self.units:
            return out
        kitchen = None if kitchen is None else set(kitchen)
        first_output: dict[ObjectNode, int] = {}
        for i, u in enumerate(self.units):
            for o in u.outputs:
                first_output.setdefault(o, i)
        for i, u in enumerate(self.units):
            for n in u.inputs:
                j = first_output.get(n)
                if j is not None and j < i:
                    continue
                if kitchen is not None:
                    if n not in kitchen:
                        out.append(f"step {i + 1}: input {n} is neither in the kitchen nor produced earlier")
                elif j is not None:
                    out.append(f"step {i + 1}: input {n} is only produced at step {j + 1}")
        consumed_after = set()
        for i in range(len(self.units) - 1, -1, -1):
            u = self.units[i]
            if i < len(self.units) - 1 and not any(o in consumed_after for o in u.outputs):
                out.append(f"step {i + 1}: outputs feed no later step")
            consumed_after.update(u.inputs)
        if self.goal not in self.units[-1].outputs:
            out.append(f"goal {self.goal} is not an output of the final step")
        return out


def ingredient_match(store: VectorStore, a: str, b: str, cfg: SimilarityConfig) -> bool:
    return matches(store, a, b, cfg.tau)


def score_goal_candidate(
    I: Iterable[str], S: Iterable[str], store: VectorStore, cfg: SimilarityConfig = SimilarityConfig()
) -> int:
    """How many requested ingredients the candidate holds, exactly or by embedding."""
    S = list(S)
    return sum(1 for i in set(I) if any(ingredient_match(store, i, s, cfg) for s in S))


def _extras(I: Sequence[str], S: Sequence[str], store, cfg) -> int:
    return sum(1 for s in set(S) if not any(ingredient_match(store, i, s, cfg) for i in I))


def find_reference_goal(
    req: PlanRequest, foon: UniversalFOON, store: VectorStore, cfg: SimilarityConfig = SimilarityConfig()
) -> tuple[ObjectNode, str]:
    candidates = foon.recipe_index.get(req.dish_type, ())
    if not candidates:
        raise UnknownDishClass(f"no recipes of dish type {req.dish_type!r}")
    I = req.names
    best = min(
        candidates,
        key=lambda e: (
            -score_goal_candidate(I, e.goal.ingredients, store, cfg),
            _extras(I, e.goal.ingredients, store, cfg),
            e.recipe_id,
        ),
    )
    return best.goal, best.recipe_id


def ingredient_set(n: ObjectNode) -> set[str]:
    """A_n: contained ingredients, plus the node's own name unless it is a container."""
    if n.is_container:
        return set(n.ingredients)
    return set(n.ingredients) | {n.name}


def heuristic_g(
    n: ObjectNode, I: Iterable[str], store: VectorStore, cfg: SimilarityConfig = SimilarityConfig()
) -> int:
    I = list(I)
    return sum(1 for a in ingredient_set(n) if any(ingredient_match(store, a, i, cfg) for i in I))


class _Scorer:
    def __init__(self, I, store, cfg):
        self.I = sorted(set(I))
        self.store = store
        self.cfg = cfg
        self._cache: dict[ObjectNode, int] = {}

    def node(self, n: ObjectNode) -> int:
        v = self._cache.get(n)
        if v is None:
            v = self._cache[n] = heuristic_g(n, self.I, self.store, self.cfg)
        return v

    def unit_key(self, u: FunctionalUnit):
        """Sort key: best candidate first."""
        return (-sum(self.node(n) for n in u.inputs), len(u.inputs), u.source_recipe, u.key)


def candidate_score(u: FunctionalUnit, I, store: VectorStore, cfg: SimilarityConfig = SimilarityConfig()) -> int:
    """A candidate unit's score: the heuristic summed over its input nodes."""
    return sum(heuristic_g(n, I, store, cfg) for n in u.inputs)


def _reaches(start: Iterable[ObjectNode], target: ObjectNode, requires: dict) -> bool:
    stack = list(start)
    seen = set()
    while stack:
        n = stack.pop()
        if n == target:
            return True
        if n in seen:
            continue
        seen.add(n)
        stack.extend(requires.get(n, ()))
    return False


def execution_order(
    chosen: list[FunctionalUnit], kitchen, made_by: Mapping[ObjectNode, FunctionalUnit] | None = None
) -> list[FunctionalUnit]:
    """Reverse the selection list, then repair it into a valid execution order.

    Among ready units the one earliest in the reversed list always goes first,
    so a plain tree comes out exactly reversed. ``made_by`` names the unit the
    search picked for each item; without it the first listed producer is used.
    """
    seq: list[FunctionalUnit] = []
    seen = set()
    for u in reversed(chosen):
        if u not in seen:
            seen.add(u)
            seq.append(u)
    producer: dict[ObjectNode, int] = {}
    for i, u in enumerate(seq):
        for o in u.outputs:
            producer.setdefault(o, i)
    if made_by:
        index = {u: i for i, u in enumerate(seq)}
        producer.update({n: index[u] for n, u in made_by.items() if u in index})
    deps: list[set[int]] = []
    dependents: list[list[int]] = [[] for _ in seq]
    for i, u in enumerate(seq):
        d = {producer[n] for n in u.inputs if n not in kitchen and n in producer and producer[n] != i}
        deps.append(d)
        for j in d:
            dependents[j].append(i)
    remaining = [len(d) for d in deps]
    ready = [i for i, r in enumerate(remaining) if r == 0]
    heapq.heapify(ready)
    out = []
    while ready:
        i = heapq.heappop(ready)
        out.append(seq[i])
        for j in dependents[i]:
            remaining[j] -= 1
            if remaining[j] == 0:
                heapq.heappush(ready, j)
    if len(out) != len(seq):
        raise RuntimeError("selected units contain a dependency cycle")
    return out


def retrieve_task_tree(
    goal: ObjectNode,
    I: Iterable[str],
    kitchen: Kitchen | Iterable[ObjectNode],
    foon: UniversalFOON,
    store: VectorStore,
    cfg: SimilarityConfig = SimilarityConfig(),
    stats: dict | None = None,
) -> TaskTree:
    """Best-first retrieval of a task tree for ``goal``.

    Items are dequeued in FIFO order; each one missing from the kitchen is
    expanded with the best-scoring unit that produces it. Candidates whose
    inputs already depend on the item are skipped so the result stays acyclic.
    """
    kitchen = kitchen.items if isinstance(kitchen, Kitchen) else frozenset(kitchen)
    scorer = _Scorer(I, store, cfg)
    chosen: list[FunctionalUnit] = []
    requires: dict[ObjectNode, tuple[ObjectNode, ...]] = {}
    made_by: dict[ObjectNode, FunctionalUnit] = {}
    queue = deque([goal])
    visited = {goal}
    expansions = 0
    peak_frontier = 1
    while queue:
        item = queue.popleft()
        if item in kitchen:
            continue
        expansions += 1
        candidates = [
            c for c in units_producing(foon, item) if not _reaches(c.inputs, item, requires)
        ]
        if not candidates:
            raise UnreachableItem(item)
        best = min(candidates, key=scorer.unit_key)
        chosen.append(best)
        requires[item] = best.inputs
        made_by[item] = best
        for n in best.inputs:
            if n not in visited:
                visited.add(n)
                queue.append(n)
        peak_frontier = max(peak_frontier, len(queue))
    units = execution_order(chosen, kitchen, made_by)
    if stats is not None:
        stats.update(expansions=expansions, visited=len(visited), peak_frontier=peak_frontier, units=len(units))
    return TaskTree(units, goal, [Provenance(u.source_recipe, "retrieved") for u in units])
