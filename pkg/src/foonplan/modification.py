"""Adapting a reference task tree to the requested ingredients.

Each requested ingredient is classified against the tree's starting
ingredients (same or equivalent name, same or different state) and handled
by renaming, grafting a state-conversion branch, or attaching a new
preparation branch. Ingredients nobody asked for are pruned at the end.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    ModificationError,
    NoAttachmentPoint,
    NotFound,
    NoVerbError,
    PruneConflict,
    UnconvertibleState,
    UnplaceableIngredient,
    UnreachableItem,
)
from .graph import FunctionalUnit, ObjectNode, UniversalFOON
from .lexicon import DishRules, MotionLexicon, StateTaxonomy, verb_for_state
from .retrieval import PlanRequest, Provenance, TaskTree, retrieve_task_tree
from .semantics import SimilarityConfig, SimilarityIndex, VectorStore, similarity

Chooser = Callable[[str, Sequence[tuple[str, float]]], "str | None"]


class CaseLabel(str, Enum):
    CASE1 = "Case1"  # same object, same state
    CASE2 = "Case2"  # equivalent object, same state
    CASE3 = "Case3"  # same object, different state
    CASE4 = "Case4"  # equivalent object, different state
    NOT_IN_TREE = "NotInTree"

    def __str__(self) -> str:
        return self.value


_CASE_RANK = {CaseLabel.CASE1: 0, CaseLabel.CASE3: 1, CaseLabel.CASE2: 2, CaseLabel.CASE4: 3}

# How far a state category sits from the raw product. A missing conversion
# branch is synthesized only when it moves to a strictly deeper category, so
# melted cheese is never turned back into diced cheese.
STATE_DEPTH = {
    "raw": 0,
    "whole": 0,
    "peeled-or-shelled": 1,
    "coarsely separated": 2,
    "finely separated": 3,
    "shaped": 3,
    "spread-or-coated": 4,
    "liquid": 4,
    "mixed": 4,
    "heat-treated": 4,
    "dissolved": 5,
}


# -- node and unit rewriting ---------------------------------------------------


def rename_node(n: ObjectNode, old: str, new: str) -> ObjectNode:
    if n.name == old and not n.ingredients:
        n = n.with_name(new)
    if old in n.ingredients:
        n = n.with_ingredients(new if x == old else x for x in n.ingredients)
    return n


def rename_unit(u: FunctionalUnit, old: str, new: str) -> FunctionalUnit:
    return u.replace(
        inputs=[rename_node(n, old, new) for n in u.inputs],
        outputs=[rename_node(n, old, new) for n in u.outputs],
    )


def _given(given) -> tuple[str, tuple[str, ...]]:
    if isinstance(given, ObjectNode):
        return given.name, given.states
    name, state = given
    if state is None:
        return name, ()
    return name, (state,) if isinstance(state, str) else tuple(state)


def _standalone_line(tree: TaskTree, leaf: ObjectNode) -> tuple[list[int], int | None, ObjectNode]:
    """Units that process ``leaf`` on its own, the unit where it first joins a
    mixture (or ``None``), and the last standalone form."""
    chain: list[int] = []
    current = leaf
    for i, u in enumerate(tree.units):
        if current not in u.inputs:
            continue
        nxt = [o for o in u.outputs if o.name == leaf.name and not o.ingredients]
        merged = any(leaf.name in o.ingredients for o in u.outputs)
        if nxt and not merged:
            chain.append(i)
            current = nxt[0]
        else:
            return chain, i, current
    return chain, None, current


def _touched(u: FunctionalUnit) -> set[str]:
    names: set[str] = set()
    for n in (*u.inputs, *u.outputs):
        if n.ingredients:
            names.update(n.ingredients)
        elif not n.is_utensil:
            names.add(n.name)
    return names


def _attach(
    tree: TaskTree,
    idx: int,
    branch: list[tuple[FunctionalUnit, Provenance]],
    terminal: ObjectNode,
    name: str,
) -> TaskTree:
    """Feed ``terminal`` into unit ``idx`` and add ``name`` to the mixtures downstream."""
    mapping: dict[ObjectNode, ObjectNode] = {}
    units = []
    for j, u in enumerate(tree.units):
        if j < idx:
            units.append(u)
            continue
        ins = [mapping.get(n, n) for n in u.inputs]
        if j == idx and terminal not in ins:
            ins.append(terminal)
        outs = list(u.outputs)
        if j == idx or any(n in mapping for n in u.inputs):
            for k, o in enumerate(outs):
                if o.ingredients and name not in o.ingredients:
                    outs[k] = mapping[o] = o.with_ingredients((*o.ingredients, name))
        units.append(u.replace(inputs=ins, outputs=outs))
    present = set(units[:idx])
    fresh = []
    for u, p in branch:
        if u not in present:
            present.add(u)
            fresh.append((u, p))
    prov = list(tree.provenance)
    new_units = units[:idx] + [u for u, _ in fresh] + units[idx:]
    new_prov = prov[:idx] + [p for _, p in fresh] + prov[idx:]
    return TaskTree(new_units, mapping.get(tree.goal, tree.goal), new_prov)


# -- classification ------------------------------------------------------------


def classify_case(
    given, tree: TaskTree, store: VectorStore, cfg: SimilarityConfig = SimilarityConfig()
) -> tuple[CaseLabel, ObjectNode | None]:
    """Match a requested (name, state) against the tree's starting ingredients.

    An empty state matches any leaf state. When several leaves qualify, the
    lower case number in the order 1, 3, 2, 4 wins, then higher similarity.
    """
    name, states = _given(given)
    best = None
    for leaf in tree.ingredient_leaves():
        if leaf.name == name:
            exact, sim = True, 1.0
        else:
            s = similarity(store, name, leaf.name)
            if s is None or s < cfg.tau:
                continue
            exact, sim = False, s
        same_state = set(states) <= set(leaf.states)
        if exact:
            label = CaseLabel.CASE1 if same_state else CaseLabel.CASE3
        else:
            label = CaseLabel.CASE2 if same_state else CaseLabel.CASE4
        rank = (_CASE_RANK[label], -sim, leaf.key)
        if best is None or rank < best[0]:
            best = (rank, label, leaf)
    if best is None:
        return CaseLabel.NOT_IN_TREE, None
    return best[1], best[2]


# -- Case 2: renaming --------------------------------------------------------------


def substitute_object(tree: TaskTree, leaf: ObjectNode, new_name: str, keep_original: bool = False) -> TaskTree:
    """Rename ``leaf`` to ``new_name`` along its progress line.

    With ``keep_original`` the leaf's own preparation is copied under the new
    name and joined into the same mixture, so both ingredients stay in the tree.
    """
    if leaf not in tree.leaves():
        raise NotFound(leaf.name, f"{leaf} is not a starting item of the tree")
    old = leaf.name
    if new_name == old:
        return tree.copy()
    if not keep_original:
        return TaskTree(
            [rename_unit(u, old, new_name) for u in tree.units],
            rename_node(tree.goal, old, new_name),
            tree.provenance,
        )
    chain, merge_at, last = _standalone_line(tree, leaf)
    if merge_at is None:
        raise NoAttachmentPoint(new_name, f"{old} never joins a mixture, so {new_name} cannot be added beside it")
    branch = [
        (rename_unit(tree.units[i], old, new_name), Provenance(tree.provenance[i].source_recipe, "copied"))
        for i in chain
    ]
    return _attach(tree, merge_at, branch, rename_node(last, old, new_name), new_name)


# -- Case 3: state conversion -------------------------------------------------------


def _deepest(states: Iterable[str], tax: StateTaxonomy) -> int | None:
    depths = [STATE_DEPTH.get(tax.category(s) or "") for s in states if tax.category(s) != "placed-in-container"]
    if any(d is None for d in depths):
        return None
    return max(depths, default=0)


def synthesize_unit(
    start: ObjectNode, target: ObjectNode, foon: UniversalFOON, lex: MotionLexicon, tax: StateTaxonomy
) -> tuple[FunctionalUnit, Provenance]:
    """A one-step conversion built from the verb most associated with the target state."""
    fresh = sorted(s for s in target.states if s not in start.states)
    src, dst = _deepest(start.states, tax), _deepest(fresh, tax)
    if not fresh or src is None or dst is None or dst <= src:
        raise UnconvertibleState(target.name, f"no way to turn {start} into {target}")
    try:
        verb = verb_for_state(lex, fresh[0], tax)
    except NoVerbError:
        raise UnconvertibleState(target.name, f"no motion produces state {fresh[0]!r}") from None
    template = next(u for u in foon.units if u.verb == verb)
    tools = sorted({n for n in template.inputs if n.is_utensil})
    unit = FunctionalUnit((start, *tools), verb, (target,), template.source_recipe)
    return unit, Provenance(template.source_recipe, "synthesized")


def conversion_branch(
    start: ObjectNode,
    target: ObjectNode,
    foon: UniversalFOON,
    store: VectorStore,
    cfg: SimilarityConfig,
    lex: MotionLexicon | None,
    tax: StateTaxonomy | None,
    kitchen: Iterable[ObjectNode] | None = None,
) -> list[tuple[FunctionalUnit, Provenance]]:
    """Units that turn ``start`` into ``target``: retrieved if possible, else synthesized."""
    if start == target:
        return []
    base = foon.default_kitchen() if kitchen is None else frozenset(kitchen) | foon.utensil_nodes()
    items = {n for n in base if n.name != start.name} | {start}
    try:
        t = retrieve_task_tree(target, [target.name], items, foon, store, cfg)
        return [(u, Provenance(p.source_recipe, "retrieved")) for u, p in zip(t.units, t.provenance)]
    except UnreachableItem:
        pass
    if lex is None or tax is None:
        raise UnconvertibleState(target.name, f"no path from {start} to {target}")
    return [synthesize_unit(start, target, foon, lex, tax)]


def _trim_prefix(tree: TaskTree, leaf: ObjectNode, state: str) -> TaskTree | None:
    """Drop the leaf's own preparation up to the point where it reaches ``state``."""
    chain, _, _ = _standalone_line(tree, leaf)
    for k, i in enumerate(chain):
        if any(o.name == leaf.name and state in o.states for o in tree.units[i].outputs):
            cut = set(chain[: k + 1])
            if all(_touched(tree.units[j]) == {leaf.name} for j in cut):
                keep = [j for j in range(len(tree.units)) if j not in cut]
                return TaskTree([tree.units[j] for j in keep], tree.goal, [tree.provenance[j] for j in keep])
            return None
    return None


def graft_state_branch(
    tree: TaskTree,
    leaf: ObjectNode,
    start_state: str,
    foon: UniversalFOON,
    store: VectorStore,
    cfg: SimilarityConfig = SimilarityConfig(),
    lex: MotionLexicon | None = None,
    tax: StateTaxonomy | None = None,
    kitchen: Iterable[ObjectNode] | None = None,
) -> TaskTree:
    """Make the tree start from ``leaf.name`` in ``start_state`` instead of ``leaf``."""
    if leaf not in tree.leaves():
        raise NotFound(leaf.name, f"{leaf} is not a starting item of the tree")
    if start_state in leaf.states:
        return tree.copy()
    trimmed = _trim_prefix(tree, leaf, start_state)
    if trimmed is not None:
        return trimmed
    start = ObjectNode(leaf.name, (start_state,))
    branch = conversion_branch(start, leaf, foon, store, cfg, lex, tax, kitchen)
    present = set(tree.units)
    fresh = [(u, p) for u, p in branch if u not in present]
    return TaskTree(
        [u for u, _ in fresh] + tree.units,
        tree.goal,
        [p for _, p in fresh] + tree.provenance,
    )


# -- missing ingredients -----------------------------------------------------------


def _state_counts(name: str, subgraphs) -> Counter:
    counts: Counter = Counter()
    for sg in subgraphs:
        nodes = {n for u in sg.units for n in (*u.inputs, *u.outputs) if n.name == name and not n.ingredients}
        for n in nodes:
            counts.update(n.states)
    return counts


def select_state_for_new_ingredient(
    name: str, dish_type: str, foon: UniversalFOON, tax: StateTaxonomy
) -> str | None:
    """Most frequent state of ``name`` in recipes of ``dish_type``; ties go to the smaller name.

    Without dish-type evidence, corpus-wide counts are used, first limited to
    the state categories the dish type uses.
    """
    recipes = [sg for sg in foon.subgraphs.values() if sg.dish_type == dish_type]
    counts = _state_counts(name, recipes)
    if not counts:
        everywhere = _state_counts(name, foon.subgraphs.values())
        used = {
            tax.category(s) for sg in recipes for u in sg.units for n in (*u.inputs, *u.outputs) for s in n.states
        } - {None}
        counts = Counter({s: c for s, c in everywhere.items() if tax.category(s) in used}) or everywhere
    if not counts:
        return None
    return min(counts, key=lambda s: (-counts[s], s))


def attachment_index(tree: TaskTree, dish_type: str, rules: DishRules) -> int | None:
    verbs = rules.verbs_for(dish_type)
    for i, u in enumerate(tree.units):
        if u.verb in verbs and any(o.ingredients for o in u.outputs):
            return i
    return None


def integrate_missing_ingredient(
    tree: TaskTree,
    given,
    dish_type: str,
    foon: UniversalFOON,
    store: VectorStore,
    lex: MotionLexicon | None,
    rules: DishRules,
    cfg: SimilarityConfig = SimilarityConfig(),
    tax: StateTaxonomy | None = None,
    equivalent: str | None = None,
    index: SimilarityIndex | None = None,
    kitchen: Iterable[ObjectNode] | None = None,
    target_state: str | None = None,
) -> TaskTree:
    """Prepare a new ingredient like its closest corpus equivalent and mix it in."""
    name, states = _given(given)
    vocab = foon.ingredient_names()
    if equivalent is None:
        if name in vocab:
            equivalent = name
        else:
            index = index or SimilarityIndex(store, vocab)
            ranked = index.top_k(name, cfg.top_k)
            if not ranked or ranked[0][1] < cfg.tau:
                raise UnplaceableIngredient(name, f"no corpus ingredient is similar enough to {name!r}")
            equivalent = ranked[0][0]
    idx = attachment_index(tree, dish_type, rules)
    if idx is None:
        raise NoAttachmentPoint(name, f"no step in this {dish_type} tree accepts new ingredients")
    if target_state is None and tax is not None:
        target_state = select_state_for_new_ingredient(equivalent, dish_type, foon, tax)
    if target_state is None:
        if not states:
            raise UnplaceableIngredient(name, f"no state known for {name!r}")
        target_state = states[0]
    start = ObjectNode(equivalent, states or (target_state,))
    if target_state in start.states:
        branch, terminal = [], start
    else:
        terminal = ObjectNode(equivalent, (target_state,))
        branch = conversion_branch(start, terminal, foon, store, cfg, lex, tax, kitchen)
    branch = [
        (rename_unit(u, equivalent, name), p if p.origin == "synthesized" else Provenance(p.source_recipe, "copied"))
        for u, p in branch
    ]
    return _attach(tree, idx, branch, rename_node(terminal, equivalent, name), name)


# -- pruning -----------------------------------------------------------------------


def prune_extra_ingredients(tree: TaskTree, I: Iterable[str]) -> tuple[TaskTree, list[PruneConflict]]:
    """Remove ingredients outside ``I`` and the steps that only serve them."""
    extras = tree.ingredient_names() - set(I)
    if not extras or not tree.units:
        return tree.copy(), []

    def strip(n: ObjectNode) -> ObjectNode:
        if any(x in extras for x in n.ingredients):
            return n.with_ingredients(x for x in n.ingredients if x not in extras)
        return n

    def is_extra(n: ObjectNode) -> bool:
        return not n.ingredients and not n.is_utensil and n.name in extras

    dropped = {i for i, u in enumerate(tree.units) if _touched(u) and _touched(u) <= extras}
    passthrough: dict[ObjectNode, ObjectNode | None] = {}
    for i in sorted(dropped):
        u = tree.units[i]
        for o in u.outputs:
            same = sorted(n for n in u.inputs if n.name == o.name and n != o)
            passthrough[o] = passthrough.get(same[0], same[0]) if same else None

    units: list[FunctionalUnit] = []
    prov: list[Provenance] = []
    seen = set()
    problems = []
    for i, u in enumerate(tree.units):
        if i in dropped:
            continue
        ins = []
        for n in u.inputs:
            n = passthrough.get(n, n)
            if n is not None and not is_extra(n):
                ins.append(strip(n))
        outs = [strip(o) for o in u.outputs if not is_extra(o)]
        if not ins or not outs:
            problems.append(f"step {i + 1} ({u.verb}) would lose all its inputs or outputs")
            continue
        v = u.replace(inputs=dict.fromkeys(ins), outputs=dict.fromkeys(outs))
        if set(v.outputs) <= set(v.inputs) or v in seen:
            continue
        seen.add(v)
        units.append(v)
        prov.append(tree.provenance[i])

    goal = strip(tree.goal)
    producers = [i for i, u in enumerate(units) if goal in u.outputs]
    if not producers:
        problems.append("the goal would no longer be produced")
    else:
        last = producers[-1]
        keep = {last}
        need = set(units[last].inputs)
        for i in range(last - 1, -1, -1):
            hits = need & set(units[i].outputs)
            if hits:
                keep.add(i)
                need -= hits
                need |= set(units[i].inputs)
        order = sorted(keep)
        pruned = TaskTree([units[i] for i in order], goal, [prov[i] for i in order])
        if not problems:
            problems = pruned.problems()
        if not problems:
            return pruned, []
    names = ", ".join(sorted(extras))
    return tree.copy(), [PruneConflict(names, f"kept {names}: " + "; ".join(problems))]


# -- the whole pass ----------------------------------------------------------------


@dataclass
class ModificationResult:
    tree: TaskTree
    errors: list[ModificationError] = field(default_factory=list)
    warnings: list[ModificationError] = field(default_factory=list)
    cases: dict[str, CaseLabel] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors


def _leaf_states(tree: TaskTree, name: str) -> tuple[str, ...]:
    for leaf in tree.ingredient_leaves():
        if leaf.name == name:
            return leaf.states
    return ()


def modify_task_tree(
    reference: TaskTree,
    req: PlanRequest,
    foon: UniversalFOON,
    store: VectorStore,
    lex: MotionLexicon,
    tax: StateTaxonomy,
    rules: DishRules,
    cfg: SimilarityConfig = SimilarityConfig(),
    overrides: Mapping[str, str] | None = None,
    chooser: Chooser | None = None,
    index: SimilarityIndex | None = None,
    kitchen: Iterable[ObjectNode] | None = None,
) -> ModificationResult:
    """Apply the case rules to every requested ingredient, then prune.

    ``overrides`` maps an ingredient to the substitute the user picked; it
    takes precedence over similarity ranking. ``chooser`` is asked for the
    same choice interactively when an ingredient is unknown to the corpus.
    Per-ingredient failures are collected instead of raised.
    """
    overrides = dict(overrides or {})
    kitchen = None if kitchen is None else frozenset(kitchen)
    vocab = foon.ingredient_names()
    tree = reference.copy()
    out = ModificationResult(tree)
    required = set(req.names)
    leaf_names = {leaf.name for leaf in tree.ingredient_leaves()}
    for name, state in sorted(req.ingredients, key=lambda p: (p[0] not in leaf_names, p[0])):
        try:
            states = (state,) if state else _leaf_states(tree, name)
            pick = overrides.get(name)
            if pick is not None and name not in leaf_names:
                leaf = next((lf for lf in tree.ingredient_leaves() if lf.name == pick), None)
                if leaf is None:
                    case = CaseLabel.NOT_IN_TREE
                elif set(states) <= set(leaf.states):
                    case = CaseLabel.CASE2
                else:
                    case = CaseLabel.CASE4
            else:
                case, leaf = classify_case((name, states), tree, store, cfg)
            out.cases[name] = case
            if case is CaseLabel.CASE1:
                continue
            if case in (CaseLabel.CASE2, CaseLabel.CASE4):
                tree = substitute_object(tree, leaf, name, keep_original=leaf.name in required)
                leaf = rename_node(leaf, leaf.name, name)
            if case in (CaseLabel.CASE3, CaseLabel.CASE4):
                try:
                    tree = graft_state_branch(tree, leaf, states[0], foon, store, cfg, lex, tax, kitchen)
                except UnconvertibleState as exc:
                    out.warnings.append(exc)
            if case is CaseLabel.NOT_IN_TREE:
                if pick is None and chooser is not None and name not in vocab:
                    index = index or SimilarityIndex(store, vocab)
                    pick = chooser(name, index.top_k(name, cfg.top_k))
                args = (tree, (name, states), req.dish_type, foon, store, lex, rules, cfg, tax, pick, index, kitchen)
                try:
                    tree = integrate_missing_ingredient(*args)
                except UnconvertibleState as exc:
                    if not states:
                        raise
                    out.warnings.append(exc)
                    tree = integrate_missing_ingredient(*args, target_state=states[0])
        except ModificationError as exc:
            out.errors.append(exc)
    tree, conflicts = prune_extra_ingredients(tree, required)
    out.warnings.extend(conflicts)
    out.tree = tree
    return out
