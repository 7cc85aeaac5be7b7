"""Bipartite network types: object nodes, motion nodes, functional units.

A universal FOON is the deduplicated union of recipe subgraphs plus the
indexes the planner needs: a producer index from object keys to the units
that output them, and a recipe index from dish class to goal nodes.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import IdentifierConflict

CONTAINERS = frozenset(
    {"bowl", "pan", "cup", "blender", "pot", "plate", "glass", "cutting board"}
)
TOOLS = frozenset(
    {
        "knife",
        "peeler",
        "whisk",
        "spoon",
        "fork",
        "grater",
        "juicer",
        "oven",
        "stove",
        "spatula",
        "mixer",
        "ladle",
        "baking pan",
        "shaker",
        "mortar",
    }
)
UTENSILS = CONTAINERS | TOOLS


def _clean(token: str) -> str:
    return " ".join(token.strip().lower().split())


def _dedupe(items: Iterable[str]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for item in items:
        item = _clean(item)
        if item:
            seen.setdefault(item, None)
    return tuple(seen)


@dataclass(frozen=True, eq=False)
class ObjectNode:
    """An object in a given set of states, optionally holding ingredients."""

    name: str
    states: tuple[str, ...] = ()
    ingredients: tuple[str, ...] = ()

    def __post_init__(self):
        name = _clean(self.name)
        if not name:
            raise ValueError("object name must be non-empty")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "states", _dedupe(self.states))
        object.__setattr__(self, "ingredients", _dedupe(self.ingredients))

    @property
    def key(self) -> tuple[str, tuple[str, ...], tuple[str, ...]]:
        return (self.name, tuple(sorted(self.states)), tuple(sorted(self.ingredients)))

    @property
    def is_container(self) -> bool:
        return bool(self.ingredients) or self.name in CONTAINERS

    @property
    def is_utensil(self) -> bool:
        return not self.ingredients and self.name in UTENSILS

    def __eq__(self, other):
        if not isinstance(other, ObjectNode):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other: ObjectNode) -> bool:
        return self.key < other.key

    def with_name(self, name: str) -> ObjectNode:
        return ObjectNode(name, self.states, self.ingredients)

    def with_states(self, states: Iterable[str]) -> ObjectNode:
        return ObjectNode(self.name, tuple(states), self.ingredients)

    def with_ingredients(self, ingredients: Iterable[str]) -> ObjectNode:
        return ObjectNode(self.name, self.states, tuple(ingredients))

    def label(self) -> str:
        text = f"{self.name} {{{', '.join(self.states)}}}"
        if self.ingredients:
            text += f" [{', '.join(self.ingredients)}]"
        return text

    def __str__(self) -> str:
        return self.label()


@dataclass(frozen=True)
class MotionNode:
    verb: str

    def __post_init__(self):
        verb = _clean(self.verb)
        if not verb:
            raise ValueError("motion verb must be non-empty")
        object.__setattr__(self, "verb", verb)

    def __str__(self) -> str:
        return self.verb


@dataclass(frozen=True, eq=False)
class FunctionalUnit:
    """Input objects, one motion, output objects.

    Equality ignores ``source_recipe`` and the order of inputs and outputs.
    """

    inputs: tuple[ObjectNode, ...]
    motion: MotionNode
    outputs: tuple[ObjectNode, ...]
    source_recipe: str = ""

    def __post_init__(self):
        if isinstance(self.motion, str):
            object.__setattr__(self, "motion", MotionNode(self.motion))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if not self.inputs or not self.outputs:
            raise ValueError("a functional unit needs at least one input and one output")

    @property
    def key(self):
        return (
            tuple(sorted(n.key for n in self.inputs)),
            self.motion.verb,
            tuple(sorted(n.key for n in self.outputs)),
        )

    @property
    def verb(self) -> str:
        return self.motion.verb

    def canonical(self) -> FunctionalUnit:
        """Same unit with inputs and outputs in sorted order."""
        return FunctionalUnit(
            tuple(sorted(self.inputs)), self.motion, tuple(sorted(self.outputs)), self.source_recipe
        )

    def replace(self, inputs=None, outputs=None, motion=None, source_recipe=None) -> FunctionalUnit:
        return FunctionalUnit(
            tuple(self.inputs if inputs is None else inputs),
            self.motion if motion is None else MotionNode(motion),
            tuple(self.outputs if outputs is None else outputs),
            self.source_recipe if source_recipe is None else source_recipe,
        )

    def __eq__(self, other):
        if not isinstance(other, FunctionalUnit):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __str__(self) -> str:
        ins = " + ".join(map(str, self.inputs))
        outs = " + ".join(map(str, self.outputs))
        return f"{ins} --{self.verb}--> {outs}"


@dataclass(frozen=True)
class Subgraph:
    recipe_id: str
    dish_type: str
    units: tuple[FunctionalUnit, ...]
    goal: ObjectNode

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(self.units))
        if not self.units:
            raise ValueError(f"subgraph {self.recipe_id!r} has no units")
        if self.goal not in self.units[-1].outputs:
            raise ValueError(f"subgraph {self.recipe_id!r}: goal is not an output of the last unit")

    @classmethod
    def from_units(cls, recipe_id: str, dish_type: str, units: Iterable[FunctionalUnit]) -> Subgraph:
        units = tuple(u.replace(source_recipe=recipe_id) for u in units)
        if not units:
            raise ValueError(f"subgraph {recipe_id!r} has no units")
        return cls(recipe_id, dish_type, units, default_goal(units[-1]))

    def canonical_units(self) -> frozenset[FunctionalUnit]:
        return frozenset(self.units)

    def starting_items(self) -> list[ObjectNode]:
        """Inputs never produced inside this subgraph, in first-use order."""
        produced = {o for u in self.units for o in u.outputs}
        seen: dict[ObjectNode, None] = {}
        for u in self.units:
            for n in u.inputs:
                if n not in produced:
                    seen.setdefault(n, None)
        return list(seen)

    def same_content(self, other: Subgraph) -> bool:
        return (
            self.recipe_id == other.recipe_id
            and self.dish_type == other.dish_type
            and self.goal == other.goal
            and [u.key for u in self.units] == [u.key for u in other.units]
        )


def default_goal(last: FunctionalUnit) -> ObjectNode:
    """The final unit's output that carries an ingredient list, else its first non-utensil output.

    Ties are broken by canonical order so the choice does not depend on how
    the outputs happen to be listed.
    """
    holders = sorted(n for n in last.outputs if n.ingredients)
    if holders:
        return holders[0]
    plain = sorted(n for n in last.outputs if not n.is_utensil)
    return plain[0] if plain else min(last.outputs)


@dataclass(frozen=True)
class RecipeEntry:
    recipe_id: str
    dish_type: str
    goal: ObjectNode


@dataclass(frozen=True)
class UniversalFOON:
    """Deduplicated union of subgraphs; immutable once built."""

    units: tuple[FunctionalUnit, ...] = ()
    producers: Mapping[tuple, tuple[FunctionalUnit, ...]] = field(
        default_factory=lambda: MappingProxyType({})
    )
    recipe_index: Mapping[str, tuple[RecipeEntry, ...]] = field(
        default_factory=lambda: MappingProxyType({})
    )
    ingredient_vocab: frozenset[str] = frozenset()
    subgraphs: Mapping[str, Subgraph] = field(default_factory=lambda: MappingProxyType({}))

    @property
    def unit_set(self) -> frozenset[FunctionalUnit]:
        return frozenset(self.units)

    def __len__(self) -> int:
        return len(self.units)

    def recipes(self) -> list[RecipeEntry]:
        return [e for d in sorted(self.recipe_index) for e in self.recipe_index[d]]

    def object_nodes(self) -> set[ObjectNode]:
        return {n for u in self.units for n in (*u.inputs, *u.outputs)}

    def ingredient_names(self) -> frozenset[str]:
        """Vocabulary minus utensils and names that only ever label composites."""
        plain = set()
        members = set()
        for n in self.object_nodes():
            members.update(n.ingredients)
            if not n.ingredients and n.name not in UTENSILS:
                plain.add(n.name)
        return frozenset(plain | members)

    def pantry(self) -> frozenset[ObjectNode]:
        """Every recipe's starting items: the default kitchen."""
        items: set[ObjectNode] = set()
        for sg in self.subgraphs.values():
            items.update(sg.starting_items())
        return frozenset(items)

    def base_items(self) -> frozenset[ObjectNode]:
        """Pantry items that no unit produces."""
        return frozenset(n for n in self.pantry() if n.key not in self.producers)

    def default_kitchen(self) -> frozenset[ObjectNode]:
        return self.base_items() | self.utensil_nodes()

    def utensil_nodes(self) -> frozenset[ObjectNode]:
        return frozenset(n for n in self.object_nodes() if n.is_utensil)

    def union(self, other: UniversalFOON) -> UniversalFOON:
        return merge(list(self.subgraphs.values()) + list(other.subgraphs.values()), extra_units=self.units + other.units)


def _unit_order(u: FunctionalUnit):
    return (u.source_recipe, u.key)


def merge(subgraphs: Iterable[Subgraph], extra_units: Iterable[FunctionalUnit] = ()) -> UniversalFOON:
    """Union of all functional units; duplicates collapse to one unit.

    A recipe id may appear twice only when both copies are identical.
    The surviving copy of a duplicated unit keeps the smallest source recipe id.
    """
    by_id: dict[str, Subgraph] = {}
    for sg in subgraphs:
        prior = by_id.get(sg.recipe_id)
        if prior is not None:
            if not prior.same_content(sg):
                raise IdentifierConflict(f"recipe id {sg.recipe_id!r} used by two different subgraphs")
            continue
        by_id[sg.recipe_id] = sg

    chosen: dict[FunctionalUnit, FunctionalUnit] = {}
    candidates = [u for sg in by_id.values() for u in sg.units]
    candidates.extend(extra_units)
    for u in candidates:
        prior = chosen.get(u)
        if prior is None or u.source_recipe < prior.source_recipe:
            chosen[u] = u.canonical()
    units = tuple(sorted(chosen.values(), key=_unit_order))

    producers: dict[tuple, list[FunctionalUnit]] = defaultdict(list)
    vocab: set[str] = set()
    for u in units:
        for o in u.outputs:
            if u not in producers[o.key]:
                producers[o.key].append(u)
        for n in (*u.inputs, *u.outputs):
            vocab.add(n.name)
            vocab.update(n.ingredients)

    index: dict[str, list[RecipeEntry]] = defaultdict(list)
    for rid in sorted(by_id):
        sg = by_id[rid]
        index[sg.dish_type].append(RecipeEntry(rid, sg.dish_type, sg.goal))

    return UniversalFOON(
        units=units,
        producers=MappingProxyType({k: tuple(v) for k, v in producers.items()}),
        recipe_index=MappingProxyType({k: tuple(v) for k, v in index.items()}),
        ingredient_vocab=frozenset(vocab),
        subgraphs=MappingProxyType(dict(sorted(by_id.items()))),
    )


def units_producing(foon: UniversalFOON, node: ObjectNode) -> list[FunctionalUnit]:
    return list(foon.producers.get(node.key, ()))


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


def validate(
    foon: UniversalFOON,
    motions: Iterable[str] | None = None,
    dish_classes: Iterable[str] | None = None,
) -> list[Diagnostic]:
    """Structural diagnostics; an empty list means the FOON is clean.

    ``motions`` and ``dish_classes`` default to the bundled configuration.
    """
    if motions is None or dish_classes is None:
        from .lexicon import load_dish_rules, load_motion_flags

        if motions is None:
            motions = load_motion_flags().keys()
        if dish_classes is None:
            dish_classes = load_dish_rules().classes
    motions = set(motions)
    dish_classes = set(dish_classes)
    out: list[Diagnostic] = []

    for u in foon.units:
        if not u.inputs or not u.outputs:
            out.append(Diagnostic("empty-unit", f"unit from {u.source_recipe} has empty inputs or outputs"))
        if u.verb not in motions:
            out.append(Diagnostic("unknown-motion", f"verb {u.verb!r} in {u.source_recipe}"))

    for dish in sorted(foon.recipe_index):
        if dish not in dish_classes:
            out.append(Diagnostic("unknown-dish-class", f"dish type {dish!r}"))

    members = set(foon.units)
    for u in foon.units:
        for o in u.outputs:
            if u not in foon.producers.get(o.key, ()):
                out.append(Diagnostic("index-inconsistency", f"{o} not indexed for its producer"))
    for key, prods in foon.producers.items():
        for p in prods:
            if p not in members:
                out.append(Diagnostic("index-inconsistency", f"producer of {key[0]} absent from unit set"))
            elif key not in {o.key for o in p.outputs}:
                out.append(Diagnostic("index-inconsistency", f"unit indexed under {key[0]} does not output it"))
    return out
