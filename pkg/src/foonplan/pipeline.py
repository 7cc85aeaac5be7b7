"""End-to-end planning: reference goal, retrieval, modification."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ModificationError, UnknownDishClass
from .foontext import load_corpus
from .graph import ObjectNode, UniversalFOON, merge
from .lexicon import (
    DISHES_PATH,
    MOTIONS_PATH,
    TAXONOMY_PATH,
    DATA_DIR,
    DishRules,
    MotionLexicon,
    StateTaxonomy,
    build_motion_lexicon,
    load_dish_rules,
    load_motion_flags,
    load_taxonomy,
)
from .modification import Chooser, modify_task_tree
from .progress import ProgressLine, compute_progress_lines
from .retrieval import PlanRequest, TaskTree, find_reference_goal, retrieve_task_tree
from .semantics import (
    EquivalenceMap,
    SimilarityConfig,
    SimilarityIndex,
    VectorStore,
    build_equivalence_map,
    load_vectors,
)

CORPUS_DIR = DATA_DIR / "corpus"
VECTORS_PATH = DATA_DIR / "vectors.txt"
QUERIES_PATH = DATA_DIR / "queries.tsv"


@dataclass
class PlanResult:
    request: PlanRequest
    recipe_id: str
    reference: TaskTree
    tree: TaskTree
    errors: list[ModificationError] = field(default_factory=list)
    warnings: list[ModificationError] = field(default_factory=list)
    cases: dict = field(default_factory=dict)

    @property
    def lines(self) -> dict[str, ProgressLine]:
        return compute_progress_lines(self.tree)


@dataclass
class Planner:
    foon: UniversalFOON
    store: VectorStore
    lex: MotionLexicon
    tax: StateTaxonomy
    rules: DishRules
    cfg: SimilarityConfig = field(default_factory=SimilarityConfig)
    kitchen: frozenset[ObjectNode] | None = None

    def __post_init__(self):
        self._index: SimilarityIndex | None = None
        self._default_kitchen = self.foon.default_kitchen()

    @classmethod
    def load(
        cls,
        corpus_dir: str | Path = CORPUS_DIR,
        vectors_path: str | Path = VECTORS_PATH,
        taxonomy_path: str | Path = TAXONOMY_PATH,
        motions_path: str | Path = MOTIONS_PATH,
        dish_rules_path: str | Path = DISHES_PATH,
        cfg: SimilarityConfig | None = None,
    ) -> Planner:
        foon = merge(load_corpus(corpus_dir))
        return cls(
            foon,
            load_vectors(vectors_path),
            build_motion_lexicon(foon, load_motion_flags(motions_path)),
            load_taxonomy(taxonomy_path),
            load_dish_rules(dish_rules_path),
            cfg or SimilarityConfig(),
        )

    @property
    def index(self) -> SimilarityIndex:
        if self._index is None:
            self._index = SimilarityIndex(self.store, self.foon.ingredient_names())
        return self._index

    def equivalence_map(self, unseen: Iterable[str]) -> EquivalenceMap:
        return build_equivalence_map(self.store, unseen, (), self.cfg, index=self.index)

    def candidates(self, name: str) -> list[tuple[str, float]]:
        return self.index.top_k(name, self.cfg.top_k)

    def base_kitchen(self) -> frozenset[ObjectNode]:
        if self.kitchen is None:
            return self._default_kitchen
        return frozenset(self.kitchen) | self.foon.utensil_nodes()

    def plan(
        self,
        req: PlanRequest,
        overrides: Mapping[str, str] | None = None,
        chooser: Chooser | None = None,
    ) -> PlanResult:
        if req.dish_type not in self.rules.classes:
            raise UnknownDishClass(f"unknown dish class {req.dish_type!r}")
        goal, recipe_id = find_reference_goal(req, self.foon, self.store, self.cfg)
        base = self.base_kitchen()
        own = self.foon.subgraphs[recipe_id].starting_items() if self.kitchen is None else ()
        items = base | frozenset(own) | frozenset(req.nodes())
        reference = retrieve_task_tree(goal, req.names, items, self.foon, self.store, self.cfg)
        mod = modify_task_tree(
            reference,
            req,
            self.foon,
            self.store,
            self.lex,
            self.tax,
            self.rules,
            self.cfg,
            overrides=overrides,
            chooser=chooser,
            index=self.index,
            kitchen=base if self.kitchen is not None else None,
        )
        return PlanResult(req, recipe_id, reference, mod.tree, mod.errors, mod.warnings, mod.cases)


def parse_ingredient(token: str) -> tuple[str, str | None]:
    """``name`` or ``name:state``."""
    name, _, state = token.partition(":")
    name = name.strip()
    if not name:
        raise ValueError(f"bad ingredient {token!r}")
    return name, (state.strip() or None)


def parse_queries(text: str) -> list[PlanRequest]:
    """``dish<TAB>name[:state], name[:state], ...`` per line; ``#`` starts a comment."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<dish>\\t<ingredients>'")
        items = [parse_ingredient(t) for t in parts[1].split(",") if t.strip()]
        try:
            out.append(PlanRequest(tuple(items), parts[0]))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return out
