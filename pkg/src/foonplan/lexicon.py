"""State taxonomy, motion lexicon and dish-class attachment rules.

All three ship as editable INI files under ``foonplan/data``. Verb-to-state
usage counts are not configured; they are counted from a merged FOON.
"""

from __future__ import annotations

import configparser
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from .errors import ConfigError, NoVerbError
from .graph import UniversalFOON

DATA_DIR = Path(str(resources.files("foonplan") / "data"))
TAXONOMY_PATH = DATA_DIR / "taxonomy.ini"
MOTIONS_PATH = DATA_DIR / "motions.ini"
DISHES_PATH = DATA_DIR / "dishes.ini"


def _read_ini(path: str | Path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    parser.optionxform = str
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parser


def _split(value: str) -> list[str]:
    return [" ".join(v.strip().lower().split()) for v in value.split(",") if v.strip()]


@dataclass(frozen=True)
class StateTaxonomy:
    categories: Mapping[str, frozenset[str]]
    _owner: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for label, states in self.categories.items():
            for s in states:
                if s in self._owner:
                    raise ConfigError(f"state {s!r} listed under both {self._owner[s]!r} and {label!r}")
                self._owner[s] = label

    def category(self, state: str) -> str | None:
        return self._owner.get(state)

    def states_in(self, label: str) -> frozenset[str]:
        return self.categories.get(label, frozenset())


def load_taxonomy(path: str | Path = TAXONOMY_PATH) -> StateTaxonomy:
    parser = _read_ini(path)
    if not parser.has_section("categories"):
        raise ConfigError(f"{path}: missing [categories] section")
    cats = {label.strip().lower(): frozenset(_split(v)) for label, v in parser.items("categories")}
    if len(cats) != 12:
        raise ConfigError(f"{path}: expected 12 categories, found {len(cats)}")
    return StateTaxonomy(cats)


def state_category(tax: StateTaxonomy, state: str) -> str | None:
    return tax.category(state)


@dataclass(frozen=True)
class MotionEntry:
    accepts_new_inputs: bool
    associated_states: Mapping[str, int]


@dataclass(frozen=True)
class MotionLexicon:
    entries: Mapping[str, MotionEntry]

    def __contains__(self, verb: str) -> bool:
        return verb in self.entries

    def accepts_new_inputs(self, verb: str) -> bool:
        entry = self.entries.get(verb)
        return bool(entry and entry.accepts_new_inputs)

    def states_for(self, verb: str) -> Mapping[str, int]:
        entry = self.entries.get(verb)
        return entry.associated_states if entry else {}


def load_motion_flags(path: str | Path = MOTIONS_PATH) -> dict[str, bool]:
    parser = _read_ini(path)
    if not parser.has_section("motions"):
        raise ConfigError(f"{path}: missing [motions] section")
    flags = {}
    for verb, value in parser.items("motions"):
        value = value.strip().lower()
        if value not in ("yes", "no"):
            raise ConfigError(f"{path}: verb {verb!r} must be 'yes' or 'no', got {value!r}")
        flags[verb.strip().lower()] = value == "yes"
    return flags


def new_states(unit) -> list[tuple[str, str]]:
    """(output name, state) pairs the unit introduces.

    A state is new when the same-named input did not already carry it.
    """
    before: dict[str, set[str]] = defaultdict(set)
    for n in unit.inputs:
        before[n.name].update(n.states)
    out = []
    for o in unit.outputs:
        for s in o.states:
            if s not in before.get(o.name, ()):
                out.append((o.name, s))
    return out


def count_verb_states(foon: UniversalFOON) -> dict[str, Counter]:
    counts: dict[str, Counter] = defaultdict(Counter)
    for u in foon.units:
        for _, s in new_states(u):
            counts[u.verb][s] += 1
    return counts


def build_motion_lexicon(foon: UniversalFOON, flags: Mapping[str, bool] | None = None) -> MotionLexicon:
    flags = load_motion_flags() if flags is None else flags
    counts = count_verb_states(foon)
    entries = {}
    for verb in sorted(set(flags) | set(counts)):
        entries[verb] = MotionEntry(flags.get(verb, False), dict(counts.get(verb, {})))
    return MotionLexicon(entries)


def verb_for_state(lex: MotionLexicon, state: str, tax: StateTaxonomy | None = None) -> str:
    """Most frequent verb producing ``state``; category-level counts as fallback."""
    exact = Counter({verb: e.associated_states.get(state, 0) for verb, e in lex.entries.items()})
    exact = +exact
    if not exact and tax is not None:
        label = tax.category(state)
        if label is not None:
            members = tax.states_in(label)
            for verb, e in lex.entries.items():
                n = sum(c for s, c in e.associated_states.items() if s in members)
                if n:
                    exact[verb] = n
    if not exact:
        raise NoVerbError(f"no motion verb known for state {state!r}")
    return min(exact, key=lambda v: (-exact[v], v))


@dataclass(frozen=True)
class DishRules:
    classes: tuple[str, ...]
    attach: Mapping[str, frozenset[str]]

    def verbs_for(self, dish_type: str) -> frozenset[str]:
        return self.attach.get(dish_type, frozenset())

    def check(self, lex: MotionLexicon) -> list[str]:
        """Verbs listed as attachment points that do not accept new inputs."""
        bad = []
        for dish, verbs in sorted(self.attach.items()):
            for v in sorted(verbs):
                if not lex.accepts_new_inputs(v):
                    bad.append(f"{dish}: {v}")
        return bad


def load_dish_rules(path: str | Path = DISHES_PATH) -> DishRules:
    parser = _read_ini(path)
    if not parser.has_option("classes", "names"):
        raise ConfigError(f"{path}: missing [classes] names")
    classes = tuple(_split(parser.get("classes", "names")))
    attach = {}
    if parser.has_section("attach"):
        for dish, verbs in parser.items("attach"):
            dish = dish.strip().lower()
            if dish not in classes:
                raise ConfigError(f"{path}: attachment rule for unknown dish class {dish!r}")
            attach[dish] = frozenset(_split(verbs))
    return DishRules(classes, attach)
