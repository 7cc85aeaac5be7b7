"""Plain-text ``.foon`` subgraph documents and JSON export.

Document layout::

    @recipe_id: <id>
    @dish_type: <label>

    O<TAB>tomato
    S<TAB>whole
    M<TAB>slice
    O<TAB>tomato
    S<TAB>sliced
    //

A unit block is one or more input object blocks, exactly one ``M`` line,
one or more output object blocks and a closing ``//``. An object block is
an ``O`` line, at least one ``S`` line and at most one ``I`` line listing
contained ingredients separated by commas. Lines starting with ``#`` are
comments. Fields are separated by a single tab; spaces are rejected.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ParseError
from .graph import FunctionalUnit, MotionNode, ObjectNode, Subgraph, UniversalFOON, default_goal, merge

JSON_VERSION = 1
HEADER_KEYS = ("recipe_id", "dish_type")


class _ObjectBuilder:
    def __init__(self, name: str, line: int):
        self.name = name
        self.line = line
        self.states: list[str] = []
        self.ingredients: list[str] | None = None

    def build(self) -> ObjectNode:
        if not self.states:
            raise ParseError(f"object {self.name!r} has no S line", self.line)
        return ObjectNode(self.name, tuple(self.states), tuple(self.ingredients or ()))


def _field(line: str, lineno: int, tag: str) -> str:
    if len(line) < 2 or line[1] != "\t":
        raise ParseError(f"expected TAB after {tag!r}", lineno, 2)
    value = line[2:]
    if "\t" in value:
        raise ParseError("unexpected extra TAB", lineno, 3 + value.index("\t"))
    value = " ".join(value.strip().lower().split())
    if not value:
        raise ParseError(f"empty {tag} field", lineno, 3)
    return value


def parse_subgraph(text: str | bytes, source: str | None = None) -> Subgraph:
    """Parse one ``.foon`` document; every failure is a located ``ParseError``."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            line = bytes(text)[: exc.start].count(b"\n") + 1
            raise ParseError("input is not valid UTF-8", line, 1, source) from None
    try:
        return _parse(text.replace("\r\n", "\n").replace("\r", "\n"))
    except ParseError as exc:
        if source and exc.source is None:
            raise ParseError(exc.message, exc.line, exc.column, source) from None
        raise


def _parse(text: str) -> Subgraph:
    header: dict[str, str] = {}
    units: list[FunctionalUnit] = []
    lines = text.split("\n")
    in_header = True

    inputs: list[ObjectNode] = []
    outputs: list[ObjectNode] = []
    motion: str | None = None
    current: _ObjectBuilder | None = None
    unit_start = 0

    def close_object():
        nonlocal current
        if current is not None:
            node = current.build()
            (outputs if motion is not None else inputs).append(node)
            current = None

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if line.startswith("#"):
            continue
        if in_header:
            if line.startswith("@"):
                key, sep, value = line[1:].partition(":")
                key = key.strip()
                if not sep or key not in HEADER_KEYS:
                    raise ParseError(f"bad header line {line!r}", lineno)
                if key in header:
                    raise ParseError(f"duplicate header key {key!r}", lineno)
                value = value.strip()
                if not value:
                    raise ParseError(f"empty value for {key!r}", lineno, len(key) + 3)
                header[key] = value
                continue
            if line.strip() == "":
                missing = [k for k in HEADER_KEYS if k not in header]
                if missing:
                    raise ParseError(f"missing header key(s): {', '.join(missing)}", lineno)
                in_header = False
                continue
            missing = [k for k in HEADER_KEYS if k not in header]
            if missing:
                raise ParseError(f"missing header key(s): {', '.join(missing)}", lineno)
            raise ParseError("header must be followed by a blank line", lineno)

        if line.strip() == "":
            continue
        tag = line[0]
        if line == "//":
            close_object()
            if not inputs and motion is None:
                raise ParseError("empty unit", lineno)
            if motion is None:
                raise ParseError("unit has no M line", lineno)
            if not outputs:
                raise ParseError("unit has no output objects", lineno)
            try:
                units.append(FunctionalUnit(tuple(inputs), MotionNode(motion), tuple(outputs), header["recipe_id"]))
            except ValueError as exc:
                raise ParseError(str(exc), unit_start or lineno) from None
            inputs, outputs, motion, unit_start = [], [], None, 0
            continue
        if tag == "O":
            close_object()
            if not unit_start:
                unit_start = lineno
            current = _ObjectBuilder(_field(line, lineno, "O"), lineno)
        elif tag == "S":
            if current is None:
                raise ParseError("S line outside an object block", lineno)
            if current.ingredients is not None:
                raise ParseError("S line after I line", lineno)
            current.states.append(_field(line, lineno, "S"))
        elif tag == "I":
            if current is None:
                raise ParseError("I line outside an object block", lineno)
            if current.ingredients is not None:
                raise ParseError("second I line in object block", lineno)
            if not current.states:
                raise ParseError("I line before any S line", lineno)
            names = [" ".join(p.strip().lower().split()) for p in _field(line, lineno, "I").split(",")]
            if any(not n for n in names):
                raise ParseError("empty ingredient name", lineno, 3)
            current.ingredients = names
        elif tag == "M":
            if motion is not None:
                raise ParseError("second M line in unit", lineno)
            if current is None and not inputs:
                raise ParseError("motion line before any object line", lineno)
            close_object()
            motion = _field(line, lineno, "M")
        else:
            raise ParseError(f"unrecognised line {line[:20]!r}", lineno)

    if in_header:
        missing = [k for k in HEADER_KEYS if k not in header]
        if missing:
            raise ParseError(f"missing header key(s): {', '.join(missing)}", len(lines))
        raise ParseError("document has no body", len(lines))
    if current is not None or inputs or motion is not None:
        raise ParseError("unterminated unit (missing //)", len(lines))
    if not units:
        raise ParseError("document contains no units", len(lines))
    try:
        return Subgraph(header["recipe_id"], header["dish_type"], tuple(units), default_goal(units[-1]))
    except ValueError as exc:
        raise ParseError(str(exc), 1) from None


def _object_lines(node: ObjectNode) -> list[str]:
    out = [f"O\t{node.name}"]
    out += [f"S\t{s}" for s in sorted(node.states)]
    if node.ingredients:
        out.append("I\t" + ", ".join(sorted(node.ingredients)))
    return out


def serialize_subgraph(sg: Subgraph) -> str:
    """Deterministic text: states, ingredients, inputs and outputs in sorted order."""
    lines = [f"@recipe_id: {sg.recipe_id}", f"@dish_type: {sg.dish_type}", ""]
    for unit in sg.units:
        for node in sorted(unit.inputs):
            lines += _object_lines(node)
        lines.append(f"M\t{unit.verb}")
        for node in sorted(unit.outputs):
            lines += _object_lines(node)
        lines.append("//")
    return "\n".join(lines) + "\n"


def load_corpus(directory: str | Path) -> list[Subgraph]:
    """Parse every ``*.foon`` file in a directory, in file-name order."""
    directory = Path(directory)
    out = []
    for path in sorted(directory.glob("*.foon")):
        out.append(parse_subgraph(path.read_bytes(), source=path.name))
    return out


# -- JSON ------------------------------------------------------------------


def node_to_dict(node: ObjectNode) -> dict:
    return {"name": node.name, "states": sorted(node.states), "ingredients": sorted(node.ingredients)}


def node_from_dict(d: dict) -> ObjectNode:
    return ObjectNode(d["name"], tuple(d.get("states", ())), tuple(d.get("ingredients", ())))


def unit_to_dict(unit: FunctionalUnit) -> dict:
    return {
        "inputs": [node_to_dict(n) for n in sorted(unit.inputs)],
        "motion": unit.verb,
        "outputs": [node_to_dict(n) for n in sorted(unit.outputs)],
        "source_recipe": unit.source_recipe,
    }


def unit_from_dict(d: dict) -> FunctionalUnit:
    return FunctionalUnit(
        tuple(node_from_dict(n) for n in d["inputs"]),
        MotionNode(d["motion"]),
        tuple(node_from_dict(n) for n in d["outputs"]),
        d.get("source_recipe", ""),
    )


def foon_to_dict(foon: UniversalFOON) -> dict:
    out = {"version": JSON_VERSION, "units": [unit_to_dict(u) for u in foon.units]}
    if foon.subgraphs:
        out["recipes"] = [
            {"recipe_id": sg.recipe_id, "dish_type": sg.dish_type, "units": [unit_to_dict(u) for u in sg.units]}
            for sg in foon.subgraphs.values()
        ]
    return out


def tree_to_dict(tree) -> dict:
    return {
        "version": JSON_VERSION,
        "kind": "task_tree",
        "goal": node_to_dict(tree.goal),
        "units": [
            {**unit_to_dict(u), "origin": p.origin, "step": i + 1}
            for i, (u, p) in enumerate(zip(tree.units, tree.provenance))
        ],
    }


def export_json(obj, indent: int | None = None) -> str:
    """JSON for a ``UniversalFOON`` or a ``TaskTree``; unit order is preserved."""
    if isinstance(obj, UniversalFOON):
        data = foon_to_dict(obj)
    else:
        data = tree_to_dict(obj)
    return json.dumps(data, indent=indent, ensure_ascii=False, separators=None if indent else (",", ":"))


def import_foon_json(text: str) -> UniversalFOON:
    data = json.loads(text)
    if data.get("version") != JSON_VERSION:
        raise ValueError(f"unsupported FOON JSON version {data.get('version')!r}")
    subgraphs = [
        Subgraph.from_units(r["recipe_id"], r["dish_type"], [unit_from_dict(u) for u in r["units"]])
        for r in data.get("recipes", ())
    ]
    return merge(subgraphs, extra_units=[unit_from_dict(u) for u in data["units"]])


def import_tree_json(text: str):
    from .retrieval import Provenance, TaskTree

    data = json.loads(text)
    if data.get("version") != JSON_VERSION or data.get("kind") != "task_tree":
        raise ValueError("not a task-tree JSON document")
    units = [unit_from_dict(u) for u in data["units"]]
    prov = [Provenance(u.get("source_recipe", ""), u.get("origin", "retrieved")) for u in data["units"]]
    return TaskTree(units, node_from_dict(data["goal"]), prov)
