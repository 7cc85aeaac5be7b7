"""Per-ingredient progress lines and their text, DOT and JSON views."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

from .graph import ObjectNode

FORMATS = ("text", "dot", "json")


@dataclass(frozen=True)
class Step:
    before: tuple[str, ...]
    verb: str
    after: tuple[str, ...]
    unit: int  # zero-based index into the tree's units


@dataclass(frozen=True)
class ProgressLine:
    ingredient: str
    steps: tuple[Step, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def unit_indices(self) -> list[int]:
        return [s.unit for s in self.steps]


def _carrier(nodes, name: str) -> ObjectNode | None:
    """The node standing for ``name``: itself if present, else the first composite holding it."""
    own = sorted(n for n in nodes if n.name == name and not n.ingredients)
    if own:
        return own[0]
    holders = sorted(n for n in nodes if name in n.ingredients)
    return holders[0] if holders else None


def compute_progress_lines(tree) -> dict[str, ProgressLine]:
    lines: dict[str, ProgressLine] = {}
    for name in sorted(tree.ingredient_names()):
        steps = []
        for i, u in enumerate(tree.units):
            before = _carrier(u.inputs, name)
            after = _carrier(u.outputs, name)
            if before is None and after is None:
                continue
            steps.append(
                Step(
                    tuple(sorted(before.states)) if before else (),
                    u.verb,
                    tuple(sorted(after.states)) if after else (),
                    i,
                )
            )
        lines[name] = ProgressLine(name, tuple(steps))
    return lines


# -- rendering ---------------------------------------------------------------


def _states(states: tuple[str, ...]) -> str:
    return ", ".join(states) if states else "-"


def render_text(lines: Mapping[str, ProgressLine]) -> str:
    blocks = []
    for name in sorted(lines):
        rows = [name]
        for k, s in enumerate(lines[name].steps, start=1):
            rows.append(f"  {k}. [{_states(s.before)}] --{s.verb}--> [{_states(s.after)}]  (step {s.unit + 1})")
        blocks.append("\n".join(rows))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_dot(lines: Mapping[str, ProgressLine]) -> str:
    """Objects in black, states in green, motion labels in red."""
    out = ["digraph progress {", "  rankdir=LR;"]
    for a, name in enumerate(sorted(lines)):
        line = lines[name]
        obj = f"obj{a}"
        out.append(f"  {obj} [label={_q(name)}, shape=box, color=black, fontcolor=black];")
        prev = obj
        for b, s in enumerate(line.steps):
            if b == 0:
                first = f"s{a}_0"
                out.append(f"  {first} [label={_q(_states(s.before))}, color=green, fontcolor=green];")
                out.append(f"  {prev} -> {first} [color=black];")
                prev = first
            node = f"s{a}_{b + 1}"
            out.append(f"  {node} [label={_q(_states(s.after))}, color=green, fontcolor=green];")
            out.append(f"  {prev} -> {node} [label={_q(s.verb)}, color=red, fontcolor=red];")
            prev = node
    out.append("}")
    return "\n".join(out) + "\n"


def lines_to_dict(lines: Mapping[str, ProgressLine]) -> dict:
    return {
        "version": 1,
        "lines": [
            {
                "ingredient": name,
                "steps": [
                    {"before": list(s.before), "motion": s.verb, "after": list(s.after), "unit": s.unit}
                    for s in lines[name].steps
                ],
            }
            for name in sorted(lines)
        ],
    }


def lines_from_dict(data: dict) -> dict[str, ProgressLine]:
    out = {}
    for entry in data["lines"]:
        steps = tuple(
            Step(tuple(s["before"]), s["motion"], tuple(s["after"]), int(s["unit"])) for s in entry["steps"]
        )
        out[entry["ingredient"]] = ProgressLine(entry["ingredient"], steps)
    return out


def render_json(lines: Mapping[str, ProgressLine]) -> str:
    return json.dumps(lines_to_dict(lines), indent=2, ensure_ascii=False) + "\n"


def parse_json(text: str) -> dict[str, ProgressLine]:
    return lines_from_dict(json.loads(text))


def render(obj, fmt: str = "text") -> str:
    """Render a mapping of progress lines, or a task tree's lines, in ``fmt``."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    lines = obj if isinstance(obj, Mapping) else compute_progress_lines(obj)
    return {"text": render_text, "dot": render_dot, "json": render_json}[fmt](lines)
