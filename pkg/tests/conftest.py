from __future__ import annotations

import numpy as np
import pytest

from foonplan.foontext import parse_subgraph
from foonplan.graph import ObjectNode, merge
from foonplan.pipeline import Planner
from foonplan.semantics import VectorStore

TOMATO_DOC = """\
@recipe_id: tomato_chain
@dish_type: salad

O\ttomato
S\twhole
O\tcutting board
S\tempty
M\tpick-and-place
O\ttomato
S\ton cutting board
//
O\ttomato
S\ton cutting board
O\tknife
S\tclean
M\tslice
O\ttomato
S\tsliced
//
O\ttomato
S\tsliced
O\tbowl
S\tempty
M\tpour
O\ttomato
S\tsliced
S\tin bowl
//
"""

TOMATO_KITCHEN = frozenset(
    {
        ObjectNode("tomato", ("whole",)),
        ObjectNode("knife", ("clean",)),
        ObjectNode("cutting board", ("empty",)),
        ObjectNode("bowl", ("empty",)),
    }
)


def toy_store(**vectors) -> VectorStore:
    arrs = {k.replace("_", " "): np.asarray(v, dtype=float) for k, v in vectors.items()}
    dims = len(next(iter(arrs.values())))
    return VectorStore(dims, arrs)


@pytest.fixture(scope="session")
def planner() -> Planner:
    return Planner.load()


@pytest.fixture(scope="session")
def tomato_foon():
    return merge([parse_subgraph(TOMATO_DOC)])


# -- acceptance reporting -------------------------------------------------------

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion."""

    def _report(name: str, passed: bool, detail: str = "") -> bool:
        _ACCEPTANCE.append((name, bool(passed), detail))
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        mark = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{mark}] {name}" + (f": {detail}" if detail else ""))
