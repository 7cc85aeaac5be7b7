from __future__ import annotations

import pytest

from conftest import TOMATO_KITCHEN, toy_store
from foonplan.graph import ObjectNode
from foonplan.progress import (
    ProgressLine,
    Step,
    compute_progress_lines,
    parse_json,
    render,
    render_dot,
    render_json,
    render_text,
)
from foonplan.retrieval import PlanRequest, TaskTree, retrieve_task_tree

pydot = pytest.importorskip("pydot")


@pytest.fixture(scope="module")
def tomato_tree(tomato_foon):
    store = toy_store(tomato=[1.0, 0.0])
    return retrieve_task_tree(ObjectNode("tomato", ("sliced", "in bowl")), ["tomato"], TOMATO_KITCHEN, tomato_foon, store)


def test_empty_tree():
    assert compute_progress_lines(TaskTree([], ObjectNode("x", ("y",)))) == {}


def test_tomato_line(tomato_tree):
    lines = compute_progress_lines(tomato_tree)
    assert list(lines) == ["tomato"]
    assert lines["tomato"].steps == (
        Step(("whole",), "pick-and-place", ("on cutting board",), 0),
        Step(("on cutting board",), "slice", ("sliced",), 1),
        Step(("sliced",), "pour", ("in bowl", "sliced"), 2),
    )


def test_single_ingredient_line_is_lossless(tomato_tree):
    line = compute_progress_lines(tomato_tree)["tomato"]
    assert [tomato_tree.units[i] for i in line.unit_indices()] == tomato_tree.units
    # consecutive steps chain their states
    for a, b in zip(line.steps, line.steps[1:]):
        assert a.after == b.before


def test_lines_cover_corpus_trees(planner):
    for rid, sg in planner.foon.subgraphs.items():
        kitchen = planner.base_kitchen() | set(sg.starting_items())
        tree = retrieve_task_tree(sg.goal, sg.goal.ingredients, kitchen, planner.foon, planner.store)
        lines = compute_progress_lines(tree)
        assert set(lines) == tree.ingredient_names(), rid
        assert all(len(line) > 0 for line in lines.values()), rid
        touching = [u for u in tree.units if any(not n.is_utensil for n in (*u.inputs, *u.outputs))]
        assert sum(len(line) for line in lines.values()) >= len(touching), rid
        for line in lines.values():
            assert line.unit_indices() == sorted(line.unit_indices())


def test_mixture_membership_counts(planner):
    sg = planner.foon.subgraphs["greek_salad"]
    kitchen = planner.base_kitchen() | set(sg.starting_items())
    tree = retrieve_task_tree(sg.goal, sg.goal.ingredients, kitchen, planner.foon, planner.store)
    line = compute_progress_lines(tree)["cucumber"]
    assert [s.verb for s in line.steps] == ["slice", "pour", "mix"]
    assert line.steps[-1].after == ("mixed",)


class TestRender:
    def test_empty_text(self):
        assert render({}, "text") == ""

    def test_text(self, tomato_tree):
        text = render(tomato_tree, "text")
        assert text == (
            "tomato\n"
            "  1. [whole] --pick-and-place--> [on cutting board]  (step 1)\n"
            "  2. [on cutting board] --slice--> [sliced]  (step 2)\n"
            "  3. [sliced] --pour--> [in bowl, sliced]  (step 3)\n"
        )

    def test_text_one_block_per_ingredient(self, planner):
        lines = {n: ProgressLine(n, (Step(("a",), "mix", ("b",), 0),)) for n in ["b", "a"]}
        assert render_text(lines).split("\n\n")[0].startswith("a\n")
        assert render_text(lines).count("\n\n") == 1

    def test_dot_parses_with_red_motions(self, tomato_tree):
        dot = render(tomato_tree, "dot")
        (graph,) = pydot.graph_from_dot_data(dot)
        motion_edges = [e for e in graph.get_edges() if e.get("color") == "red"]
        assert len(motion_edges) == 3
        assert [e.get("label").strip('"') for e in motion_edges] == ["pick-and-place", "slice", "pour"]
        assert all(e.get("fontcolor") == "red" for e in motion_edges)
        colors = {n.get_name(): n.get("color") for n in graph.get_nodes() if n.get("color")}
        assert colors["obj0"] == "black"
        assert {c for k, c in colors.items() if k.startswith("s")} == {"green"}

    def test_dot_escapes_quotes(self):
        lines = {'odd "name"': ProgressLine('odd "name"', (Step((), "mix", ("x",), 0),))}
        (graph,) = pydot.graph_from_dot_data(render_dot(lines))
        assert graph.get_node("obj0")

    def test_json_round_trip(self, planner):
        res = planner.plan(PlanRequest((("mango", "whole"), ("pineapple", "whole")), "salad"))
        assert parse_json(render_json(res.lines)) == res.lines

    def test_deterministic(self, tomato_tree):
        assert render(tomato_tree, "json") == render(tomato_tree, "json")

    def test_unknown_format(self, tomato_tree):
        with pytest.raises(ValueError):
            render(tomato_tree, "svg")
