from __future__ import annotations

from collections import Counter

import pytest

from foonplan.errors import NoAttachmentPoint, NotFound, PruneConflict, UnconvertibleState, UnplaceableIngredient
from foonplan.graph import FunctionalUnit, ObjectNode
from foonplan.modification import (
    CaseLabel,
    _standalone_line,
    attachment_index,
    classify_case,
    graft_state_branch,
    integrate_missing_ingredient,
    modify_task_tree,
    prune_extra_ingredients,
    select_state_for_new_ingredient,
    substitute_object,
)
from foonplan.progress import compute_progress_lines
from foonplan.retrieval import PlanRequest, TaskTree, retrieve_task_tree

N = ObjectNode
C1, C2, C3, C4, NIT = CaseLabel.CASE1, CaseLabel.CASE2, CaseLabel.CASE3, CaseLabel.CASE4, CaseLabel.NOT_IN_TREE


def U(ins, verb, outs, recipe="t"):
    return FunctionalUnit(tuple(ins), verb, tuple(outs), recipe)


def reference(planner, recipe_id: str) -> TaskTree:
    sg = planner.foon.subgraphs[recipe_id]
    kitchen = planner.base_kitchen() | set(sg.starting_items())
    return retrieve_task_tree(sg.goal, sg.goal.ingredients, kitchen, planner.foon, planner.store)


def names_everywhere(tree: TaskTree) -> Counter:
    c = Counter()
    for u in tree.units:
        for n in (*u.inputs, *u.outputs):
            c[n.name] += 1
            c.update(n.ingredients)
    return c


def modify(planner, ref, req, **kw):
    return modify_task_tree(ref, req, planner.foon, planner.store, planner.lex, planner.tax, planner.rules, **kw)


def integrate(planner, tree, given, dish, **kw):
    return integrate_missing_ingredient(
        tree, given, dish, planner.foon, planner.store, planner.lex, planner.rules, planner.cfg, planner.tax, **kw
    )


class TestTableRows:
    def test_row1_same_object_same_state(self, planner):
        case, leaf = classify_case(("carrot", "sliced"), reference(planner, "chicken_salad"), planner.store)
        assert case is C1 and leaf == N("carrot", ("sliced",))

    def test_row2_equivalent_object_same_state(self, planner):
        case, leaf = classify_case(("chili pepper", "chopped"), reference(planner, "mexican_salad"), planner.store)
        assert case is C2 and leaf == N("jalapeño", ("chopped",))

    def test_row3_same_object_other_state(self, planner):
        case, leaf = classify_case(("tomato", "whole"), reference(planner, "tomato_soup"), planner.store)
        assert case is C3 and leaf == N("tomato", ("diced",))

    def test_row4_equivalent_object_other_state(self, planner):
        case, leaf = classify_case(("onion", "peeled"), reference(planner, "mushroom_soup"), planner.store)
        assert case is C4 and leaf == N("shallot", ("minced",))

    def test_row2_action_substitutes(self, planner):
        ref = reference(planner, "mexican_salad")
        out = substitute_object(ref, N("jalapeño", ("chopped",)), "chili pepper")
        assert names_everywhere(out)["jalapeño"] == 0
        assert names_everywhere(out)["chili pepper"] == names_everywhere(ref)["jalapeño"]
        assert len(out) == len(ref) and out.problems() == []

    def test_row3_action_adds_dice_unit(self, planner):
        ref = reference(planner, "tomato_soup")
        out = graft_state_branch(ref, N("tomato", ("diced",)), "whole", planner.foon, planner.store,
                                 planner.cfg, planner.lex, planner.tax)
        assert len(out) == len(ref) + 1
        first = out.units[0]
        assert first.verb == "dice"
        assert N("tomato", ("whole",)) in first.inputs and N("tomato", ("diced",)) in first.outputs
        assert N("tomato", ("whole",)) in out.leaves() and N("tomato", ("diced",)) not in out.leaves()
        assert out.problems() == []

    def test_row4_action_substitutes_then_grafts(self, planner):
        ref = reference(planner, "mushroom_soup")
        req = PlanRequest(
            (("water", "liquid"), ("mushroom", "whole"), ("butter", "solid"), ("onion", "peeled"),
             ("cream", "liquid"), ("salt", "ground")),
            "soup",
        )
        res = modify(planner, ref, req)
        assert res.cases["onion"] is C4 and not res.errors
        tree = res.tree
        assert names_everywhere(tree)["shallot"] == 0
        assert N("onion", ("peeled",)) in tree.leaves()
        (graft,) = [u for u in tree.units if N("onion", ("peeled",)) in u.inputs]
        assert graft.verb == "mince" and N("onion", ("minced",)) in graft.outputs
        assert tree.problems() == []


class TestClassify:
    @pytest.fixture
    def tree(self):
        mix = N("bowl", ("contains",), ("cucumber", "tomato"))
        return TaskTree(
            [U([N("cucumber", ("sliced",)), N("tomato", ("diced",)), N("bowl", ("empty",))], "pour", [mix])], mix
        )

    @pytest.mark.parametrize(
        "given, case",
        [
            (("tomato", "diced"), C1),
            (("tomato", "whole"), C3),
            (("zucchini", "sliced"), C2),
            (("zucchini", "whole"), C4),
            (("salt", "ground"), NIT),
            (("xqzzy", "whole"), NIT),
            (("tomato", None), C1),
        ],
    )
    def test_cases(self, planner, tree, given, case):
        assert classify_case(given, tree, planner.store)[0] is case

    def test_exact_name_beats_equivalent(self, planner):
        # cucumber exists as a whole leaf and zucchini as a sliced leaf
        mix = N("bowl", ("contains",), ("cucumber", "zucchini"))
        tree = TaskTree(
            [U([N("cucumber", ("whole",)), N("zucchini", ("sliced",)), N("bowl", ("empty",))], "pour", [mix])], mix
        )
        case, leaf = classify_case(("cucumber", "sliced"), tree, planner.store)
        assert case is C3 and leaf.name == "cucumber"

    def test_utensils_are_not_candidates(self, planner, tree):
        assert classify_case(("bowl", "empty"), tree, planner.store)[0] is NIT


class TestSubstitute:
    def test_single_leaf(self):
        tree = TaskTree([U([N("carrot", ("whole",))], "slice", [N("carrot", ("sliced",))])], N("carrot", ("sliced",)))
        out = substitute_object(tree, N("carrot", ("whole",)), "parsnip")
        assert [str(u) for u in out.units] == ["parsnip {whole} --slice--> parsnip {sliced}"]
        assert out.goal == N("parsnip", ("sliced",))

    def test_missing_leaf(self, planner):
        with pytest.raises(NotFound):
            substitute_object(reference(planner, "greek_salad"), N("kiwi", ("whole",)), "apple")

    def test_keep_original_copies_chain(self, planner):
        ref = reference(planner, "fruit_salad")
        mango = N("mango", ("whole",))
        chain, merge_at, _ = _standalone_line(ref, mango)
        assert len(chain) == 2  # peel, dice
        out = substitute_object(ref, mango, "pineapple", keep_original=True)
        assert len(out) == len(ref) + len(chain)
        lines = compute_progress_lines(out)
        assert "mango" in lines and "pineapple" in lines
        assert {"mango", "pineapple"} <= set(out.goal.ingredients)
        assert out.problems() == []

    def test_keep_original_jalapeno(self, planner):
        ref = reference(planner, "mexican_salad")
        leaf = N("jalapeño", ("chopped",))
        chain, _, _ = _standalone_line(ref, leaf)
        out = substitute_object(ref, leaf, "chili pepper", keep_original=True)
        assert len(out) == len(ref) + len(chain)
        lines = compute_progress_lines(out)
        assert lines["jalapeño"].steps and lines["chili pepper"].steps


class TestGraft:
    def test_same_state_is_noop(self, planner):
        ref = reference(planner, "tomato_soup")
        out = graft_state_branch(ref, N("tomato", ("diced",)), "diced", planner.foon, planner.store)
        assert out.same_as(ref)

    def test_irreversible_state(self, planner):
        mix = N("bowl", ("contains",), ("cheese",))
        tree = TaskTree([U([N("cheese", ("diced",)), N("bowl", ("empty",))], "pour", [mix])], mix)
        with pytest.raises(UnconvertibleState) as info:
            graft_state_branch(tree, N("cheese", ("diced",)), "melted", planner.foon, planner.store,
                               planner.cfg, planner.lex, planner.tax)
        assert info.value.ingredient == "cheese"

    def test_prefix_trimmed_when_start_is_midway(self, planner):
        ref = reference(planner, "fruit_salad")
        out = graft_state_branch(ref, N("mango", ("whole",)), "peeled", planner.foon, planner.store,
                                 planner.cfg, planner.lex, planner.tax)
        assert len(out) == len(ref) - 1
        assert N("mango", ("peeled",)) in out.leaves()
        assert out.problems() == []


class TestSelectState:
    def test_chicken_in_salads(self, planner):
        counts = Counter()
        for sg in planner.foon.subgraphs.values():
            if sg.dish_type != "salad":
                continue
            nodes = {n for u in sg.units for n in (*u.inputs, *u.outputs) if n.name == "chicken" and not n.ingredients}
            for n in nodes:
                counts.update(n.states)
        assert counts == {"raw": 1, "fried": 2, "baked": 1}
        assert select_state_for_new_ingredient("chicken", "salad", planner.foon, planner.tax) == "fried"

    def test_tie_is_lexicographic(self, planner):
        # tomato appears diced twice and whole twice across salads
        assert select_state_for_new_ingredient("tomato", "salad", planner.foon, planner.tax) == "diced"

    def test_single_state(self, planner):
        assert select_state_for_new_ingredient("honey", "salad", planner.foon, planner.tax) == "liquid"

    def test_falls_back_to_whole_corpus(self, planner):
        assert select_state_for_new_ingredient("walnut", "salad", planner.foon, planner.tax) == "chopped"

    def test_unknown_name(self, planner):
        assert select_state_for_new_ingredient("xqzzy", "salad", planner.foon, planner.tax) is None


class TestIntegrate:
    def test_pineapple_salad_attaches_at_mix(self, planner):
        ref = reference(planner, "greek_salad")
        out = integrate(planner, ref, ("pineapple", "whole"), "salad")
        host = next(u for u in out.units if any("pineapple" in n.ingredients for n in u.outputs))
        assert host.verb == "mix"
        assert any(n.name == "pineapple" and not n.ingredients for n in host.inputs)
        assert "pineapple" in out.goal.ingredients
        assert out.problems() == []

    def test_pineapple_drink_attaches_at_pour(self, planner):
        ref = reference(planner, "orange_juice")
        out = integrate(planner, ref, ("pineapple", "whole"), "drinks")
        hosts = [u for u in out.units if any("pineapple" in n.ingredients for n in u.outputs)]
        first = min(hosts, key=out.units.index)
        assert first.verb == "pour"
        assert out.problems() == []

    def test_known_leaf_in_target_state_adds_one_edge(self, planner):
        ref = reference(planner, "fruit_salad")
        state = select_state_for_new_ingredient("olive", "salad", planner.foon, planner.tax)
        out = integrate(planner, ref, ("olive", state), "salad")
        assert len(out) == len(ref)
        idx = attachment_index(ref, "salad", planner.rules)
        assert set(out.units[idx].inputs) - set(ref.units[idx].inputs) == {N("olive", (state,))}

    def test_copied_chain_provenance(self, planner):
        out = integrate(planner, reference(planner, "fruit_salad"), ("pistachio", "shelled"), "salad")
        origins = [p.origin for u, p in zip(out.units, out.provenance) if "pistachio" in {n.name for n in u.inputs}]
        assert "copied" in origins

    def test_unplaceable(self, planner):
        with pytest.raises(UnplaceableIngredient):
            integrate(planner, reference(planner, "greek_salad"), ("xqzzy", "whole"), "salad")

    def test_no_attachment_point(self, planner, tomato_foon):
        goal = N("tomato", ("sliced", "in bowl"))
        tree = TaskTree(list(tomato_foon.subgraphs["tomato_chain"].units), goal)
        with pytest.raises(NoAttachmentPoint):
            integrate(planner, tree, ("onion", "peeled"), "salad")


class TestPrune:
    def test_nothing_extra(self, planner):
        ref = reference(planner, "greek_salad")
        out, conflicts = prune_extra_ingredients(ref, ref.ingredient_names())
        assert out.same_as(ref) and conflicts == []

    def test_drop_onion_from_greek_salad(self, planner):
        ref = reference(planner, "greek_salad")
        keep = ref.ingredient_names() - {"onion"}
        out, conflicts = prune_extra_ingredients(ref, keep)
        assert conflicts == []
        onion_units = [u for u in ref.units if any(n.name == "onion" and not n.ingredients for n in u.inputs)
                       and not any(n.ingredients for n in u.outputs)]
        assert len(out) == len(ref) - len(onion_units)
        assert all("onion" not in n.ingredients for u in out.units for n in (*u.inputs, *u.outputs))
        assert "onion" not in out.goal.ingredients
        assert out.ingredient_names() == keep
        assert out.problems() == []

    def test_shared_unit_kept(self):
        c_w, p_w = N("carrot", ("whole",)), N("potato", ("whole",))
        c_p, p_p = N("carrot", ("peeled",)), N("potato", ("peeled",))
        p_d = N("potato", ("diced",))
        pot = N("pot", ("contains",), ("carrot", "potato"))
        tree = TaskTree(
            [
                U([c_w, p_w, N("peeler", ("clean",))], "peel", [c_p, p_p]),
                U([p_p, N("knife", ("clean",))], "dice", [p_d]),
                U([c_p, p_d, N("pot", ("empty",))], "add", [pot]),
            ],
            pot,
        )
        out, conflicts = prune_extra_ingredients(tree, {"carrot"})
        assert conflicts == []
        assert [u.verb for u in out.units] == ["peel", "add"]
        assert out.units[0].inputs == (c_w, N("peeler", ("clean",)))
        assert out.goal == N("pot", ("contains",), ("carrot",))

    def test_conflict_keeps_tree(self):
        tree = TaskTree([U([N("tomato", ("whole",))], "slice", [N("tomato", ("sliced",))])], N("tomato", ("sliced",)))
        out, conflicts = prune_extra_ingredients(tree, {"cucumber"})
        assert out.same_as(tree)
        assert len(conflicts) == 1 and isinstance(conflicts[0], PruneConflict)


class TestModify:
    def test_exact_request_is_identity(self, planner):
        ref = reference(planner, "greek_salad")
        req = PlanRequest(tuple((n.name, n.states[0]) for n in ref.ingredient_leaves()), "salad")
        res = modify(planner, ref, req)
        assert set(res.cases.values()) == {C1}
        assert res.tree.same_as(ref) and not res.errors and not res.warnings

    def test_greek_salad_lines_cover_request(self, planner):
        req = PlanRequest((("cucumber", "whole"), ("tomato", "whole"), ("feta", "block"), ("spinach", "whole")), "salad")
        res = planner.plan(req)
        assert not res.errors
        assert set(req.names) <= set(res.lines)
        assert res.tree.ingredient_names() == set(req.names)

    def test_override_uses_peanut_chain(self, planner):
        ref = reference(planner, "fruit_salad")
        req = PlanRequest((("mango", "whole"), ("apple", "whole"), ("banana", "whole"), ("honey", "liquid"),
                           ("pistachio", "shelled")), "salad")
        default = modify(planner, ref, req)
        chosen = modify(planner, ref, req, overrides={"pistachio": "peanut"})

        def prep(tree):
            return [u.verb for u in tree.units if N("pistachio", ("shelled",)) in u.inputs]

        assert prep(default.tree) == ["chop"]  # cashew's preparation, the top-1 candidate
        assert prep(chosen.tree) == ["crush"]  # peanut's preparation in the thai salad
        assert chosen.tree.problems() == []

    def test_chooser_only_for_unknown_names(self, planner):
        asked = []

        def chooser(name, candidates):
            asked.append((name, [c for c, _ in candidates]))
            return candidates[3][0]

        ref = reference(planner, "fruit_salad")
        req = PlanRequest((("mango", "whole"), ("apple", "whole"), ("pistachio", "shelled"), ("walnut", "shelled")),
                          "salad")
        res = modify(planner, ref, req, chooser=chooser)
        assert [a[0] for a in asked] == ["pistachio"]
        assert asked[0][1][3] == "peanut"
        assert not res.errors

    def test_errors_are_collected(self, planner):
        ref = reference(planner, "greek_salad")
        req = PlanRequest((("cucumber", "whole"), ("tomato", "whole"), ("xqzzy", "whole")), "salad")
        res = modify(planner, ref, req)
        assert [type(e) for e in res.errors] == [UnplaceableIngredient]
        assert res.errors[0].ingredient == "xqzzy"
        assert res.tree.ingredient_names() == {"cucumber", "tomato"}
        assert res.tree.problems() == []

    def test_irreversible_state_is_a_warning(self, planner):
        ref = reference(planner, "cheese_omelette")
        leaf = next(n for n in ref.ingredient_leaves() if n.name == "cheese")
        req = PlanRequest((("egg", "whole"), ("cheese", "melted")), "omelette")
        res = modify(planner, ref, req)
        assert res.cases["cheese"] is C3 and leaf.states != ("melted",)
        assert not res.errors
        assert [type(w) for w in res.warnings] == [UnconvertibleState]

    @pytest.mark.parametrize(
        "dish, items",
        [
            ("salad", [("mango", "whole"), ("apple", "whole"), ("pineapple", "whole")]),
            ("soup", [("mushroom", "whole"), ("onion", "peeled"), ("water", "liquid")]),
            ("drinks", [("orange", "whole"), ("pineapple", "whole")]),
            ("salad", [("avocado", "whole"), ("chili pepper", "chopped"), ("jalapeño", "chopped")]),
        ],
    )
    def test_idempotent(self, planner, dish, items):
        req = PlanRequest(tuple(items), dish)
        first = planner.plan(req)
        again = modify(planner, first.tree, req)
        assert again.tree.same_as(first.tree)
