from __future__ import annotations

import io
import json
import shutil
import subprocess
import sys

import pytest

from foonplan.cli import chain_timings, corpus_stats, linear_fit, main, read_kitchen
from foonplan.errors import FoonError
from foonplan.foontext import load_corpus, tree_to_dict
from foonplan.graph import ObjectNode
from foonplan.pipeline import CORPUS_DIR, PlanRequest, parse_ingredient

GREEK = ["lettuce", "tomato", "cucumber", "olive", "feta cheese", "pineapple"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def plan_json(capsys, *argv):
    code, out, err = run(capsys, "plan", "--format", "json", *argv)
    return code, json.loads(out), err


class TestPlan:
    def test_dump_config(self, capsys):
        code, out, _ = run(capsys, "plan", "--dump-config")
        cfg = json.loads(out)
        assert code == 0
        assert cfg["tau"] == 0.9 and cfg["top_k"] == 5
        assert cfg["corpus"] == str(CORPUS_DIR)

    def test_dump_config_overrides(self, capsys, monkeypatch, tmp_path):
        monkeypatch.setenv("FOON_CORPUS", str(tmp_path))
        cfg = json.loads(run(capsys, "plan", "--dump-config", "--tau", "0.8", "--top-k", "3")[1])
        assert (cfg["tau"], cfg["top_k"], cfg["corpus"]) == (0.8, 3, str(tmp_path))

    def test_bad_tau(self, capsys):
        code, _, err = run(capsys, "plan", "--dump-config", "--tau", "1.5")
        assert code == 1 and "tau" in err

    def test_exact_recipe_matches_library(self, capsys, planner):
        names = ["lettuce", "tomato", "cucumber", "olive", "feta cheese"]
        code, data, _ = plan_json(capsys, "--dish", "salad", *names)
        assert code == 0
        res = planner.plan(PlanRequest(tuple(parse_ingredient(n) for n in names), "salad"))
        assert data["recipe_id"] == "greek_salad" == res.recipe_id
        assert data["tree"] == tree_to_dict(res.tree)
        assert data["errors"] == [] and data["warnings"] == []

    def test_unseen_ingredient_matches_library(self, capsys, planner):
        code, data, _ = plan_json(capsys, "--dish", "salad", *GREEK)
        res = planner.plan(PlanRequest(tuple(parse_ingredient(n) for n in GREEK), "salad"))
        assert code == 0
        assert data["tree"] == tree_to_dict(res.tree)
        assert any(p["ingredient"] == "pineapple" for p in data["progress"]["lines"])

    def test_unplaceable_is_partial(self, capsys):
        code, out, err = run(capsys, "plan", "--dish", "salad", "lettuce", "xqzzy")
        assert code == 2
        assert "UnplaceableIngredient" in err and "xqzzy" in err
        assert out.startswith("reference recipe:")

    def test_unknown_dish_is_fatal(self, capsys):
        code, out, err = run(capsys, "plan", "--dish", "pizza", "tomato")
        assert code == 1 and out == ""
        assert "pizza" in err

    def test_missing_arguments(self, capsys):
        assert run(capsys, "plan", "tomato")[0] == 1
        assert run(capsys, "plan", "--dish", "salad")[0] == 1
        assert run(capsys, "plan", "--dish", "salad", "nut", "--override", "nut")[0] == 1

    def test_missing_corpus_path(self, capsys, tmp_path):
        code, _, err = run(capsys, "plan", "--dish", "salad", "tomato", "--corpus", str(tmp_path / "nope"))
        assert code == 1 and "corpus" in err

    def test_override_selects_candidate(self, capsys):
        args = ["--dish", "salad", "mango", "banana", "pistachio:shelled"]
        _, default, _ = plan_json(capsys, *args)
        _, chosen, _ = plan_json(capsys, *args, "--override", "pistachio=peanut")
        verbs = lambda d: {u["motion"] for u in d["tree"]["units"]}
        assert "crush" in verbs(chosen) and "crush" not in verbs(default)

    def test_interactive_matches_batch(self, capsys, monkeypatch):
        args = ["--dish", "salad", "mango", "banana", "pistachio"]
        batch = run(capsys, "plan", *args, "--override", "pistachio=peanut")
        monkeypatch.setattr(sys, "stdin", io.StringIO("peanut\n"))
        code, out, err = run(capsys, "plan", *args, "--interactive")
        assert (code, out) == batch[:2]
        assert "'pistachio' is not in the corpus" in err

    def test_interactive_numbered_choice(self, capsys, monkeypatch, planner):
        args = ["--dish", "salad", "mango", "banana", "pistachio"]
        first = planner.candidates("pistachio")[0][0]
        batch = run(capsys, "plan", *args, "--override", f"pistachio={first}")
        monkeypatch.setattr(sys, "stdin", io.StringIO("\n"))
        assert run(capsys, "plan", *args, "--interactive")[:2] == batch[:2]

    @pytest.mark.parametrize("fmt", ["text", "dot", "json"])
    def test_formats_and_out_file(self, capsys, tmp_path, fmt):
        target = tmp_path / f"plan.{fmt}"
        code, out, _ = run(capsys, "plan", "--dish", "drinks", "lemon", "water", "sugar", "--format", fmt, "--out", str(target))
        assert code == 0 and out == ""
        text = target.read_text(encoding="utf-8")
        if fmt == "dot":
            pydot = pytest.importorskip("pydot")
            assert pydot.graph_from_dot_data(text)
        elif fmt == "json":
            assert json.loads(text)["recipe_id"] == "lemonade"
        else:
            assert "lemon\n" in text

    def test_kitchen_file(self, capsys, tmp_path, planner):
        sg = planner.foon.subgraphs["greek_salad"]
        kitchen = tmp_path / "kitchen.txt"
        rows = sorted(f"{n.name}:{n.states[0]}" for n in sg.starting_items() if not n.is_utensil and len(n.states) == 1)
        kitchen.write_text("# pantry\n" + "\n".join(rows) + "\n", encoding="utf-8")
        names = sorted(sg.goal.ingredients)
        code, data, _ = plan_json(capsys, "--dish", "salad", *names, "--kitchen", str(kitchen))
        assert code == 0 and data["recipe_id"] == "greek_salad"

    def test_kitchen_missing_item_is_fatal(self, capsys, tmp_path):
        kitchen = tmp_path / "kitchen.txt"
        kitchen.write_text("lettuce:whole\ntomato:whole\n", encoding="utf-8")
        code, out, err = run(capsys, "plan", "--dish", "salad", "lettuce", "tomato", "--kitchen", str(kitchen))
        assert code == 1 and out == ""
        assert "neither in the kitchen nor producible" in err

    def test_read_kitchen(self, tmp_path):
        p = tmp_path / "k.txt"
        p.write_text("Tomato : Whole\n# x\n", encoding="utf-8")
        assert read_kitchen(p) == {ObjectNode("tomato", ("whole",))}
        p.write_text("tomato\n", encoding="utf-8")
        with pytest.raises(FoonError, match=":1:"):
            read_kitchen(p)


class TestValidate:
    def test_bundled_corpus_clean(self, capsys):
        code, out, _ = run(capsys, "validate")
        assert code == 0
        assert out.strip() == "27 files, 0 problems"

    def test_malformed_file(self, capsys, tmp_path):
        shutil.copy(CORPUS_DIR / "greek_salad.foon", tmp_path)
        (tmp_path / "broken.foon").write_text("# recipe: broken\n# dish: salad\n//\nO tomato\n", encoding="utf-8")
        code, out, _ = run(capsys, "validate", "--corpus", str(tmp_path))
        assert code == 1
        assert "broken.foon:" in out
        assert out.strip().endswith("2 files, 1 problems")

    def test_empty_directory(self, capsys, tmp_path):
        assert run(capsys, "validate", "--corpus", str(tmp_path)) == (0, "0 files\n", "")

    def test_not_a_directory(self, capsys, tmp_path):
        assert run(capsys, "validate", "--corpus", str(tmp_path / "nope"))[0] == 1


class TestStats:
    def test_empty_directory(self, capsys, tmp_path):
        code, out, _ = run(capsys, "stats", "--json", "--corpus", str(tmp_path))
        stats = json.loads(out)
        assert code == 0
        assert stats["subgraphs"] == stats["units_after_dedup"] == stats["ingredient_vocabulary"] == 0
        assert stats["dish_classes"] == {}

    def test_bundled_corpus_matches_scan(self, capsys):
        stats = json.loads(run(capsys, "stats", "--json")[1])
        subgraphs = load_corpus(CORPUS_DIR)
        distinct = {u for sg in subgraphs for u in sg.units}
        assert stats["subgraphs"] == len(list(CORPUS_DIR.glob("*.foon"))) == 27
        assert stats["units_before_dedup"] == sum(len(sg.units) for sg in subgraphs) == 143
        assert stats["units_after_dedup"] == len(distinct) == 115
        assert stats["distinct_motions"] == len({u.verb for u in distinct}) == 29
        assert stats["distinct_objects"] == len({n for u in distinct for n in (*u.inputs, *u.outputs)}) == 191
        assert stats["ingredient_vocabulary"] == 55
        assert sum(stats["dish_classes"].values()) == 27

    def test_text_output(self, capsys):
        code, out, _ = run(capsys, "stats")
        assert code == 0 and "units_after_dedup: 115" in out and "salad=7" in out

    def test_duplicated_directory_keeps_dedup_count(self, tmp_path):
        shutil.copytree(CORPUS_DIR, tmp_path / "a")
        for path in CORPUS_DIR.glob("*.foon"):
            shutil.copy(path, tmp_path / "a" / f"copy_{path.name}")
        assert corpus_stats(tmp_path / "a")["units_after_dedup"] == 115


class TestMerge:
    def test_round_trip(self, capsys, tmp_path, planner):
        from foonplan.foontext import import_foon_json

        code, out, _ = run(capsys, "merge", "--pretty")
        assert code == 0
        foon = import_foon_json(out)
        assert set(foon.units) == set(planner.foon.units)

    def test_two_directories(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        a.mkdir()
        b.mkdir()
        files = sorted(CORPUS_DIR.glob("*.foon"))
        for p in files[:5]:
            shutil.copy(p, a)
        for p in files[3:8]:
            shutil.copy(p, b)
        out_file = tmp_path / "m.json"
        assert run(capsys, "merge", str(a), str(b), "--out", str(out_file))[0] == 0
        data = json.loads(out_file.read_text(encoding="utf-8"))
        assert len(data["recipes"]) == 8


class TestBench:
    def test_small_suite(self, capsys, tmp_path):
        q = tmp_path / "q.tsv"
        q.write_text("drinks\tlemon, water, sugar\nsalad\tlettuce, tomato\n", encoding="utf-8")
        code, out, _ = run(capsys, "bench", "--queries", str(q), "--repetitions", "1")
        assert code == 0
        rows = out.splitlines()
        assert rows[0] == "query\tdish\tms\tn"
        assert rows[1].startswith("1\tdrinks\t") and rows[2].startswith("2\tsalad\t")
        assert rows[-2].startswith("mean_ms: ")

    def test_empty_suite(self, capsys, tmp_path):
        q = tmp_path / "q.tsv"
        q.write_text("# nothing\n", encoding="utf-8")
        assert run(capsys, "bench", "--queries", str(q))[0] == 1

    def test_chain_timings_cover_sizes(self):
        pts = chain_timings([5, 10], repetitions=1)
        assert [n for n, _ in pts] == [5, 10]
        assert all(t > 0 for _, t in pts)

    def test_linear_fit(self):
        slope, intercept, r2 = linear_fit([1, 2, 3, 4], [3, 5, 7, 9])
        assert slope == pytest.approx(2) and intercept == pytest.approx(1) and r2 == pytest.approx(1)


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "foonplan.cli", "plan", "--dump-config"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["top_k"] == 5
