from __future__ import annotations

import json

import pytest

from odlgraph.cli import main

from conftest import MERGESORT_COURSE
from dotread import parse_dot

GRAPH_COURSE = """\
# tiny course
NODE LA1|Intro|read|ch1||5
NODE LA2|Exercises|exerc|sheet1||30
NODE LA3|Summary|read|ch1-summary||
NODE Dict|Dictionary|read|dict|ref|
EDGE LA1|LA2|sequence|
EDGE LA2|LA3|sequence|
EDGE LA2|LA1|failure|if the exercises were too hard
"""

LOG = """\
learner_id,timestamp,activity_id
u1,0,LA1
u1,60,LA2
u1,120,Dict
u1,180,LA2
u1,240,LA3
u2,0,LA1
u2,10,LA3
u2,9000,LA3
"""


@pytest.fixture
def course(tmp_path):
    path = tmp_path / "course.odlg"
    path.write_text(GRAPH_COURSE, encoding="utf-8")
    return str(path)


@pytest.fixture
def log(tmp_path):
    path = tmp_path / "access.csv"
    path.write_text(LOG, encoding="utf-8")
    return str(path)


def test_validate_ok(course, capsys):
    assert main(["validate", course]) == 0
    assert capsys.readouterr().out.strip() == "OK"


def test_validate_broken_course_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.odlg"
    bad.write_text("NODE A|a|read|a||\nEDGE A|B|sequence|\n", encoding="utf-8")
    assert main(["validate", str(bad)]) == 1
    assert "error" in capsys.readouterr().err


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err


def test_parse_tabular_to_dot(tmp_path, capsys):
    src = tmp_path / "course.odlc"
    src.write_text(MERGESORT_COURSE, encoding="utf-8")
    assert main(["parse", str(src), "--to", "dot"]) == 0
    nodes, edges = parse_dot(capsys.readouterr().out)
    assert len(nodes) == 20 and len(edges) == 19


def test_parse_graph_to_tabular_reports_unsupported(course, capsys):
    assert main(["parse", course, "--to", "odlc"]) == 1
    assert "error" in capsys.readouterr().err


def test_sessions_listing(course, log, capsys):
    assert main(["sessions", "--log", log, "--course", course, "--timeout", "1800"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == [
        "u1\t1\t0\t240\t5\tLA1,LA2,Dict,LA2,LA3",
        "u2\t1\t0\t10\t2\tLA1,LA3",
        "u2\t2\t9000\t9000\t1\tLA3",
    ]


def test_cycles_listing_and_min_interior(course, log, capsys):
    assert main(["cycles", "--log", log, "--course", course, "--timeout", "1800"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == [
        "u1\tLA2\t1\t3\treference_detour\tDict",
        "u2\tLA3\t1\t2\treference_detour\t",
    ]
    assert main(["cycles", "--log", log, "--course", course, "--min-interior", "1"]) == 0
    assert capsys.readouterr().out.splitlines() == ["u1\tLA2\t1\t3\treference_detour\tDict"]


def test_cycles_strict_fails_on_teleport(course, log, capsys):
    assert main(["cycles", "--log", log, "--course", course, "--strict"]) == 1
    assert "no connection" in capsys.readouterr().err


def test_erase_lists_strategy_paths(course, log, capsys):
    assert main(["erase", "--log", log, "--course", course]) == 0
    assert capsys.readouterr().out.splitlines() == [
        "u1\tLA1,LA2,LA3",
        "u2\tLA1,LA3",
    ]


def test_coverage_per_learner_and_overall(course, log, capsys):
    assert main(["coverage", "--log", log, "--course", course]) == 0
    assert capsys.readouterr().out.splitlines() == [
        "u1\t4\t4\t1.0000",
        "u2\t2\t4\t0.5000",
        "*\t4\t4\t1.0000",
    ]


def test_mine_components_and_cliques(course, log, capsys):
    assert main(["mine", "--log", log, "--course", course, "--min-count", "1"]) == 0
    component_out = capsys.readouterr().out
    assert component_out == "component\t1\tDict,LA1,LA2,LA3\n"
    assert main(["mine", "--log", log, "--course", course, "--min-count", "2", "--cliques"]) == 0
    assert capsys.readouterr().out == "clique\t2\tLA1,LA3\n"


def test_mine_on_strategy_paths_drops_detour_nodes(course, log, capsys):
    assert main(["mine", "--log", log, "--course", course, "--min-count", "1", "--on-strategy-paths"]) == 0
    out = capsys.readouterr().out
    assert "Dict" not in out


def test_export_visit_order_for_one_learner(course, log, capsys):
    assert main(
        ["export", "--course", course, "--log", log, "--experience", "u1", "--overlay", "visit_order"]
    ) == 0
    nodes, _ = parse_dot(capsys.readouterr().out)
    assert nodes["LA1"]["label"] == "LA1 (1)"
    assert nodes["LA2"]["label"] == "LA2 (2)"
    assert nodes["Dict"]["label"] == "Dict (3)"
    assert nodes["LA3"]["label"] == "LA3 (4)"


def test_export_needs_experience_inputs(course, capsys):
    assert main(["export", "--course", course, "--overlay", "visit_order"]) == 2
    assert "usage error" in capsys.readouterr().err


def test_export_clusters_overlay(course, log, tmp_path, capsys):
    cluster_file = tmp_path / "clusters.tsv"
    assert main(
        ["mine", "--log", log, "--course", course, "--min-count", "2", "--cliques", "-o", str(cluster_file)]
    ) == 0
    assert main(
        ["export", "--course", course, "--overlay", "clusters", "--clusters", str(cluster_file)]
    ) == 0
    nodes, _ = parse_dot(capsys.readouterr().out)
    assert nodes["LA1"].get("fillcolor") == nodes["LA3"].get("fillcolor") is not None


def test_timeout_env_var_and_flag_priority(course, log, capsys, monkeypatch):
    monkeypatch.setenv("ODL_TIMEOUT", "50")
    assert main(["sessions", "--log", log, "--course", course]) == 0
    with_env = capsys.readouterr().out.splitlines()
    assert len([l for l in with_env if l.startswith("u1")]) == 5  # every u1 gap is 60 > 50
    assert main(["sessions", "--log", log, "--course", course, "--timeout", "1800"]) == 0
    with_flag = capsys.readouterr().out.splitlines()
    assert len([l for l in with_flag if l.startswith("u1")]) == 1

    monkeypatch.setenv("ODL_TIMEOUT", "soon")
    assert main(["sessions", "--log", log, "--course", course]) == 2


def test_skip_unknown_warns_and_continues(course, tmp_path, capsys):
    log_path = tmp_path / "noisy.csv"
    log_path.write_text("u1,0,LA1\nu1,5,GHOST\nu1,9,LA2\n", encoding="utf-8")
    assert main(["sessions", "--log", str(log_path), "--course", course]) == 1
    capsys.readouterr()
    assert main(["sessions", "--log", str(log_path), "--course", course, "--skip-unknown"]) == 0
    captured = capsys.readouterr()
    assert "GHOST" in captured.err
    assert "u1\t1\t0\t9\t2\tLA1,LA2" in captured.out


def test_notes_workflow(course, tmp_path, capsys):
    store = str(tmp_path / "notes.jsonl")
    assert main(
        ["notes", "add", "--store", store, "--course", course, "--node", "LA2",
         "--learner", "u1", "--timestamp", "100", "--access", "all",
         "--body", "Here is the list of adjectives asked for", "--attach", "file://adjectives.txt"]
    ) == 0
    note_id = capsys.readouterr().out.strip()
    assert note_id == "n1"

    assert main(
        ["notes", "list", "--store", store, "--course", course, "--node", "LA2", "--requester", "u2"]
    ) == 0
    assert "Here is the list of adjectives" in capsys.readouterr().out

    assert main(
        ["notes", "send", "--store", store, "--course", course, "--sender", "u1",
         "--to", "*", "--refs", "n1", "--sent-at", "120"]
    ) == 0
    message_id = capsys.readouterr().out.strip()
    assert message_id == "m1"

    assert main(["notes", "inbox", "--store", store, "--course", course, "--user", "u2"]) == 0
    inbox_line = capsys.readouterr().out.strip()
    assert inbox_line == "m1\t120\tu1\t*\tn1"

    records = [json.loads(l) for l in open(store, encoding="utf-8")]
    assert [r["kind"] for r in records] == ["note", "message"]


def test_notes_private_note_hidden_and_unsendable(course, tmp_path, capsys):
    store = str(tmp_path / "notes.jsonl")
    main(["notes", "add", "--store", store, "--course", course, "--node", "LA1",
          "--learner", "u1", "--access", "private", "--body", "secret"])
    capsys.readouterr()
    assert main(["notes", "list", "--store", store, "--course", course,
                 "--node", "LA1", "--requester", "u2", "--role", "tutor"]) == 0
    assert capsys.readouterr().out == ""
    assert main(["notes", "send", "--store", store, "--course", course, "--sender", "u2",
                 "--to", "*", "--refs", "n1"]) == 1
    assert "may not reference" in capsys.readouterr().err


def test_output_to_file(course, log, tmp_path):
    out = tmp_path / "sessions.tsv"
    assert main(["sessions", "--log", log, "--course", course, "--timeout", "1800", "-o", str(out)]) == 0
    assert out.read_text(encoding="utf-8").startswith("u1\t1\t0\t240\t5")
