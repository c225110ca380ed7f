import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from sekg.cli import main

GOLDEN = Path(__file__).parent / "golden"

EMPTY_SCENARIO = """\
SCENARIO 1 type=hollow
NODE attacker1 Attacker scenario=1
NODE victim1 AttackTarget scenario=1
"""


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.mark.parametrize(
    "golden, argv",
    [
        ("load.txt", ["load"]),
        ("validate.txt", ["validate"]),
        ("infer_trace.txt", ["infer", "--trace"]),
        ("stats_table.txt", ["stats", "--relation", "performed_through", "--end", "dst", "--top", "3"]),
        ("stats.csv", ["stats", "--relation", "performed_through", "--end", "dst", "--top", "3", "--format", "csv"]),
        ("stats.json", ["stats", "--relation", "performed_through", "--end", "dst", "--top", "3", "--format", "json"]),
        ("threats_victim7.txt", ["threats", "--victim", "victim7"]),
        ("threats_victim7.json", ["threats", "--victim", "victim7", "--format", "json"]),
        ("targets_attacker10.txt", ["targets", "--attacker", "attacker10"]),
        ("paths_10_13.txt", ["paths", "--from", "attacker10", "--to", "victim13"]),
        ("paths_10_13.json", ["paths", "--from", "attacker10", "--to", "victim13", "--format", "json"]),
        ("same_origin.json", ["same-origin"]),
        (
            "query_company_a.tsv",
            ["query", 'MATCH (v:Victim {affiliation="Company A"}) RETURN v, v.scenario_id'],
        ),
        ("export_scenario9.dot", ["export", "--scenario", "9"]),
        ("eval.json", ["eval"]),
    ],
)
def test_golden_outputs(capsys, golden, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 0
    assert err == ""
    assert out == (GOLDEN / golden).read_text(encoding="utf-8")


def test_repeated_runs_identical(capsys):
    first = run_cli(capsys, "eval")
    second = run_cli(capsys, "eval")
    assert first == second


def test_subprocess_determinism_across_hash_seeds(tmp_path):
    outs = []
    for seed in ("0", "4242"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        proc = subprocess.run(
            [sys.executable, "-m", "sekg.cli", "export"],
            capture_output=True,
            env=env,
            check=True,
        )
        outs.append(proc.stdout)
    assert outs[0] == outs[1]


def test_missing_file_exit_code(capsys):
    code, out, err = run_cli(capsys, "load", "no_such_file.sekg")
    assert code == 1
    assert out == ""
    assert "file not found" in err
    assert "no_such_file.sekg" in err


def test_dataset_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.sekg"
    bad.write_text("NODE a Attacker\n", encoding="utf-8")
    code, out, err = run_cli(capsys, "load", str(bad))
    assert code == 1
    assert "line 1" in err


def test_strict_vocab_flag(tmp_path, capsys):
    loose = tmp_path / "loose.sekg"
    loose.write_text("NODE wizardry HumanVulnerability\n", encoding="utf-8")
    code, out, _ = run_cli(capsys, "load", str(loose))
    assert code == 0
    assert "warnings: 1" in out
    code, _, err = run_cli(capsys, "load", "--strict-vocab", str(loose))
    assert code == 1
    assert "not a catalog term" in err


def test_validate_exit_one_on_mandatory_findings(tmp_path, capsys):
    hollow = tmp_path / "hollow.sekg"
    hollow.write_text(EMPTY_SCENARIO, encoding="utf-8")
    code, out, _ = run_cli(capsys, "validate", str(hollow))
    assert code == 1
    assert "mandatory" in out


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as err:
        main(["stats"])  # --relation is required
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["no-such-command"])
    assert err.value.code == 2
    capsys.readouterr()


def test_query_parse_error_exit_one(capsys):
    code, out, err = run_cli(capsys, "query", "MATCH (a RETURN a")
    assert code == 1
    assert "at offset 9" in err


def test_query_stdin(capsys, monkeypatch):
    monkeypatch.setattr(
        sys, "stdin", io.StringIO("MATCH (a)-[:attack]->(v) RETURN a, v")
    )
    code, out, _ = run_cli(capsys, "query")
    assert code == 0
    assert out.splitlines()[0] == "a\tv"
    assert len(out.splitlines()) == 16


def test_query_json_format(capsys):
    code, out, _ = run_cli(
        capsys,
        "query",
        "--format",
        "json",
        'MATCH (v:Victim {affiliation="Company A"}) RETURN v',
    )
    assert code == 0
    assert json.loads(out) == [{"v": "victim10"}, {"v": "victim15"}]


def test_threats_empty_json(capsys):
    code, out, _ = run_cli(capsys, "threats", "--victim", "victim11", "--format", "json")
    assert code == 0
    assert json.loads(out) == []


def test_output_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = run_cli(capsys, "same-origin", "--output", str(target))
    assert code == 0
    assert out == ""
    assert target.read_text(encoding="utf-8") == (GOLDEN / "same_origin.json").read_text(
        encoding="utf-8"
    )


def test_no_infer_flag(capsys):
    code, out, _ = run_cli(capsys, "query", "--no-infer", "MATCH (a)-[:attack]->(v) RETURN a")
    assert code == 0
    assert out.splitlines() == ["a"]


def test_export_sekg_roundtrip_stable(tmp_path, capsys):
    code, once, _ = run_cli(capsys, "export", "--format", "sekg")
    assert code == 0
    path = tmp_path / "dump.sekg"
    path.write_text(once, encoding="utf-8")
    code, twice, _ = run_cli(capsys, "export", "--format", "sekg", str(path))
    assert code == 0
    assert once == twice


def test_export_dot_structure(capsys):
    code, out, _ = run_cli(capsys, "export")
    assert code == 0
    assert out.startswith("// node fill palette by concept:")
    assert "digraph sekg {" in out
    assert out.rstrip().endswith("}")
    # inferred attack edges render dashed and red
    assert (
        '"attacker10" -> "victim10" [label="attack", color="#d00000", style=dashed];'
        in out
    )
    # asserted red-set edges render red but solid
    assert (
        '"phishing10" -> "victim10" [label="apply_to", color="#d00000"];' in out
    )
    # off-set relations stay grey
    assert 'color="#555555"' in out


def test_export_dot_goal_cluster(capsys):
    _, out, _ = run_cli(capsys, "export", "--scenario", "9")
    assert "subgraph cluster_goal_tree_9 {" in out
    assert '"remote_access_foothold9"' in out
    assert '"network_fault9"' in out


def test_export_dot_empty_graph(tmp_path, capsys):
    empty = tmp_path / "empty.sekg"
    empty.write_text("# nothing here\n", encoding="utf-8")
    code, out, _ = run_cli(capsys, "export", str(empty))
    assert code == 0
    assert "digraph sekg {" in out
    assert out.rstrip().endswith("}")


def test_quoted_node_ids_escaped():
    from sekg.cli import export_dot
    from sekg.graph import KnowledgeGraph, Node

    g = KnowledgeGraph()
    g.add_node(Node('weird"id', "Attacker"))
    out = export_dot(g)
    assert '"weird\\"id"' in out
