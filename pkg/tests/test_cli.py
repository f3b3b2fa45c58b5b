import json
import os
from pathlib import Path

import pytest

from crosskit.cli import build_parser, main
from crosskit.graph import complete_graph, random_graph, serialize_graph

GOLDEN = Path(__file__).parent / "golden" / "help.txt"
COMMANDS = ["estimate", "draw", "exact", "cutnorm", "regularity", "sylvester", "cdbounds", "recupper", "probe"]


def all_help():
    os.environ["COLUMNS"] = "80"
    p = build_parser()
    parts = [p.format_help()]
    sub = next(a for a in p._actions if a.dest == "command")
    for c in COMMANDS:
        parts.append(sub.choices[c].format_help())
    return "\n".join(parts)


def test_help_matches_golden(monkeypatch):
    monkeypatch.setenv("COLUMNS", "80")
    text = all_help()
    if os.environ.get("CROSSKIT_REGEN_GOLDEN"):
        GOLDEN.write_text(text)
    assert text == GOLDEN.read_text()


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def k5(tmp_path):
    f = tmp_path / "k5.txt"
    f.write_text(serialize_graph(complete_graph(5)))
    return str(f)


def test_exact_k5(capsys, k5):
    code, out, _ = run(capsys, "exact", k5)
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == 1 and doc["command"] == "exact"
    assert doc["result"]["value"] == 1 and doc["result"]["exact"]


def test_exact_svg(capsys, k5, tmp_path):
    svg = tmp_path / "k5.svg"
    code, _, _ = run(capsys, "exact", k5, "--svg", str(svg))
    assert code == 0 and svg.read_text().startswith("<")


def test_usage_errors(capsys, k5):
    assert run(capsys, "estimate", k5, "--eps", "0")[0] == 2
    assert run(capsys, "estimate", k5, "--eps", "1.5")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys)[0] == 2


def test_runtime_errors(capsys, tmp_path):
    code, _, err = run(capsys, "exact", str(tmp_path / "missing.txt"))
    assert code == 1 and "crosskit exact: error" in err
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1\n0 7 1\n")
    assert run(capsys, "exact", str(bad))[0] == 1
    assert run(capsys, "recupper", "--n", "3")[0] == 1
    assert run(capsys, "cdbounds")[0] == 1


def test_sylvester_deterministic_across_threads(capsys):
    a = run(capsys, "sylvester", "--samples", "100000", "--seed", "3", "--threads", "1")[1]
    b = run(capsys, "sylvester", "--samples", "100000", "--seed", "3", "--threads", "3")[1]
    assert a == b
    r = json.loads(a)["result"]
    assert abs(r["estimate"] - 25 / 36) <= r["radius"]


def test_estimate_and_draw(capsys, tmp_path):
    f = tmp_path / "g.txt"
    f.write_text(serialize_graph(random_graph(12, 0.5, 1)))
    code, out, _ = run(capsys, "estimate", str(f), "--eps", "0.3")
    assert code == 0 and json.loads(out)["result"]["k"] >= 1
    out_file = tmp_path / "draw.json"
    code, _, _ = run(capsys, "draw", str(f), "--trace", "--out", str(out_file))
    doc = json.loads(out_file.read_text())
    assert code == 0 and "trace" in doc["result"] and doc["result"]["drawing_weight"] >= 0


def test_other_commands(capsys, k5, tmp_path):
    g = tmp_path / "g.txt"
    g.write_text(serialize_graph(random_graph(5, 0.5, 2)))
    code, out, _ = run(capsys, "cutnorm", k5, str(g))
    assert code == 0 and json.loads(out)["result"]["exact"]
    assert run(capsys, "regularity", k5)[0] == 0
    code, out, _ = run(capsys, "cdbounds", k5)
    assert code == 0 and json.loads(out)["result"]["lower"] == pytest.approx(1 / 625)
    code, out, _ = run(capsys, "recupper", "--n", "5", "--samples", "5000")
    assert code == 0 and json.loads(out)["result"]["best"] == 1
    assert run(capsys, "probe", k5, "--k", "4", "--trials", "2")[0] == 0


def test_threads_env_default(monkeypatch):
    monkeypatch.setenv("CROSSKIT_THREADS", "4")
    a = build_parser().parse_args(["sylvester"])
    assert a.threads == 4
