"""Command line: subcommands, output formats, diagnostics and exit codes."""

import io
import json

import pytest

from linrec.main import main


def _diagnostic(err: str) -> dict:
    return json.loads(err.strip().splitlines()[-1])


def test_eval_prints_the_decoded_result(capsys):
    assert main(["eval", "@UnAdd 1 1"]) == 0
    assert capsys.readouterr().out.strip() == "2"


def test_eval_trace(capsys):
    assert main(["eval", "--trace", r"(\x:U^0. x) 2"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2 and lines[-1] == "2"


def test_eval_json(capsys):
    assert main(["eval", "--json", "@Add 2 2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["decoded"] == "4"
    assert data["redexes"]["recursive"] == 3


def test_flags_before_the_subcommand(capsys):
    assert main(["--json", "parse", r"\x:U^0. x"]) == 0
    assert json.loads(capsys.readouterr().out)["size"] == 2


def test_source_from_a_file(tmp_path, capsys):
    path = tmp_path / "add.lr"
    path.write_text("-- one plus one\n@Add 1 1\n")
    assert main(["eval", str(path)]) == 0
    assert capsys.readouterr().out.strip() == "2"


def test_source_from_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO("@Coerc 3"))
    assert main(["eval", "-"]) == 0
    assert capsys.readouterr().out.strip() == "3"


def test_fuel_exhausted_is_inconclusive(capsys):
    assert main(["eval", "--fuel", "2", "@Add 3 3"]) == 2
    assert _diagnostic(capsys.readouterr().err)["code"] == "FuelExhausted"


def test_parse_error_is_a_diagnostic(capsys):
    assert main(["parse", "(x"]) == 1
    diagnostic = _diagnostic(capsys.readouterr().err)
    assert diagnostic["code"] == "ParseError"
    assert diagnostic["location"]


# ---- typing ----


def test_typecheck(capsys):
    assert main(["typecheck", "--system", "RH(0)", "@Add"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].endswith(": U^1 -o U^0 -o U^0")
    assert out[1].split() == ["system", "RH(0)", "R=1", "I=1"]


def test_typecheck_rejects_contraction_on_trees(capsys):
    assert main(["typecheck", "--system", "RH(W)", "@Exp"]) == 1
    assert _diagnostic(capsys.readouterr().err)["code"] == "ContractionNotAllowed"


def test_typecheck_with_derivation(capsys):
    assert main(["typecheck", "--derivation", r"\x:U^0. x"]) == 0
    out = capsys.readouterr().out
    assert "[I-o]" in out and "[A]" in out


def test_unknown_system_is_a_usage_error(capsys):
    assert main(["typecheck", "--system", "X(A)", "@Add"]) == 1
    assert _diagnostic(capsys.readouterr().err)["code"] == "UsageError"


def test_bad_caps_are_a_usage_error(capsys):
    assert main(["eval", "--caps", "bogus=1", "2"]) == 1
    assert _diagnostic(capsys.readouterr().err)["code"] == "UsageError"


# ---- graph, trees, checks ----


def test_graph_dot(capsys):
    assert main(["graph", "--dot", "@UnAdd"]) == 0
    assert capsys.readouterr().out.startswith("digraph G {")


def test_graph_json(capsys):
    assert main(["graph", "--json", r"\x:U^0. x"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["size"] == 2 and len(data["vertices"]) == 2


def test_trees_capped_exit_code(capsys):
    assert main(["trees", "--caps", "max_trees=1", "@Add 2 2"]) == 2
    assert capsys.readouterr().out.strip().endswith("-- 1 trees, capped")


def test_check_passes(capsys):
    assert main(["check", "@UnAdd 1 1"]) == 0
    assert capsys.readouterr().out.strip().endswith("verdict: pass")


def test_check_cut_short_is_inconclusive(capsys):
    assert main(["check", "--caps", "max_steps=2", "@UnAdd 1 1"]) == 2
    out = capsys.readouterr().out
    assert "preservation step 3: inconclusive (stopped after 2 steps)" in out
    assert out.strip().endswith("verdict: inconclusive")


def test_audit_json(capsys):
    assert main(["audit", "@UnAdd 1 1"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] == "pass" and data["family"] == "primrec"


# ---- library and schemes ----


def test_stdlib_runs_a_builder(capsys):
    assert main(["stdlib", "Square", "3"]) == 0
    assert capsys.readouterr().out.strip() == "9"


def test_stdlib_prints_the_term_without_arguments(capsys):
    assert main(["stdlib", "Coerc", "--tier", "1"]) == 0
    assert capsys.readouterr().out.strip().startswith(r"\x:U^2.")


def test_stdlib_unknown_builder(capsys):
    assert main(["stdlib", "Nope"]) == 1
    assert _diagnostic(capsys.readouterr().err)["code"] == "ParseError"


@pytest.mark.parametrize(
    "expression, arguments, expected",
    [("addition", ["2", "3"], "5"), ("rec(proj(1,1), comp(succ, proj(3,2)))", ["1", "1"], "2")],
)
def test_primrec(expression, arguments, expected, capsys):
    assert main(["primrec", expression, *arguments]) == 0
    assert capsys.readouterr().out.strip() == expected


def test_primrec_arity_mismatch(capsys):
    assert main(["primrec", "addition", "2"]) == 1
    assert _diagnostic(capsys.readouterr().err)["code"] == "ParseError"


def test_systems_table(capsys):
    assert main(["systems"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].split() == ["id", "contraction", "ramified", "characterizes"]
    assert [line.split()[0] for line in lines[1:]] == ["H(A)", "H(W)", "H(0)", "RH(A)", "RH(W)", "RH(0)"]


def test_systems_json(capsys):
    assert main(["systems", "--json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert {r["id"]: r["characterizes"] for r in rows}["RH(A)"] == "elementary functions"


@pytest.mark.slow
def test_audit_square(capsys):
    assert main(["audit", "--system", "H(A)", "@Square 2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert all(c["verdict"] == "pass" for c in data["checks"])
