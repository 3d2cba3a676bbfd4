import io
import json
from fractions import Fraction

import pytest

from equiresolve.cli import (
    DSLError,
    Flags,
    ProblemFile,
    Task,
    emit,
    format_problem,
    load_schema,
    main,
    parse_problem,
    run_task,
)
from equiresolve.resolution.invariants import value_from_json

from conftest import PROBLEMS

jsonschema = pytest.importorskip("jsonschema")

FAST = ["cusp", "cusp_principalize", "node", "quartic_b2", "whitney_b2", "zero_fiber"]


def problem(name):
    return parse_problem((PROBLEMS / f"{name}.eqr").read_text())


@pytest.fixture(scope="module")
def cusp_doc():
    return run_task(problem("cusp_principalize"), Flags(trace=True))


# ---------------------------------------------------------------------------
# the problem-file language


def test_parse_minimal_file():
    p = parse_problem("vars x y\nideal x^2 - y^3  # the cusp\n")
    assert p == ProblemFile(vars=("x", "y"), ideal=p.ideal)
    assert len(p.ideal) == 1
    assert p.vars == ("x", "y") and p.b == 1 and p.tasks == ()


def test_parse_family_with_tasks():
    p = parse_problem("vars x y\nparams s t\nideal x^2 - s*y^3, t*y\ntask check-tau ((0, 1), (1/2, 2))\n")
    assert p.params == ("s", "t")
    assert len(p.ideal) == 2
    assert p.tasks == (Task("check-tau", ((Fraction(0), Fraction(1)), (Fraction(1, 2), Fraction(2)))),)


@pytest.mark.parametrize(
    "text, line, column, kind",
    [
        ("vars x y\nideal x y", 2, 9, "syntax"),
        ("vars x y\nideal x^2 - z", 2, 13, "undeclared"),
        ("ideal x", 1, 7, "undeclared"),
        ("vars x y\nideal 0", 2, 7, "zero-ideal"),
        ("vars x y\nvars z\nideal x", 2, 1, "duplicate"),
        ("vars x x\nideal x", 1, 8, "duplicate"),
        ("vars x\nideal x\ntask tau (1)", 3, 6, "undeclared"),
        ("vars x\nideal x\nsolve it", 3, 1, "syntax"),
    ],
)
def test_parse_errors_carry_line_and_column(text, line, column, kind):
    with pytest.raises(DSLError) as info:
        parse_problem(text)
    err = info.value
    assert (err.line, err.column, err.kind) == (line, column, kind)
    assert err.to_json()["code"] == "parse-error"


@pytest.mark.parametrize("path", sorted(PROBLEMS.glob("*.eqr")), ids=lambda p: p.stem)
def test_canonical_printer_is_a_fixpoint(path):
    p = parse_problem(path.read_text())
    text = format_problem(p)
    assert parse_problem(text) == p
    assert format_problem(parse_problem(text)) == text


# ---------------------------------------------------------------------------
# running tasks


def test_principalization_report(cusp_doc):
    assert cusp_doc.exit_code == 0
    first = cusp_doc.tasks[0]
    assert first["status"] == "ok"
    body = first["resolution"]
    assert body["length"] == 8 and body["final"]["verified"]
    assert all("trace" in s for s in body["steps"])
    # recorded values strictly decrease (compared in the engine's order)
    heads = [value_from_json(s["heads"]) for s in body["steps"]]
    assert all(a > b for a, b in zip(heads, heads[1:]))


def test_desingularization_report(cusp_doc):
    second = cusp_doc.tasks[1]
    assert second["task"] == "desingularize"
    assert second["desingularization"]["smooth"]


def test_zero_fiber_becomes_a_diagnostic():
    doc = run_task(problem("zero_fiber"))
    assert [t["status"] for t in doc.tasks] == ["ok", "error"]
    (diag,) = doc.diagnostics
    assert diag["task"] == 1 and diag["type"] == "InvalidFiber"
    assert doc.exit_code == 1


def test_principalize_needs_threshold_one():
    p = parse_problem("vars x y\nideal x^2 - y^3\nb = 2\ntask principalize\n")
    doc = run_task(p)
    assert doc.tasks[0]["error"]["code"] == "invalid-task"


def test_budget_is_reported():
    doc = run_task(problem("cusp_principalize"), Flags(max_steps=2))
    assert doc.tasks[0]["status"] == "error"
    assert doc.exit_code == 1


# ---------------------------------------------------------------------------
# emitters


@pytest.mark.parametrize("name", FAST)
def test_json_report_is_schema_valid_and_stable(name):
    p = problem(name)
    one = emit(run_task(p), "json")
    two = emit(run_task(p), "json")
    assert one == two
    jsonschema.validate(json.loads(one), load_schema())


def test_dot_report_parses(cusp_doc):
    pydot = pytest.importorskip("pydot")
    (graph,) = pydot.graph_from_dot_data(emit(cusp_doc, "dot").decode())
    assert graph.get_name() == "charts"
    assert graph.get_subgraph_list()


def test_text_report_mentions_each_task(cusp_doc):
    text = emit(cusp_doc, "text").decode()
    assert "principalize" in text and "desingularize" in text


def test_unknown_format():
    with pytest.raises(ValueError):
        emit(run_task(problem("cusp")), "yaml")


# ---------------------------------------------------------------------------
# the command line


def test_main_success(capsysbinary):
    assert main([str(PROBLEMS / "cusp.eqr"), "--out", "json"]) == 0
    data = json.loads(capsysbinary.readouterr().out)
    assert data["tasks"][0]["resolution"]["length"] == 1


def test_main_diagnostics(capsysbinary):
    assert main([str(PROBLEMS / "zero_fiber.eqr")]) == 1


def test_main_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.eqr"
    bad.write_text("vars x y\nideal x^2 - z\n")
    assert main([str(bad), "--out", "json"]) == 2
    out, err = capsys.readouterr()
    assert json.loads(out)["error"]["kind"] == "undeclared"
    assert "bad.eqr:2:13" in err


def test_main_missing_file(tmp_path):
    assert main([str(tmp_path / "missing.eqr")]) == 2


def test_main_reads_stdin(monkeypatch, capsysbinary):
    monkeypatch.setattr("sys.stdin", io.StringIO("vars x y\nideal x^2 - y^3\nb = 2\ntask resolve\n"))
    assert main(["-", "--out", "text"]) == 0
    assert b"resolve" in capsysbinary.readouterr().out
