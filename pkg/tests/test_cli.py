from __future__ import annotations

import pytest

from argstruct.cli import main


@pytest.fixture
def run(capsys):
    def go(*argv):
        code = main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err
    return go


@pytest.fixture
def write(tmp_path):
    def go(name, text):
        p = tmp_path / name
        p.write_text(text)
        return p
    return go


def test_validate_accepted(run, fixture_path):
    code, out, _ = run("validate", fixture_path("accepted.arg"))
    assert code == 0 and out == "rst accepted: accepted\n"


@pytest.mark.parametrize("name, constraint", [
    ("missing_root.arg", "completeness"),
    ("orphan.arg", "connectedness"),
    ("duplicate_span.arg", "uniqueness"),
    ("gapped.arg", "adjacency"),
])
def test_validate_violations(run, fixture_path, name, constraint):
    code, out, _ = run("validate", fixture_path(name))
    assert code == 1
    assert "rejected" in out and constraint in out


@pytest.mark.parametrize("name", ["marx.arg", "arbitration.arg", "scenario.arg"])
def test_validate_fixtures(run, fixture_path, name):
    assert run("validate", fixture_path(name))[0] == 0


def test_parse_error_exit_two(run, write):
    code, out, err = run("validate", write("bad.arg", "#units\n1 | a\n#rst r\nunit 4\n"))
    assert code == 2 and out == ""
    assert "bad.arg:4:6: error UnknownUnit" in err


def test_usage_errors(run, tmp_path, fixture_path):
    assert run()[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("validate", tmp_path / "absent.arg")[0] == 2
    assert run("plan", fixture_path("scenario.arg"), "--depth", "0")[0] == 2
    assert run("plan", fixture_path("scenario.arg"), "--depth", "x")[0] == 2
    assert run("--help")[0] == 0


def test_catalog_list(run, write):
    code, out, _ = run("catalog", "list")
    assert code == 0 and len(out.splitlines()) == 24
    assert any(line.split()[0] == "JUSTIFY" and line.endswith("argumentative") for line in out.splitlines())
    ext = write("ext.cat", "#catalog\nrelation EXTRA nuclearity=mono argumentative=false n=a s=b ns=c effect=d locus=N\n")
    code, out, _ = run("catalog", "list", "--extensions", ext)
    assert code == 0 and len(out.splitlines()) == 25
    assert run("catalog", "list", "--extensions", write("bad.cat", "#catalog\nrelation X\n"))[0] == 2


def test_plan(run, fixture_path):
    code, out, _ = run("plan", fixture_path("scenario.arg"))
    assert code == 0
    assert out.splitlines() == ["goal R", "1. MT: (P->Q), ~Q |- ~P", "2. MP: ~P, (~P->R) |- R"]


def test_plan_failures(run, fixture_path):
    scenario = fixture_path("scenario.arg")
    assert run("plan", scenario, "--goal", "Q")[0] == 1
    assert run("plan", scenario, "--depth", "1")[0] == 1
    assert run("plan", scenario, "--goal", "((")[0] == 2
    assert run("plan", scenario, "--plan", "other")[0] == 2


def test_refine(run, fixture_path):
    code, out, _ = run("refine", fixture_path("scenario.arg"))
    assert code == 0 and out.startswith("#units\n")
    assert "#rst scenario\n" in out and "JOINT" in out


def test_refine_enumerate(run, fixture_path):
    code, out, _ = run("refine", fixture_path("scenario.arg"), "--enumerate", "100")
    assert code == 0 and out.count("#rst scenario-") == 36
    assert run("refine", fixture_path("scenario.arg"), "--enumerate", "5")[0] == 1
    assert run("refine", fixture_path("scenario.arg"), "--enumerate", "0")[0] == 2


def test_refine_map(run, fixture_path, write):
    good = write("m.cat", "#catalog\nmap MP = EVIDENCE\nmap MT = EVIDENCE\n")
    code, out, _ = run("refine", fixture_path("scenario.arg"), "--map", good, "--enumerate", "10")
    assert code == 0 and out.count("#rst scenario") == 1
    bad = write("b.cat", "#catalog\nmap MP = ELABORATION\n")
    assert run("refine", fixture_path("scenario.arg"), "--map", bad)[0] == 2


def test_refine_needs_argument_or_plan(run, fixture_path):
    assert run("refine", fixture_path("accepted.arg"))[0] == 2


def test_contract_check(run, fixture_path, write):
    code, out, _ = run("contract", "check", fixture_path("arbitration.arg"))
    assert code == 0 and "0 open demand(s)" in out
    text = fixture_path("arbitration.arg").read_text()
    cut = write("cut.arg", "\n".join(
        ln for ln in text.splitlines() if ln.split()[:1] != ["arc"] or "from=president-appointment" not in ln
    ) + "\n")
    code, out, _ = run("contract", "check", cut)
    assert code == 1 and "1 open demand(s)" in out and "open who on president-appointment" in out
    strict = write("strict.chk", "term = who\n")
    assert run("contract", "check", fixture_path("arbitration.arg"), "--checklist", strict)[0] == 1
    assert run("contract", "check", fixture_path("arbitration.arg"), "--checklist", write("x.chk", "nope\n"))[0] == 2
    assert run("contract", "check", fixture_path("accepted.arg"))[0] == 2


@pytest.mark.parametrize("question, node, expected", [
    ("what_if", "tribunal-composition", "vacancy-procedure\n"),
    ("who", "president-appointment", "appointing-authority\n"),
    ("how", "vacancy-procedure", "original-appointment-manner\n"),
    ("when", "vacancy-procedure", ""),
])
def test_contract_query(run, fixture_path, question, node, expected):
    code, out, _ = run("contract", "query", fixture_path("arbitration.arg"), "--question", question, "--node", node)
    assert code == 0 and out == expected


def test_contract_query_errors(run, fixture_path):
    path = fixture_path("arbitration.arg")
    assert run("contract", "query", path, "--question", "who", "--node", "nobody")[0] == 2
    assert run("contract", "query", path, "--question", "why", "--node", "the-parties")[0] == 2


def test_export(run, fixture_path):
    code, out, _ = run("export", fixture_path("arbitration.arg"))
    assert code == 0 and out.startswith('digraph "contract:')
    assert run("export", fixture_path("arbitration.arg"), "--format", "svg")[0] == 2
    assert run("export", fixture_path("arbitration.arg"), "--section", "missing")[0] == 2
    assert run("export", fixture_path("scenario.arg"))[0] == 2
