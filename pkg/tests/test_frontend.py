import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from lflogic.parser import (ParseError, Parser, Scope, parse_signature,
                            parse_tactic, parse_theory, tokenize)
from lflogic.printer import (print_formula, print_sequent, print_term,
                             print_type)
from lflogic.session import Session, check_files, serve_session
from lflogic.syntax import Signature, alpha_eq

EXAMPLES = Path(__file__).resolve().parent.parent / "src" / "lflogic" / "examples"


def load_stlc_text() -> str:
    return (EXAMPLES / "stlc.lfs").read_text()


def test_signature_parse_matches_programmatic(stlc):
    parsed = parse_signature(load_stlc_text())
    assert [d.name for d in parsed.decls] == [d.name for d in stlc.decls]
    for d1, d2 in zip(parsed.decls, stlc.decls):
        if hasattr(d1, "ty"):
            assert alpha_eq(d1.ty, d2.ty), d1.name
        else:
            assert alpha_eq(d1.kind, d2.kind), d1.name


def test_signature_print_parse_roundtrip(stlc):
    from lflogic.printer import print_kind, print_type
    parsed = parse_signature(load_stlc_text())
    lines = []
    for d in parsed.decls:
        if hasattr(d, "ty"):
            lines.append(f"{d.name} : {print_type(d.ty)}.")
        else:
            lines.append(f"{d.name} : {print_kind(d.kind)}.")
    reparsed = parse_signature("\n".join(lines))
    for d1, d2 in zip(parsed.decls, reparsed.decls):
        if hasattr(d1, "ty"):
            assert alpha_eq(d1.ty, d2.ty), d1.name
        else:
            assert alpha_eq(d1.kind, d2.kind), d1.name


def test_parse_schema_matches(stlc):
    from tests.test_formulas import c_schema
    theory = parse_theory("Schema c := {T : o} (x : tm, y : of x T).", stlc)
    assert theory.schemas["c"].blocks[0] == c_schema().blocks[0]


def test_parse_theorem_formula(stlc):
    from tests.test_formulas import uniqueness_formula
    text = (EXAMPLES / "uniqueness_goal.ath").read_text()
    theory = parse_theory(text, stlc)
    [thm] = theory.theorems
    assert thm.name == "uniqueness"
    assert not thm.closed
    assert thm.formula == uniqueness_formula()


def test_formula_print_parse_roundtrip(stlc):
    from tests.test_formulas import uniqueness_formula
    from lflogic.parser import Parser, Scope, tokenize
    f = uniqueness_formula()
    text = print_formula(f)
    schema = f.schema
    p = Parser(tokenize(text))
    f2 = p.parse_formula(Scope(stlc, {"c": schema}))
    assert f2 == f


def test_parse_error_position(stlc):
    with pytest.raises(ParseError) as e:
        parse_signature("foo : {x tm} tp.")
    assert e.value.line == 1 and e.value.col > 1


def test_tactic_sentence_splitting(stlc):
    text = """
Schema c := {T : o} (x : tm, y : of x T).
Theorem t : ctx Gamma : c. forall e : o. {Gamma |- e : tm} => true.
intros.
assert ctx Delta : c. forall y : o. true.
search 3.
"""
    theory = parse_theory(text, stlc)
    [thm] = theory.theorems
    assert thm.tactics == ["intros",
                           "assert ctx Delta : c. forall y : o. true",
                           "search 3"]


def test_check_cli_golden(tmp_path):
    code, msgs = check_files([str(EXAMPLES / "stlc.lfs"),
                              str(EXAMPLES / "uniqueness.ath")])
    assert code == 0
    assert any("uniqueness proved" in m for m in msgs)


def test_check_cli_failing_script(tmp_path):
    bad = tmp_path / "bad.ath"
    bad.write_text("""
Theorem nope : {. |- empty : tp}.
search.
Qed.
""")
    code, msgs = check_files([str(EXAMPLES / "stlc.lfs"), str(bad)])
    assert code == 1
    assert any("error" in m for m in msgs)


def test_check_cli_open_theorem(tmp_path):
    code, msgs = check_files([str(EXAMPLES / "stlc.lfs"),
                              str(EXAMPLES / "uniqueness_goal.ath")])
    assert code == 1


def test_session_undo_restores_rendering():
    session = Session()
    session.load_file(str(EXAMPLES / "stlc.lfs"))
    session.load_file(str(EXAMPLES / "uniqueness_goal.ath"))
    before = session.display()
    session.run_tactic("ind 4")
    mid = session.display()
    assert mid != before
    session.undo()
    assert session.display() == before
    session.run_tactic("ind 4")
    assert session.display() == mid


def test_protocol_session_flow():
    requests = [
        {"id": 1, "op": "load", "arg": str(EXAMPLES / "stlc.lfs")},
        {"id": 2, "op": "load", "arg": str(EXAMPLES / "uniqueness_goal.ath")},
        {"id": 3, "op": "state", "arg": None},
        {"id": 4, "op": "tactic", "arg": "ind 4"},
        {"id": 5, "op": "tactic", "arg": "intros"},
        {"id": 6, "op": "tactic", "arg": "case H4"},
        {"id": 7, "op": "undo", "arg": None},
        {"id": 8, "op": "tactic", "arg": "case H4"},
        {"id": 9, "op": "tactic", "arg": "bogus H1"},
        {"id": 10, "op": "quit", "arg": None},
    ]
    stdin = io.StringIO("\n".join(json.dumps(r) for r in requests) + "\n")
    stdout = io.StringIO()
    assert serve_session(stdin, stdout) == 0
    lines = [json.loads(l) for l in stdout.getvalue().splitlines()]
    byid = {r["id"]: r for r in lines}
    assert byid[3]["ok"] and len(byid[3]["goals"]) == 1
    assert byid[6]["ok"] and len(byid[6]["goals"]) == 4
    assert len(byid[7]["goals"]) == 1
    assert len(byid[8]["goals"]) == 4
    assert byid[8]["goals"][0]["rendering"] == byid[6]["goals"][0]["rendering"]
    assert not byid[9]["ok"] and "error" in byid[9]
    # goal renderings match the REPL display line for line
    session = Session()
    session.load_file(str(EXAMPLES / "stlc.lfs"))
    session.load_file(str(EXAMPLES / "uniqueness_goal.ath"))
    session.run_tactic("ind 4")
    session.run_tactic("intros")
    session.run_tactic("case H4")
    assert session.goals_json()[0]["rendering"] == byid[8]["goals"][0]["rendering"]


def test_repl_smoke():
    from lflogic.session import repl
    cmds = "ind 4\nintros\ncase H4\nundo\nquit\n"
    out = io.StringIO()
    code = repl([str(EXAMPLES / "stlc.lfs"), str(EXAMPLES / "uniqueness_goal.ath")],
                stdin=io.StringIO(cmds), stdout=out)
    assert code == 0
    text = out.getvalue()
    assert "(4 goals)" in text
    assert "lflogic>" in text


def test_cli_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "lflogic.cli", "check",
         str(EXAMPLES / "stlc.lfs"), str(EXAMPLES / "uniqueness.ath")],
        capture_output=True, text=True)
    assert res.returncode == 0, res.stdout + res.stderr
    assert "uniqueness proved" in res.stdout


def test_cli_enumerate():
    res = subprocess.run(
        [sys.executable, "-m", "lflogic.cli", "enumerate",
         str(EXAMPLES / "stlc.lfs"), "tp", "--max-size", "3"],
        capture_output=True, text=True)
    assert res.returncode == 0
    got = set(res.stdout.splitlines())
    assert got == {"unit", "arr unit unit"}


def test_web_bridge_handle_request():
    from lflogic.webserve import handle_request
    session = Session()
    r1 = handle_request(session, {"id": 1, "op": "load",
                                  "arg": str(EXAMPLES / "stlc.lfs")})
    assert r1["ok"]
    r2 = handle_request(session, {"id": 2, "op": "load",
                                  "arg": str(EXAMPLES / "uniqueness_goal.ath")})
    assert r2["ok"] and len(r2["goals"]) == 1
    r3 = handle_request(session, {"id": 3, "op": "tactic", "arg": "ind 4"})
    assert r3["ok"] and r3["log"] == ["ind 4"]
    r4 = handle_request(session, {"id": 4, "op": "tactic", "arg": "nonsense"})
    assert not r4["ok"] and "error" in r4
    r5 = handle_request(session, {"id": 5, "op": "undo", "arg": None})
    assert r5["ok"] and r5["log"] == []


def test_check_cli_full_development():
    code, msgs = check_files([str(EXAMPLES / "stlc.lfs"),
                              str(EXAMPLES / "uniqueness_full.ath")])
    assert code == 0
    assert [m for m in msgs if "proved" in m] == [
        "theorem tp_strengthen proved",
        "theorem eq_strengthen proved",
        "theorem uniqueness proved",
        "theorem uniqueness_closed proved",
    ]


def test_check_cli_ill_formed_statement(tmp_path):
    bad = tmp_path / "bad.ath"
    bad.write_text("Theorem broken : {. |- empty : of empty}.\nsearch.\nQed.\n")
    code, msgs = check_files([str(EXAMPLES / "stlc.lfs"), str(bad)])
    assert code == 1
    assert any("not well formed" in m for m in msgs)


def test_check_cli_missing_file():
    code, msgs = check_files(["no/such/file.lfs"])
    assert code == 1
    assert any("error" in m for m in msgs)
