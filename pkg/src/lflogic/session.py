"""Proof sessions: file loading, tactic execution, undo, batch checking,
and the line-delimited JSON protocol spoken over stdio.

One theorem is in flight at a time; the lemma table is shared across the
loaded file set.  Requests are `{id, op, arg}` with op one of load,
tactic, undo, state, quit; responses carry the goal renderings produced
by the canonical printer, byte-identical to the REPL display.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from . import tactics as T
from .formulas import Formula
from .parser import (ParseError, TacticCall, parse_signature,
                     parse_tactic, parse_theory)
from .printer import print_goals, print_sequent
from .prover import ProofState, RuleError, initial_state
from .sequents import SequentError
from .formulas import FormulaError
from .syntax import MalformedError, Signature
from .kernel import CheckError, Kernel


class SessionError(Exception):
    pass


@dataclass
class Session:
    sig: Signature = field(default_factory=Signature)
    schemas: dict = field(default_factory=dict)
    lemmas: list = field(default_factory=list)
    state: Optional[ProofState] = None
    theorem: Optional[str] = None
    search_depth: int = 5
    trace: bool = False
    history: list = field(default_factory=list)
    stmt: Optional[Formula] = None

    # -- loading ---------------------------------------------------------------

    def load_file(self, path: str) -> list[str]:
        text = Path(path).read_text()
        if path.endswith(".lfs"):
            return self.load_signature_text(text)
        return self.load_theory_text(text, origin=path)

    def load_signature_text(self, text: str) -> list[str]:
        if self.state is not None:
            raise SessionError("cannot load a signature during a proof")
        sig = parse_signature(text, self.sig)
        Kernel(sig)
        self.sig = sig
        return [f"signature loaded ({len(sig.decls)} declarations)"]

    def load_theory_text(self, text: str, origin: str = "<input>") -> list[str]:
        out = []
        theory = parse_theory(text, self.sig, self.schemas)
        self.schemas.update(theory.schemas)
        for item in theory.theorems:
            self.start_theorem(item.name, item.formula)
            failed = None
            for tac in item.tactics:
                try:
                    self.run_tactic(tac)
                except (T.TacticError, ParseError, SessionError) as e:
                    failed = f"{origin}: {item.name}: {tac}: {e}"
                    break
            if failed:
                raise SessionError(failed)
            if item.closed:
                if self.state is not None and not self.state.done():
                    raise SessionError(
                        f"{origin}: {item.name}: proof is not complete at Qed "
                        f"({len(self.state.goals)} goals remain)")
                out.append(f"theorem {item.name} proved")
            elif self.state is not None and self.state.done():
                out.append(f"theorem {item.name} proved")
            else:
                out.append(f"theorem {item.name} open "
                           f"({len(self.state.goals)} goals)")
        return out

    def start_theorem(self, name: str, formula: Formula) -> None:
        if self.state is not None and not self.state.done():
            raise SessionError(f"theorem {self.theorem} is still open")
        try:
            self.state = initial_state(self.sig, formula,
                                       lemmas=tuple(self.lemmas))
        except (SequentError, FormulaError, RuleError) as e:
            raise SessionError(f"statement of {name} is not well formed: {e}")
        self.theorem = name
        self.stmt = formula
        self.history = []

    # -- tactics -----------------------------------------------------------------

    def run_tactic(self, text: str) -> list[str]:
        if self.state is None:
            raise SessionError("no theorem in flight")
        if self.state.done():
            raise SessionError("the proof is already complete")
        seq = self.state.focused().sequent
        call = parse_tactic(text, self.sig, self.schemas, seq)
        before = self.state
        out = self._execute(call)
        # record the sentence exactly as given so the log replays verbatim
        canonical = text.strip().rstrip(".").strip()
        self.state = replace(out, log=before.log + (canonical,))
        self.history.append(before)
        msgs = []
        if self.state.done():
            self.lemmas.append((self.theorem, self.stmt))
            msgs.append(f"theorem {self.theorem} proved")
        return msgs

    def _execute(self, call: TacticCall) -> ProofState:
        st = self.state
        a = call.args
        if call.name == "ind":
            return T.tac_ind(st, a["k"])
        if call.name == "intros":
            return T.tac_intros(st)
        if call.name == "case":
            return T.tac_case(st, a["hyp"], a["keep"])
        if call.name == "exists":
            return T.tac_exists(st, a["witness"])
        if call.name == "search":
            return T.tac_search(st, a["depth"] or self.search_depth)
        if call.name == "assert":
            return T.tac_assert(st, a["formula"])
        if call.name == "apply":
            return T.tac_apply(st, a["name"], a["to"], a["withs"])
        if call.name == "split":
            return T.tac_split(st)
        if call.name == "left":
            return T.tac_left(st)
        if call.name == "right":
            return T.tac_right(st)
        if call.name == "clear":
            return T.tac_clear(st, a["hyp"])
        if call.name == "id":
            return T.tac_id(st, a["hyp"])
        if call.name == "weaken":
            return T.tac_weaken(st, a["hyp"], a["n"], a["b"])
        if call.name == "strengthen":
            return T.tac_strengthen(st, a["hyp"])
        if call.name == "permute":
            return T.tac_permute(st, a["hyp"], a["first"])
        if call.name == "inst":
            return T.tac_inst(st, a["hyp"], a["n"], a["witness"], a["by"])
        raise SessionError(f"unknown tactic {call.name}")

    def undo(self) -> None:
        if not self.history:
            raise SessionError("nothing to undo")
        # popping may resurrect a completed proof; drop any lemma recorded
        if self.state is not None and self.state.done() and self.lemmas \
                and self.lemmas[-1][0] == self.theorem:
            self.lemmas.pop()
        self.state = self.history.pop()

    # -- views ----------------------------------------------------------------------

    def goals_json(self) -> list[dict]:
        if self.state is None:
            return []
        out = []
        for g in self.state.goals:
            s = g.sequent
            out.append({
                "gid": g.gid,
                "rendering": print_sequent(s),
                "hyps": [{"name": h.name,
                          "rendering": _hyp_rendering(s, h.name)}
                         for h in s.hyps],
            })
        return out

    def display(self) -> str:
        if self.state is None:
            return "No theorem in flight."
        return print_goals(self.state.goals)


def _hyp_rendering(s, name: str) -> str:
    from .printer import print_formula, sequent_namer
    namer = sequent_namer(s)
    return print_formula(s.hyp(name).formula, namer)


# ---------------------------------------------------------------------------
# Batch checking

def check_files(paths: list[str], search_depth: int = 5,
                trace: bool = False) -> tuple[int, list[str]]:
    """Run every file; exit status 0 exactly when every theorem closes."""
    session = Session(search_depth=search_depth, trace=trace)
    msgs: list[str] = []
    try:
        for p in paths:
            msgs.extend(session.load_file(p))
    except (ParseError, SessionError, CheckError, MalformedError,
            T.TacticError, OSError) as e:
        msgs.append(f"error: {e}")
        return 1, msgs
    if session.state is not None and not session.state.done():
        msgs.append(f"error: theorem {session.theorem} left open "
                    f"({len(session.state.goals)} goals)")
        return 1, msgs
    return 0, msgs


# ---------------------------------------------------------------------------
# REPL

def repl(paths: list[str], search_depth: int = 5, trace: bool = False,
         stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    session = Session(search_depth=search_depth, trace=trace)
    for p in paths:
        try:
            for m in session.load_file(p):
                print(m, file=stdout)
        except (ParseError, SessionError, CheckError, T.TacticError,
                OSError) as e:
            print(f"error: {e}", file=stdout)
            return 1
    print(session.display(), file=stdout)
    while True:
        print("lflogic> ", end="", file=stdout, flush=True)
        line = stdin.readline()
        if not line:
            return 0
        line = line.strip()
        if not line:
            continue
        if line in ("quit", "quit.", "exit"):
            return 0
        if line in ("undo", "undo."):
            try:
                session.undo()
            except SessionError as e:
                print(f"error: {e}", file=stdout)
                continue
            print(session.display(), file=stdout)
            continue
        try:
            for m in session.run_tactic(line):
                print(m, file=stdout)
        except (ParseError, SessionError, T.TacticError) as e:
            print(f"error: {e}", file=stdout)
            continue
        print(session.display(), file=stdout)


# ---------------------------------------------------------------------------
# Line-delimited JSON protocol

def serve_session(stdin=None, stdout=None, search_depth: int = 5) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    session = Session(search_depth=search_depth)
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
        except json.JSONDecodeError as e:
            _emit(stdout, {"id": None, "ok": False, "error": f"bad json: {e}"})
            continue
        rid = req.get("id")
        op = req.get("op")
        arg = req.get("arg")
        try:
            if op == "quit":
                _emit(stdout, _ok(rid, session))
                return 0
            if op == "load":
                files = arg if isinstance(arg, list) else [arg]
                for f in files:
                    session.load_file(f)
                _emit(stdout, _ok(rid, session))
            elif op == "tactic":
                session.run_tactic(arg)
                _emit(stdout, _ok(rid, session))
            elif op == "undo":
                session.undo()
                _emit(stdout, _ok(rid, session))
            elif op == "state":
                _emit(stdout, _ok(rid, session))
            else:
                _emit(stdout, {"id": rid, "ok": False,
                               "error": f"unknown op {op!r}"})
        except (ParseError, SessionError, T.TacticError, CheckError,
                MalformedError, OSError) as e:
            _emit(stdout, {"id": rid, "ok": False, "error": str(e),
                           "goals": session.goals_json()})
    return 0


def _ok(rid, session: Session) -> dict:
    done = session.state is not None and session.state.done()
    return {"id": rid, "ok": True, "goals": session.goals_json(),
            "theorem": session.theorem, "done": done,
            "log": list(session.state.log) if session.state else []}


def _emit(stdout, obj) -> None:
    print(json.dumps(obj), file=stdout, flush=True)
