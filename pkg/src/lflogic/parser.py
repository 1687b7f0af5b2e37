"""Concrete syntax: signature files, schema/theorem files, proof scripts,
and the term/formula fragments used in tactic arguments.

Binders are written `{x : A} B` and `[x] M`, application is juxtaposition,
assertions are `{G |- M : A}` with an optional `@`/`*` annotation suffix,
and `%` starts a line comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .formulas import (All, And, Annotation, Atom, BOT, CtxAll, CtxExpr,
                       CtxVar, Ex, Formula, Imp, Or, TOP)
from .schemas import BlockSchema, ContextSchema
from .syntax import (ArityType, Arrow, Atm, AtomTy, Const, KTYPE, Kind, Lam,
                     Nominal, PiKind, PiTy, Signature, Term, TermDecl, Type,
                     TypeDecl, Var, o)


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


_SYMBOLS = ["->", "=>", "|-", ":=", "/\\", "\\/", "<->",
            "{", "}", "(", ")", "[", "]", ":", ".", ",", "|", "=", "*", "@"]
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_NUM = re.compile(r"[0-9]+")


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        m = _IDENT.match(text, i)
        if m:
            out.append(Token("ident", m.group(0), line, col))
            col += len(m.group(0))
            i = m.end()
            continue
        m = _NUM.match(text, i)
        if m:
            out.append(Token("num", m.group(0), line, col))
            col += len(m.group(0))
            i = m.end()
            continue
        for s in _SYMBOLS:
            if text.startswith(s, i):
                out.append(Token(s, s, line, col))
                i += len(s)
                col += len(s)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    out.append(Token("eof", "", line, col))
    return out


_NOMINAL_RE = re.compile(r"^n([0-9]*)('*)$")


@dataclass
class Scope:
    """Name resolution for term/formula parsing.  A lenient scope accepts
    any identifier (used for sentence splitting before execution)."""
    sig: Signature
    schemas: dict
    vars: dict = field(default_factory=dict)       # name -> Var
    cvars: dict = field(default_factory=dict)      # name -> CtxVar
    lenient: bool = False

    def child(self) -> "Scope":
        return Scope(self.sig, self.schemas, dict(self.vars), dict(self.cvars),
                     self.lenient)

    def resolve_head(self, name: str):
        if name in self.vars:
            return self.vars[name]
        if self.sig.lookup_term(name) is not None:
            return Const(name)
        m = _NOMINAL_RE.match(name)
        if m and not m.group(2):
            return Nominal(o, int(m.group(1) or "0"))
        if self.lenient:
            return Var(name)
        return None


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    # -- token plumbing ------------------------------------------------------

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(f"expected {kind!r}, found {t.text!r}", t.line, t.col)
        return self.next()

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def at_ident(self, word: str) -> bool:
        return self.at("ident", word)

    def err(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # -- arity types ----------------------------------------------------------

    def parse_arity(self) -> ArityType:
        left = self.parse_arity_atom()
        if self.at("->"):
            self.next()
            return Arrow(left, self.parse_arity())
        return left

    def parse_arity_atom(self) -> ArityType:
        if self.at("("):
            self.next()
            a = self.parse_arity()
            self.expect(")")
            return a
        t = self.expect("ident")
        if t.text != "o":
            raise ParseError("expected an arity type", t.line, t.col)
        return o

    # -- kinds, types, terms ---------------------------------------------------

    def parse_kind(self, scope: Scope) -> Kind:
        if self.at("{"):
            self.next()
            name = self.expect("ident").text
            self.expect(":")
            dom = self.parse_type(scope)
            self.expect("}")
            inner = scope.child()
            v = Var(name)
            inner.vars[name] = v
            return PiKind(v, dom, self.parse_kind(inner))
        if self.at_ident("type"):
            self.next()
            return KTYPE
        a = self.parse_type_atomic_or_paren(scope)
        self.expect("->")
        return PiKind(Var("_"), a, self.parse_kind(scope))

    def parse_type(self, scope: Scope) -> Type:
        if self.at("{"):
            self.next()
            name = self.expect("ident").text
            self.expect(":")
            dom = self.parse_type(scope)
            self.expect("}")
            inner = scope.child()
            v = Var(name)
            inner.vars[name] = v
            return PiTy(v, dom, self.parse_type(inner))
        left = self.parse_type_atomic_or_paren(scope)
        if self.at("->"):
            self.next()
            return PiTy(Var("_"), left, self.parse_type(scope))
        return left

    def parse_type_atomic_or_paren(self, scope: Scope) -> Type:
        if self.at("("):
            self.next()
            a = self.parse_type(scope)
            self.expect(")")
            if self.at("->"):
                self.next()
                return PiTy(Var("_"), a, self.parse_type(scope))
            return a
        head = self.expect("ident")
        if Parser._is_type_const(scope, head.text) is None:
            raise ParseError(f"unknown type constant {head.text!r}",
                             head.line, head.col)
        args = []
        while self._starts_term_arg():
            args.append(self.parse_term_arg(scope))
        return AtomTy(head.text, tuple(args))

    @staticmethod
    def _is_type_const(scope: Scope, name: str):
        return scope.sig.lookup_type(name)

    # keywords that terminate a bare juxtaposition in tactic arguments;
    # parenthesize a term to use these as variable names
    _ARG_STOPPERS = ("type", "by", "to", "with")

    def _starts_term_arg(self) -> bool:
        t = self.peek()
        if t.kind == "(" or t.kind == "[":
            return True
        return t.kind == "ident" and t.text not in self._ARG_STOPPERS

    def parse_term_arg(self, scope: Scope) -> Term:
        if self.at("("):
            self.next()
            m = self.parse_term(scope)
            self.expect(")")
            return m
        if self.at("["):
            return self.parse_term(scope)
        t = self.expect("ident")
        head = scope.resolve_head(t.text)
        if head is None:
            raise ParseError(f"unknown identifier {t.text!r}", t.line, t.col)
        return Atm(head)

    def parse_term(self, scope: Scope) -> Term:
        if self.at("["):
            self.next()
            name = self.expect("ident").text
            self.expect("]")
            inner = scope.child()
            v = Var(name)
            inner.vars[name] = v
            return Lam(v, self.parse_term(inner))
        t = self.expect("ident")
        head = scope.resolve_head(t.text)
        if head is None:
            raise ParseError(f"unknown identifier {t.text!r}", t.line, t.col)
        args = []
        while self._starts_term_arg():
            args.append(self.parse_term_arg(scope))
        return Atm(head, tuple(args))

    # -- formulas ---------------------------------------------------------------

    def parse_formula(self, scope: Scope) -> Formula:
        return self.parse_imp(scope)

    def parse_imp(self, scope: Scope) -> Formula:
        left = self.parse_or(scope)
        if self.at("=>"):
            self.next()
            return Imp(left, self.parse_imp(scope))
        return left

    def parse_or(self, scope: Scope) -> Formula:
        left = self.parse_and(scope)
        while self.at("\\/"):
            self.next()
            left = Or(left, self.parse_and(scope))
        return left

    def parse_and(self, scope: Scope) -> Formula:
        left = self.parse_formula_atom(scope)
        while self.at("/\\"):
            self.next()
            left = And(left, self.parse_formula_atom(scope))
        return left

    def parse_formula_atom(self, scope: Scope) -> Formula:
        t = self.peek()
        if self.at("("):
            self.next()
            f = self.parse_formula(scope)
            self.expect(")")
            return f
        if self.at_ident("true"):
            self.next()
            return TOP
        if self.at_ident("false"):
            self.next()
            return BOT
        if self.at_ident("forall") or self.at_ident("exists"):
            word = self.next().text
            name = self.expect("ident").text
            self.expect(":")
            ar = self.parse_arity()
            self.expect(".")
            inner = scope.child()
            v = Var(name)
            inner.vars[name] = v
            body = self.parse_formula(inner)
            return All(v, ar, body) if word == "forall" else Ex(v, ar, body)
        if self.at_ident("ctx"):
            self.next()
            name = self.expect("ident").text
            self.expect(":")
            sname = self.expect("ident").text
            schema = scope.schemas.get(sname)
            if schema is None:
                raise ParseError(f"unknown context schema {sname!r}",
                                 t.line, t.col)
            self.expect(".")
            inner = scope.child()
            g = CtxVar(name)
            inner.cvars[name] = g
            return CtxAll(g, schema, self.parse_formula(inner))
        if self.at("{"):
            return self.parse_assertion(scope)
        self.err("expected a formula")

    def parse_assertion(self, scope: Scope) -> Atom:
        self.expect("{")
        g = self.parse_ctx_expr(scope)
        self.expect("|-")
        m = self.parse_term(scope)
        self.expect(":")
        a = self.parse_type(scope)
        self.expect("}")
        ann = self.parse_annotation()
        return Atom(g, m, a, ann)

    def parse_annotation(self) -> Optional[Annotation]:
        if self.at("*") or self.at("@"):
            kind = self.next().text
            idx = 1
            if self.at("num"):
                idx = int(self.next().text)
            return Annotation(kind, idx)
        return None

    def parse_ctx_expr(self, scope: Scope) -> CtxExpr:
        if self.at("."):
            self.next()
            return CtxExpr.empty()
        var = None
        entries = []
        first = True
        while True:
            t = self.expect("ident")
            if self.at(":"):
                self.next()
                head = scope.resolve_head(t.text)
                if not isinstance(head, Nominal):
                    raise ParseError(
                        f"context bindings use nominal constants, not {t.text!r}",
                        t.line, t.col)
                entries.append((head, self.parse_type(scope)))
            else:
                if not first or (t.text not in scope.cvars and not scope.lenient):
                    raise ParseError(f"unknown context variable {t.text!r}",
                                     t.line, t.col)
                var = scope.cvars.get(t.text) or CtxVar(t.text)
            first = False
            if self.at(","):
                self.next()
                continue
            break
        return CtxExpr(var, tuple(entries))

    # -- declarations -------------------------------------------------------------

    def parse_signature_items(self, sig: Signature) -> Signature:
        while not self.at("eof"):
            name = self.expect("ident").text
            self.expect(":")
            scope = Scope(sig, {})
            save = self.pos
            if self._classifier_is_kind(scope):
                self.pos = save
                k = self.parse_kind(scope)
                sig = sig.extended(TypeDecl(name, k))
            else:
                self.pos = save
                a = self.parse_type(scope)
                sig = sig.extended(TermDecl(name, a))
            self.expect(".")
        return sig

    def _classifier_is_kind(self, scope: Scope) -> bool:
        """Lookahead: a classifier is a kind exactly when it ends in `type`."""
        depth = 0
        i = self.pos
        last_ident = None
        while i < len(self.toks):
            t = self.toks[i]
            if t.kind in ("{", "(", "["):
                depth += 1
            elif t.kind in ("}", ")", "]"):
                depth -= 1
            elif t.kind == "." and depth == 0:
                break
            if t.kind == "ident":
                last_ident = t.text
            i += 1
        return last_ident == "type"

    def parse_schema_decl(self, scope: Scope) -> ContextSchema:
        """After the `Schema` keyword: `name := block | block ... .`"""
        name = self.expect("ident").text
        self.expect(":=")
        blocks = [self.parse_block_schema(scope)]
        while self.at("|"):
            self.next()
            blocks.append(self.parse_block_schema(scope))
        self.expect(".")
        return ContextSchema(tuple(blocks), name=name)

    def parse_block_schema(self, scope: Scope) -> BlockSchema:
        header = []
        inner = scope.child()
        if self.at("{"):
            self.next()
            while True:
                n = self.expect("ident").text
                self.expect(":")
                ar = self.parse_arity()
                v = Var(n)
                inner.vars[n] = v
                header.append((v, ar))
                if self.at(","):
                    self.next()
                    continue
                break
            self.expect("}")
        self.expect("(")
        body = []
        while True:
            n = self.expect("ident").text
            self.expect(":")
            a = self.parse_type(inner)
            v = Var(n)
            inner.vars[n] = v
            body.append((v, a))
            if self.at(","):
                self.next()
                continue
            break
        self.expect(")")
        return BlockSchema(tuple(header), tuple(body))


# ---------------------------------------------------------------------------
# File-level entry points

def parse_signature(text: str, base: Optional[Signature] = None) -> Signature:
    p = Parser(tokenize(text))
    return p.parse_signature_items(base or Signature())


@dataclass
class TheoremItem:
    name: str
    formula: Formula
    tactics: list[str]
    closed: bool  # True when the script ended with Qed


@dataclass
class TheoryFile:
    schemas: dict
    theorems: list[TheoremItem]


def parse_theory(text: str, sig: Signature,
                 schemas: Optional[dict] = None) -> TheoryFile:
    """A theory file: schema declarations and theorems with proof scripts."""
    schemas = dict(schemas or {})
    p = Parser(tokenize(text))
    theorems: list[TheoremItem] = []
    while not p.at("eof"):
        if p.at_ident("Schema"):
            p.next()
            sc = p.parse_schema_decl(Scope(sig, schemas))
            schemas[sc.name] = sc
            continue
        if p.at_ident("Theorem"):
            p.next()
            name = p.expect("ident").text
            p.expect(":")
            scope = Scope(sig, schemas)
            f = p.parse_formula(scope)
            p.expect(".")
            tactics, closed = _collect_tactics(p, sig, schemas)
            theorems.append(TheoremItem(name, f, tactics, closed))
            continue
        p.err("expected Schema or Theorem")
    return TheoryFile(schemas, theorems)


def _collect_tactics(p: Parser, sig: Signature,
                     schemas: dict) -> tuple[list[str], bool]:
    """Tactic sentences up to Qed or the next top-level item; boundaries
    are found by parsing each sentence with a lenient scope."""
    out = []
    lenient = Scope(sig, schemas, lenient=True)
    while not p.at("eof"):
        if p.at_ident("Qed"):
            p.next()
            p.expect(".")
            return out, True
        if p.at_ident("Theorem") or p.at_ident("Schema"):
            return out, False
        start = p.pos
        parse_tactic_core(p, lenient)
        end = p.pos
        p.expect(".")
        out.append(_render_tokens(p.toks[start:end]))
    return out, False


def _render_tokens(toks: list[Token]) -> str:
    parts = []
    for i, t in enumerate(toks):
        if parts and t.kind not in (")", "}", "]", ",", ".") \
                and (not parts or parts[-1][-1] not in "([{"):
            parts.append(" ")
        parts.append(t.text)
    return "".join(parts).strip()


# ---------------------------------------------------------------------------
# Tactic sentences (parsed against the focused sequent's display names)

@dataclass
class TacticCall:
    name: str
    args: dict


def goal_scope(sig: Signature, schemas: dict, sequent) -> Scope:
    """Names visible in a goal: its variables and context variables under
    their display names, plus signature constants and support nominals."""
    from .printer import sequent_namer
    namer = sequent_namer(sequent)
    scope = Scope(sig, schemas)
    for v, _ in sequent.psi:
        scope.vars[namer.name(v)] = v
    for d in sequent.xi:
        scope.cvars[namer.name(d.var)] = d.var
    return scope


def parse_tactic(text: str, sig: Signature, schemas: dict,
                 sequent) -> TacticCall:
    p = Parser(tokenize(text))
    scope = goal_scope(sig, schemas, sequent) if sequent is not None \
        else Scope(sig, schemas)
    call = parse_tactic_core(p, scope)
    if p.at("."):
        p.next()
    p.expect("eof")
    return call


def parse_tactic_core(p: Parser, scope: Scope) -> TacticCall:
    t = p.expect("ident")
    name = t.text
    if name == "ind":
        k = int(p.expect("num").text)
        return TacticCall("ind", {"k": k})
    if name == "intros":
        return TacticCall("intros", {})
    if name == "case":
        hyp = p.expect("ident").text
        keep = False
        if p.at("("):
            p.next()
            if p.at_ident("keep"):
                p.next()
                keep = True
            p.expect(")")
        return TacticCall("case", {"hyp": hyp, "keep": keep})
    if name == "exists":
        witness = p.parse_term(scope)
        return TacticCall("exists", {"witness": witness})
    if name == "search":
        depth = None
        if p.at("num"):
            depth = int(p.next().text)
        return TacticCall("search", {"depth": depth})
    if name == "assert":
        f = p.parse_formula(scope)
        return TacticCall("assert", {"formula": f})
    if name == "apply":
        lemma = p.expect("ident").text
        hyps = []
        withs = {}
        if p.at_ident("to"):
            p.next()
            while p.at("ident") and not p.at_ident("with"):
                hyps.append(p.next().text)
        if p.at_ident("with"):
            p.next()
            while True:
                key = p.expect("ident").text
                p.expect("=")
                if p.at("("):
                    save = p.pos
                    p.next()
                    try:
                        g = p.parse_ctx_expr(scope)
                        p.expect(")")
                        withs[key] = g
                    except ParseError:
                        p.pos = save
                        withs[key] = p.parse_term_arg(scope)
                else:
                    withs[key] = p.parse_term(scope)
                if p.at(","):
                    p.next()
                    continue
                break
        return TacticCall("apply", {"name": lemma, "to": hyps, "withs": withs})
    if name in ("split", "left", "right"):
        return TacticCall(name, {})
    if name == "clear":
        return TacticCall("clear", {"hyp": p.expect("ident").text})
    if name == "id":
        return TacticCall("id", {"hyp": p.expect("ident").text})
    if name == "weaken":
        hyp = p.expect("ident").text
        if not p.at_ident("with"):
            p.err("expected `with`")
        p.next()
        nt = p.expect("ident")
        nom = scope.resolve_head(nt.text)
        if not isinstance(nom, Nominal) and not scope.lenient:
            raise ParseError("weakening binds a nominal constant", nt.line, nt.col)
        p.expect(":")
        b = p.parse_type(scope)
        return TacticCall("weaken", {"hyp": hyp, "n": nom, "b": b})
    if name == "strengthen":
        return TacticCall("strengthen", {"hyp": p.expect("ident").text})
    if name == "permute":
        hyp = p.expect("ident").text
        nt = p.expect("ident")
        nom = scope.resolve_head(nt.text)
        if not isinstance(nom, Nominal) and not scope.lenient:
            raise ParseError("permutation names a nominal constant", nt.line, nt.col)
        return TacticCall("permute", {"hyp": hyp, "first": nom})
    if name == "inst":
        hyp = p.expect("ident").text
        if not p.at_ident("with"):
            p.err("expected `with`")
        p.next()
        nt = p.expect("ident")
        nom = scope.resolve_head(nt.text)
        if not isinstance(nom, Nominal) and not scope.lenient:
            raise ParseError("instantiation names a nominal constant",
                             nt.line, nt.col)
        p.expect("=")
        witness = p.parse_term(scope)
        by = None
        if p.at_ident("by"):
            p.next()
            by = p.expect("ident").text
        return TacticCall("inst", {"hyp": hyp, "n": nom, "witness": witness,
                                   "by": by})
    raise ParseError(f"unknown tactic {name!r}", t.line, t.col)
