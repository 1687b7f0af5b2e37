"""The canonical printer.  Binders print as `[x] M` and `{x : A} B`,
application is juxtaposition, assertions are `{G |- M : A}` with an
optional trailing annotation.  Variables print by their hints, primed as
needed for disambiguation; every surface that shows terms (REPL, session
protocol) goes through these functions, byte for byte.
"""

from __future__ import annotations

from typing import Optional

from .formulas import (All, And, Atom, Bot, CtxAll, CtxExpr, Formula, Imp,
                       Or, Top, _Quant)
from .sequents import Sequent
from .syntax import (ArityType, Arrow, Atm, AtomTy, Const, KType, Kind, Lam,
                     PiKind, PiTy, Term, Type, Var)


class Namer:
    """Assigns stable display names, disambiguating clashes with primes."""

    def __init__(self):
        self.byobj: dict = {}
        self.taken: set[str] = set()

    def name(self, v) -> str:
        hit = self.byobj.get(v)
        if hit is not None:
            return hit
        base = v.name or "x"
        cand = base
        while cand in self.taken:
            cand += "'"
        self.byobj[v] = cand
        self.taken.add(cand)
        return cand

    def scoped(self) -> "Namer":
        child = Namer()
        child.byobj = dict(self.byobj)
        child.taken = set(self.taken)
        return child


def print_arity(a: ArityType) -> str:
    if isinstance(a, Arrow):
        left = print_arity(a.left)
        if isinstance(a.left, Arrow):
            left = f"({left})"
        return f"{left} -> {print_arity(a.right)}"
    return "o"


def print_term(t: Term, namer: Optional[Namer] = None, atomic: bool = False) -> str:
    namer = namer or Namer()
    if isinstance(t, Lam):
        inner = namer.scoped()
        binders = []
        while isinstance(t, Lam):
            binders.append(inner.name(t.var))
            t = t.body
        body = print_term(t, inner)
        s = "".join(f"[{b}] " for b in binders) + body
        return f"({s})" if atomic else s
    assert isinstance(t, Atm)
    head = t.head
    if isinstance(head, Const):
        h = head.name
    elif isinstance(head, Var):
        h = namer.name(head)
    else:
        h = str(head)
    if not t.args:
        return h
    parts = [h] + [print_term(a, namer, atomic=True) for a in t.args]
    s = " ".join(parts)
    return f"({s})" if atomic else s


def print_type(a: Type, namer: Optional[Namer] = None, atomic: bool = False) -> str:
    namer = namer or Namer()
    if isinstance(a, AtomTy):
        if not a.args:
            return a.head
        parts = [a.head] + [print_term(m, namer, atomic=True) for m in a.args]
        s = " ".join(parts)
        return f"({s})" if atomic else s
    assert isinstance(a, PiTy)
    if a.var in a.cod.fv:
        inner = namer.scoped()
        v = inner.name(a.var)
        s = f"{{{v} : {print_type(a.dom, namer)}}} {print_type(a.cod, inner)}"
    else:
        dom = print_type(a.dom, namer, atomic=isinstance(a.dom, PiTy))
        s = f"{dom} -> {print_type(a.cod, namer)}"
    return f"({s})" if atomic else s


def print_kind(k: Kind, namer: Optional[Namer] = None) -> str:
    namer = namer or Namer()
    if isinstance(k, KType):
        return "type"
    assert isinstance(k, PiKind)
    if k.var in k.body.fv:
        inner = namer.scoped()
        v = inner.name(k.var)
        return f"{{{v} : {print_type(k.dom, namer)}}} {print_kind(k.body, inner)}"
    dom = print_type(k.dom, namer, atomic=isinstance(k.dom, PiTy))
    return f"{dom} -> {print_kind(k.body, namer)}"


def print_ctx_expr(g: CtxExpr, namer: Optional[Namer] = None) -> str:
    namer = namer or Namer()
    parts = []
    if g.var is not None:
        parts.append(namer.name(g.var))
    for n, a in g.entries:
        parts.append(f"{n}:{print_type(a, namer, atomic=isinstance(a, PiTy))}")
    return ", ".join(parts) if parts else "."


def print_formula(f: Formula, namer: Optional[Namer] = None,
                  prec: int = 0) -> str:
    """prec: 0 top, 1 inside or, 2 inside and, 3 atomic position."""
    namer = namer or Namer()
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Atom):
        ann = str(f.ann) if f.ann else ""
        return (f"{{{print_ctx_expr(f.ctx, namer)} |- "
                f"{print_term(f.term, namer)} : {print_type(f.ty, namer)}}}{ann}")
    if isinstance(f, Imp):
        s = f"{print_formula(f.left, namer, 1)} => {print_formula(f.right, namer, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(f, Or):
        s = f"{print_formula(f.left, namer, 2)} \\/ {print_formula(f.right, namer, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(f, And):
        s = f"{print_formula(f.left, namer, 3)} /\\ {print_formula(f.right, namer, 2)}"
        return f"({s})" if prec > 2 else s
    if isinstance(f, CtxAll):
        inner = namer.scoped()
        v = inner.name(f.var)
        s = f"ctx {v} : {f.schema.name or '?'}. {print_formula(f.body, inner)}"
        return f"({s})" if prec > 0 else s
    if isinstance(f, _Quant):
        word = "forall" if isinstance(f, All) else "exists"
        inner = namer.scoped()
        v = inner.name(f.var)
        s = (f"{word} {v} : {print_arity(f.arity)}. "
             f"{print_formula(f.body, inner)}")
        return f"({s})" if prec > 0 else s
    raise TypeError(f"print_formula: unsupported {f!r}")


def sequent_namer(s: Sequent) -> Namer:
    namer = Namer()
    for d in s.xi:
        namer.name(d.var)
    for v, _ in s.psi:
        namer.name(v)
    return namer


def print_sequent(s: Sequent) -> str:
    namer = sequent_namer(s)
    lines = []
    if s.psi:
        vars_s = ", ".join(f"{namer.name(v)}:{print_arity(ar)}" for v, ar in s.psi)
        lines.append(f"Vars: {vars_s}")
    if s.support:
        lines.append("Nominals: " + ", ".join(
            f"{n}:{print_arity(n.arity)}" for n in s.support))
    for d in s.xi:
        banned = "{" + ", ".join(str(n) for n in sorted(
            d.banned, key=lambda n: n.order_key())) + "}"
        blocks = "; ".join(
            ", ".join(f"{n}:{print_type(a, namer, atomic=isinstance(a, PiTy))}"
                      for n, a in b)
            for b in d.cvt.blocks)
        schema = d.cvt.schema.name or "?"
        lines.append(f"Context: {namer.name(d.var)} : {banned} |> {schema}[{blocks}]")
    for h in s.hyps:
        lines.append(f"{h.name} : {print_formula(h.formula, namer)}")
    lines.append("=" * 50)
    lines.append(print_formula(s.goal, namer))
    return "\n".join(lines)


def print_goals(goals) -> str:
    if not goals:
        return "Proof completed."
    head = print_sequent(goals[0].sequent)
    if len(goals) == 1:
        return head + "\n\n(1 goal)"
    return head + f"\n\n({len(goals)} goals)"
