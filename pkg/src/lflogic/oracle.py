"""Desk-scale brute-force semantics used for testing: exhaustive
enumeration of canonical inhabitants up to a size bound, validity of
closed quantifier-free formulas, and a direct bidirectional checker kept
independent of the focused kernel path.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional

from .formulas import (Atom, Bot, CtxExpr, Formula, Imp, And, Or, Top,
                       _Quant, CtxAll, HeightAssignment)
from .kernel import CheckError, Kernel
from .subst import Subst, hsubst_term, hsubst_type
from .syntax import (Atm, AtomTy, Const, Lam, LFContext, Nominal, PiTy,
                     Signature, Term, Type, Var, alpha_eq, erase, eta_expand,
                     fresh_nominal)


class UnsupportedInput(Exception):
    """The oracle only decides closed quantifier-free formulas."""


def term_size(m: Term) -> int:
    if isinstance(m, Lam):
        return 1 + term_size(m.body)
    return 1 + sum(term_size(a) for a in m.args)


# ---------------------------------------------------------------------------
# Enumeration of canonical inhabitants

def enumerate_terms(sig: Signature, ctx: LFContext, a: Type,
                    max_size: int) -> list[Term]:
    """Exactly the well-typed canonical inhabitants of `a` up to the size
    bound, without duplicates modulo renaming."""
    kernel = Kernel(sig, check_sig=False)
    out: list[Term] = []
    seen = set()
    for m in _inhabit(kernel, ctx, a, max_size):
        if m in seen:
            continue
        seen.add(m)
        kernel.check_term(ctx, m, a)
        out.append(m)
    return out


def _inhabit(kernel: Kernel, ctx: LFContext, a: Type, budget: int) -> Iterator[Term]:
    if budget <= 0:
        return
    if isinstance(a, PiTy):
        n = fresh_nominal(erase(a.dom), ctx.noms() | a.noms)
        opened = eta_expand(n, erase(a.dom))
        cod = hsubst_type(Subst.of((a.var, opened, erase(a.dom))), a.cod)
        if cod is None:
            return
        for body in _inhabit(kernel, ctx.extended(n, a.dom), cod, budget - 1):
            v = Var("x")
            yield Lam(v, _close_nominal(body, n, v))
        return
    assert isinstance(a, AtomTy)
    heads: list[tuple[object, Type]] = [(Const(d.name), d.ty)
                                        for d in kernel.sig.term_decls()]
    heads += [(k, t) for k, t in ctx.entries if isinstance(k, Nominal)]
    for head, classifier in heads:
        yield from _inhabit_spine(kernel, ctx, head, classifier, a, budget)


def _inhabit_spine(kernel: Kernel, ctx: LFContext, head, classifier: Type,
                   target: AtomTy, budget: int) -> Iterator[Term]:
    def go(rest: Type, args: tuple[Term, ...], left: int) -> Iterator[Term]:
        if isinstance(rest, AtomTy):
            if alpha_eq(rest, target):
                yield Atm(head, args)
            return
        assert isinstance(rest, PiTy)
        for m in _inhabit(kernel, ctx, rest.dom, left):
            used = term_size(m)
            cod = hsubst_type(Subst.of((rest.var, m, erase(rest.dom))), rest.cod)
            if cod is None:
                continue
            yield from go(cod, args + (m,), left - used)

    # heads whose final target constant differs can never produce the goal
    _, base = _strip(classifier)
    if isinstance(base, AtomTy) and base.head != target.head:
        return
    yield from go(classifier, (), budget - 1)


def _strip(a: Type):
    binders = []
    while isinstance(a, PiTy):
        binders.append((a.var, a.dom))
        a = a.cod
    return binders, a


def _close_nominal(m: Term, n: Nominal, v: Var) -> Term:
    if isinstance(m, Lam):
        return Lam(m.var, _close_nominal(m.body, n, v))
    head = v if m.head == n else m.head
    return Atm(head, tuple(_close_nominal(a, n, v) for a in m.args))


# ---------------------------------------------------------------------------
# A direct implementation of the atomic-term rules, independent of the
# focused path: synthesis walks the spine one application at a time.

def naive_synth(sig: Signature, ctx: LFContext, r: Atm) -> Optional[Type]:
    if isinstance(r.head, Const):
        a = sig.lookup_term(r.head.name)
    else:
        a = ctx.lookup(r.head)
    if a is None:
        return None
    for m in r.args:
        if not isinstance(a, PiTy):
            return None
        if not naive_check(sig, ctx, m, a.dom):
            return None
        a = hsubst_type(Subst.of((a.var, m, erase(a.dom))), a.cod)
        if a is None:
            return None
    return a


def naive_check(sig: Signature, ctx: LFContext, m: Term, a: Type) -> bool:
    if isinstance(m, Lam):
        if not isinstance(a, PiTy):
            return False
        n = fresh_nominal(erase(a.dom), ctx.noms() | m.noms | a.noms)
        opened = eta_expand(n, erase(a.dom))
        body = hsubst_term(Subst.of((m.var, opened, erase(a.dom))), m.body)
        cod = hsubst_type(Subst.of((a.var, opened, erase(a.dom))), a.cod)
        if body is None or cod is None:
            return False
        return naive_check(sig, ctx.extended(n, a.dom), body, cod)
    if not isinstance(a, AtomTy):
        return False
    s = naive_synth(sig, ctx, m)
    return s is not None and alpha_eq(s, a)


# ---------------------------------------------------------------------------
# Validity of closed quantifier-free formulas

def _ctx_to_lf(g: CtxExpr) -> LFContext:
    if g.var is not None:
        raise UnsupportedInput("context expression still has a variable part")
    return LFContext(tuple(g.entries))


def atom_height(sig: Signature, f: Atom) -> Optional[int]:
    """Height of the typing derivation for the assertion, or None when it
    has none (or the context/type are malformed)."""
    kernel = Kernel(sig, check_sig=False)
    try:
        lf = _ctx_to_lf(f.ctx)
        kernel.check_context(lf)
        kernel.check_type(lf, f.ty)
        d = kernel.check_term(lf, f.term, f.ty)
        return d.height
    except CheckError:
        return None


def oracle_valid(sig: Signature, f: Formula,
                 upsilon: HeightAssignment = HeightAssignment()) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Imp):
        return not oracle_valid(sig, f.left, upsilon) or \
            oracle_valid(sig, f.right, upsilon)
    if isinstance(f, And):
        return oracle_valid(sig, f.left, upsilon) and \
            oracle_valid(sig, f.right, upsilon)
    if isinstance(f, Or):
        return oracle_valid(sig, f.left, upsilon) or \
            oracle_valid(sig, f.right, upsilon)
    if isinstance(f, Atom):
        h = atom_height(sig, f)
        if h is None:
            return False
        if f.ann is None:
            return True
        bound = upsilon(f.ann.idx)
        return h <= bound if f.ann.kind == "@" else h < bound
    if isinstance(f, (CtxAll, _Quant)):
        raise UnsupportedInput("the oracle does not decide quantified formulas")
    raise TypeError(f"oracle_valid: unsupported formula {f!r}")


def oracle_sequent_valid(sig: Signature, hyp_formulas: Iterable[Formula],
                         goal: Formula,
                         upsilon: HeightAssignment = HeightAssignment()) -> bool:
    for h in hyp_formulas:
        if not oracle_valid(sig, h, upsilon):
            return True
    return oracle_valid(sig, goal, upsilon)
