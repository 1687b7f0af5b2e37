"""Case analysis over atomic assumption formulas: elaboration of context
variables by one block, enumeration of head candidates, reduction of an
assumption through its head's classifier, and the complete analysis that
drives the left rule for atomic formulas.  Also the decomposition of a
type into the typing obligations used by the context-weakening rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .formulas import Annotation, Atom, CtxExpr, Formula
from .schemas import BlockSchema, CtxVarType, _body_with_names
from .sequents import (AppliedSubst, CtxVarDecl, Hyp, Sequent, SequentError,
                       apply_term_subst, mk_sequent, raise_psi)
from .subst import Subst, hsubst_type
from .syntax import (ArityCtx, ArityType, Atm, AtomTy, Const, Nominal, PiTy,
                     Signature, Term, Type, Var, erase, eta_expand,
                     fresh_nominal, induced_arity_context, kind_strip,
                     pi_strip)
from .unify import (Equation, NoSolution, OutsideFragment, Solution,
                    UnifProblem, generalized_var, solve)


class CaseAnalysisError(Exception):
    """Raised when a rule application cannot proceed; carries the reason
    (for instance a unification problem outside the decidable fragment)."""


# ---------------------------------------------------------------------------
# Name choices for block elaboration

def names_lists(tys: Iterable[ArityType], known: Iterable[Nominal],
                bound: Iterable[Nominal]) -> list[tuple[Nominal, ...]]:
    """All name choices for the given arities: every known name of the
    right arity, plus one fresh representative, the names within one
    choice being distinct."""
    tys = list(tys)
    known = list(dict.fromkeys(known))
    bound = set(bound)

    def go(rest: list[ArityType], taken: set) -> list[tuple[Nominal, ...]]:
        if not rest:
            return [()]
        ar, rest2 = rest[0], rest[1:]
        picks = [n for n in known if n.arity == ar and n not in taken]
        fresh = fresh_nominal(ar, set(known) | taken)
        picks.append(fresh)
        out = []
        for n in picks:
            for tail in go(rest2, taken | {n}):
                out.append((n,) + tail)
        return out

    return go(tys, set(bound))


# ---------------------------------------------------------------------------
# Block elaboration

@dataclass(frozen=True)
class HeadCase:
    sequent: Sequent
    head: object          # Const or Nominal
    classifier: Type
    focus: str            # name of the focused assumption in `sequent`


def add_block(sig: Signature, s: Sequent, decl: CtxVarDecl, block: BlockSchema,
              ns: list[Nominal], nprime: Iterable[Nominal], j: int,
              i: int) -> tuple[Sequent, Nominal, Type]:
    """Insert one instantiated block at position `j` of the context
    variable's type and return the `i`-th new binding as the head.

    The surviving term variables are raised over the genuinely new names;
    the block's header variables become fresh variables raised over every
    name their instantiations may use.
    """
    if len(ns) != len(block.body):
        raise CaseAnalysisError("name choice does not match the block body")
    if len(set(ns)) != len(ns):
        raise CaseAnalysisError("block names must be distinct")
    if any(n in decl.banned for n in ns):
        raise CaseAnalysisError("block names must avoid the prohibited set")
    support = set(s.support)
    new_names = [n for n in ns if n not in support]
    psi1, theta1 = raise_psi(s.psi, sorted(new_names, key=lambda n: n.order_key()))

    templates = _body_with_names(block, ns)
    if templates is None:
        raise CaseAnalysisError("block body does not normalize")

    blocks_before = s.xi_map()[decl.var].cvt.blocks[:j]
    n_j = set()
    for b in blocks_before:
        for n, _ in b:
            n_j.add(n)
    raise_over = sorted(set(nprime) | n_j | set(new_names),
                        key=lambda n: n.order_key())
    header_pairs = [(x, ar) for x, ar in block.header]
    psi2, theta2 = raise_psi(header_pairs, raise_over)

    new_block = []
    for n, tmpl in zip(ns, templates):
        t2 = hsubst_type(theta2, tmpl)
        if t2 is None:
            raise CaseAnalysisError("block type does not normalize")
        new_block.append((n, t2))
    new_block = tuple(new_block)

    def on_cvt(cvt: CtxVarType) -> CtxVarType:
        blocks = []
        for b in cvt.blocks:
            entries = []
            for n, a in b:
                a2 = hsubst_type(theta1, a)
                if a2 is None:
                    raise CaseAnalysisError("context block does not normalize")
                entries.append((n, a2))
            blocks.append(tuple(entries))
        return CtxVarType(cvt.schema, tuple(blocks))

    xi2 = []
    for d in s.xi:
        if d.var == decl.var:
            old = on_cvt(d.cvt).blocks
            blocks = old[:j] + (new_block,) + old[j:]
            xi2.append(CtxVarDecl(d.var, d.banned, CtxVarType(d.cvt.schema, blocks)))
        else:
            xi2.append(CtxVarDecl(d.var, d.banned, on_cvt(d.cvt)))

    from .formulas import hsubst_formula
    hyps2 = []
    for h in s.hyps:
        f2 = hsubst_formula(theta1, h.formula)
        if f2 is None:
            raise CaseAnalysisError("assumption does not normalize")
        hyps2.append(Hyp(h.name, f2))
    goal2 = hsubst_formula(theta1, s.goal)
    if goal2 is None:
        raise CaseAnalysisError("goal does not normalize")

    out = mk_sequent(tuple(s.support) + tuple(ns), tuple(psi1) + tuple(psi2),
                     tuple(xi2), tuple(hyps2), goal2)
    return out, ns[i - 1], new_block[i - 1][1]


# ---------------------------------------------------------------------------
# Head enumeration

def explicit_bindings(s: Sequent, g: CtxExpr) -> list[tuple[Nominal, Type]]:
    """The bindings visible in a context expression, including the blocks
    already recorded for its leading variable."""
    out: list[tuple[Nominal, Type]] = []
    if g.var is not None:
        decl = s.xi_map().get(g.var)
        if decl is None:
            raise SequentError(f"unbound context variable {g.var}")
        for b in decl.cvt.blocks:
            out.extend(b)
    out.extend(g.entries)
    return out


def implicit_heads(sig: Signature, s: Sequent, focus: str) -> list[HeadCase]:
    f = s.hyp(focus).formula
    assert isinstance(f, Atom)
    g = f.ctx
    if g.var is None:
        return []
    decl = s.xi_map()[g.var]
    bound = {n for n, _ in explicit_bindings(s, g)}
    known = [n for n in s.support if n not in decl.banned and n not in bound]
    out: list[HeadCase] = []
    for block in decl.cvt.schema.blocks:
        arities_ = [erase(a) for _, a in block.body]
        for ns in names_lists(arities_, known, decl.banned | bound):
            for j in range(len(decl.cvt.blocks) + 1):
                for i in range(1, len(block.body) + 1):
                    s2, head, classifier = add_block(
                        sig, s, decl, block, list(ns), known, j, i)
                    out.append(HeadCase(s2, head, classifier, focus))
    return out


def heads(sig: Signature, s: Sequent, focus: str) -> list[HeadCase]:
    f = s.hyp(focus).formula
    assert isinstance(f, Atom)
    out = [HeadCase(s, Const(d.name), d.ty, focus) for d in sig.term_decls()]
    for n, a in explicit_bindings(s, f.ctx):
        out.append(HeadCase(s, n, a, focus))
    out.extend(implicit_heads(sig, s, focus))
    return out


# ---------------------------------------------------------------------------
# Reduction of an assumption through its head's classifier

def classifier_in(sig: Signature, s: Sequent, g: CtxExpr, head) -> Optional[Type]:
    if isinstance(head, Const):
        return sig.lookup_term(head.name)
    if isinstance(head, Nominal):
        for n, a in reversed(explicit_bindings(s, g)):
            if n == head:
                return a
    return None


def reduce_seq(sig: Signature, s: Sequent, focus: str,
               star: Optional[int] = None) -> tuple[Sequent, list[str]]:
    """Replace the focused assumption `{G |- h M1..Mn : P}` by the
    argument obligations `{G |- Mi : Ai'}`; under `star`, annotate them."""
    f = s.hyp(focus).formula
    if not isinstance(f, Atom) or not isinstance(f.term, Atm) \
            or not isinstance(f.ty, AtomTy):
        raise CaseAnalysisError("focus must be an atomic assumption at an atomic type")
    r = f.term
    a = classifier_in(sig, s, f.ctx, r.head)
    if a is None:
        raise CaseAnalysisError(f"head {r.head} has no classifier in scope")
    binders, _ = pi_strip(a)
    if len(binders) != len(r.args):
        raise CaseAnalysisError("spine length does not match the classifier")
    ann = Annotation("*", star) if star is not None else None
    theta = Subst()
    obligations = []
    for (x, ai), m in zip(binders, r.args):
        ai2 = hsubst_type(theta, ai)
        if ai2 is None:
            raise CaseAnalysisError("argument obligation does not normalize")
        obligations.append(Atom(f.ctx, m, ai2, ann))
        theta = Subst(theta.triples() + [(x, m, erase(ai))])
    hyps = [h for h in s.hyps if h.name != focus]
    taken = {h.name for h in hyps}
    new_names = []
    for ob in obligations:
        if any(ob == h.formula for h in hyps):
            continue
        i = 1
        while f"H{i}" in taken:
            i += 1
        taken.add(f"H{i}")
        new_names.append(f"H{i}")
        hyps.append(Hyp(f"H{i}", ob))
    out = mk_sequent(s.support, s.psi, s.xi, tuple(hyps), s.goal)
    return out, new_names


# ---------------------------------------------------------------------------
# Complete analysis

@dataclass(frozen=True)
class CaseBranch:
    sequent: Sequent
    head: object
    solution: Solution
    applied: AppliedSubst
    new_hyps: tuple[str, ...]
    origin: HeadCase
    focus_image: object = None


def case_problem(theta0: ArityCtx, hc: HeadCase) -> tuple[UnifProblem, list]:
    """The unification problem forcing the focused term to have the
    candidate head, over generalized variables for the head's arguments."""
    s = hc.sequent
    f = s.hyp(hc.focus).formula
    assert isinstance(f, Atom)
    binders, target = pi_strip(hc.classifier)
    psi_vars = [x for x, _ in s.psi]
    zs: list[tuple[Var, ArityType]] = []
    ts: list[Term] = []
    for x, ai in binders:
        hint = x.name.lower() if x.name and x.name != "_" else "a"
        z, zar, t = generalized_var(erase(ai), psi_vars + [v for v, _ in zs],
                                    s.support, hint=hint)
        zs.append((z, zar))
        ts.append(t)
    gen = Subst([(x, t, erase(ai)) for (x, ai), t in zip(binders, ts)])
    target_inst = hsubst_type(gen, target)
    if target_inst is None:
        raise CaseAnalysisError("classifier target does not normalize")
    spine = Atm(hc.head, tuple(ts))
    eqs = (Equation(f.ty, target_inst, None),
           Equation(f.term, spine, erase(f.ty)))
    return UnifProblem(frozenset(s.support), tuple(s.psi) + tuple(zs), eqs), zs


def all_cases(sig: Signature, s: Sequent, focus: str,
              star: Optional[int] = None) -> list[CaseBranch]:
    """One branch per head candidate whose unification problem has a
    solution; each branch is the solved sequent with the focused
    assumption reduced through the head's classifier."""
    theta0 = induced_arity_context(sig)
    out: list[CaseBranch] = []
    for hc in heads(sig, s, focus):
        prob, zs = case_problem(theta0, hc)
        res = solve(prob, theta0, sig)
        if isinstance(res, OutsideFragment):
            raise CaseAnalysisError(
                f"analysis at head {hc.head} leaves the pattern fragment: {res.reason}")
        if isinstance(res, NoSolution):
            continue
        focus_formula = hc.sequent.hyp(hc.focus).formula
        applied = apply_term_subst(sig, hc.sequent, res.theta, res.psi)
        img = applied.raising
        f_img = None
        from .formulas import hsubst_formula
        f1 = hsubst_formula(res.theta, focus_formula)
        f_img = hsubst_formula(img, f1) if f1 is not None else None
        if f_img is None:
            raise CaseAnalysisError("focused assumption does not normalize")
        target = None
        for h in applied.sequent.hyps:
            if h.formula == f_img:
                target = h.name
                break
        if target is None:
            raise CaseAnalysisError("focused assumption lost during substitution")
        reduced, new_names = reduce_seq(sig, applied.sequent, target, star=star)
        out.append(CaseBranch(reduced, hc.head, res, applied,
                              tuple(new_names), hc, f_img))
    return out


# ---------------------------------------------------------------------------
# Type decomposition (context-weakening obligations)

def type_decompose(sig: Signature, support: Iterable[Nominal],
                   xi: Iterable[CtxVarDecl], g: CtxExpr,
                   b: Type) -> list[tuple[tuple[Nominal, ...], tuple[CtxVarDecl, ...], Formula]]:
    """Obligations whose validity forces the type `b` to be well formed
    over `g`: one per argument at an atomic head, recursing through
    binders with deterministically chosen fresh names."""
    support = tuple(support)
    xi = tuple(xi)
    if isinstance(b, AtomTy):
        k = sig.lookup_type(b.head)
        if k is None:
            raise CaseAnalysisError(f"unbound type constant {b.head}")
        binders = kind_strip(k)
        theta = Subst()
        out = []
        for (x, ai), m in zip(binders, b.args):
            ai2 = hsubst_type(theta, ai)
            if ai2 is None:
                raise CaseAnalysisError("kind instance does not normalize")
            out.append((support, xi, Atom(g, m, ai2)))
            theta = Subst(theta.triples() + [(x, m, erase(ai))])
        return out
    if isinstance(b, PiTy):
        n = fresh_nominal(erase(b.dom), support)
        opened = eta_expand(n, erase(b.dom))
        cod = hsubst_type(Subst.of((b.var, opened, erase(b.dom))), b.cod)
        if cod is None:
            raise CaseAnalysisError("binder body does not normalize")
        xi2 = tuple(CtxVarDecl(d.var, d.banned | {n}, d.cvt)
                    if g.var == d.var else d for d in xi)
        g2 = g.extended(n, b.dom)
        return (type_decompose(sig, support, xi, g, b.dom)
                + type_decompose(sig, support + (n,), xi2, g2, cod))
    raise CaseAnalysisError(f"not a type: {b!r}")
