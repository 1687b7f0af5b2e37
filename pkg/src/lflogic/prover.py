"""Proof states and checked rule applications.

Every rule checks all of its non-sequent premises; nothing is applied on
faith.  A tactic either fails without touching the state or commits a
sequence of primitive rules.  Goals carry stable identifiers; tactics act
on the focused goal.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional

from . import arities
from .cases import (CaseAnalysisError, all_cases, classifier_in,
                    type_decompose)
from .formulas import (All, And, Annotation, Atom, Bot, CtxAll, CtxExpr,
                       CtxVar, Ex, Formula, Imp, Or, Top, ctxsubst_formula,
                       formula_noms, formula_strength, hsubst_formula,
                       wf_formula, FormulaError)
from .schemas import CtxVarType, SchemaError, ctxty_instance, wf_ctxvar_ty
from .sequents import (CtxVarDecl, Hyp, Sequent, SequentError, add_hyps,
                       arity_env, drop_hyp, mk_sequent, wf_sequent)
from .subst import Permutation, Subst, hsubst_term, hsubst_type
from .syntax import (ALL_NOMINALS, Atm, AtomTy, Lam, NameSet, Nominal,
                     PiTy, Signature, Term, Var, alpha_eq, erase, eta_expand,
                     fresh_nominal, pi_strip)

RULE_IDS = [
    "wk", "cont", "ctx-str", "ctx-wk", "id", "cut",
    "top-R", "bot-L", "and-R", "and-L1", "and-L2", "or-R1", "or-R2", "or-L",
    "imp-R", "imp-L", "all-R", "all-L", "ex-R", "ex-L", "ctx-R", "ctx-L",
    "atm-app-L", "atm-app-R", "atm-abs-L", "atm-abs-R",
    "atm-app-L*", "atm-app-R*", "atm-abs-L*", "atm-abs-R*",
    "ind", "lf-wk", "lf-str", "lf-perm", "lf-inst",
]


class RuleError(Exception):
    """A rule's side condition failed; the message names the premise."""


@dataclass(frozen=True)
class Goal:
    gid: int
    sequent: Sequent


@dataclass(frozen=True)
class ProofState:
    sig: Signature
    goals: tuple[Goal, ...]
    next_gid: int = 1
    log: tuple[str, ...] = ()
    lemmas: tuple[tuple[str, Formula], ...] = ()
    next_ann: int = 1

    def focused(self) -> Goal:
        if not self.goals:
            raise RuleError("no goals left")
        return self.goals[0]

    def lemma_map(self) -> dict:
        return dict(self.lemmas)

    def done(self) -> bool:
        return not self.goals


def initial_state(sig: Signature, goal: Formula,
                  lemmas: Iterable[tuple[str, Formula]] = ()) -> ProofState:
    support = sorted(formula_noms(goal), key=lambda n: n.order_key())
    s = mk_sequent(support, [], [], [], goal)
    wf_sequent(sig, s)
    return ProofState(sig, (Goal(1, s),), next_gid=2, lemmas=tuple(lemmas))


def _commit(state: ProofState, subgoals: list[Sequent], note: str) -> ProofState:
    for sub in subgoals:
        wf_sequent(state.sig, sub)
    g = state.focused()
    new = tuple(Goal(state.next_gid + i, s) for i, s in enumerate(subgoals))
    return replace(state,
                   goals=new + state.goals[1:],
                   next_gid=state.next_gid + len(subgoals),
                   log=state.log + (note,))


# ---------------------------------------------------------------------------
# Structural rules

def rule_wk(sig: Signature, s: Sequent, hyp: str) -> list[Sequent]:
    s.hyp(hyp)
    return [drop_hyp(s, hyp)]


def rule_cont(sig: Signature, s: Sequent, hyp: str) -> list[Sequent]:
    s.hyp(hyp)
    return [s]


def rule_ctx_str(sig: Signature, s: Sequent, new_noms: Iterable[Nominal],
                 new_psi: Iterable[tuple[Var, object]],
                 new_xi: Iterable[CtxVarDecl],
                 promote: Optional[dict] = None) -> list[Sequent]:
    """Strengthen bottom-up: the subgoal carries extra names, variables,
    context variables, and possibly enlarged prohibition sets."""
    new_noms = list(new_noms)
    promote = promote or {}
    if set(new_noms) & set(s.support):
        raise RuleError("strengthening names must be new to the support set")
    if {v for v, _ in new_psi} & {v for v, _ in s.psi}:
        raise RuleError("strengthening variables must be new")
    if {d.var for d in new_xi} & {d.var for d in s.xi}:
        raise RuleError("strengthening context variables must be new")
    xi2 = []
    for d in s.xi:
        extra = frozenset(promote.get(d.var, ()))
        if not extra <= set(new_noms):
            raise RuleError("promoted prohibitions must come from the new names")
        xi2.append(CtxVarDecl(d.var, d.banned | extra, d.cvt))
    sup2 = tuple(s.support) + tuple(new_noms)
    psi2 = tuple(s.psi) + tuple(new_psi)
    for d in new_xi:
        try:
            wf_ctxvar_ty(NameSet.of(set(sup2) - d.banned), psi2, sig, d.cvt)
        except SchemaError as e:
            raise RuleError(f"new context variable {d.var}: {e}")
    out = mk_sequent(sup2, psi2, tuple(xi2) + tuple(new_xi), s.hyps, s.goal)
    return [out]


def rule_ctx_wk(sig: Signature, s: Sequent, drop_noms: Iterable[Nominal],
                drop_psi: Iterable[Var], drop_xi: Iterable[CtxVar]) -> list[Sequent]:
    """Weaken bottom-up: the subgoal forgets unused names, variables, and
    context variables; every formula must remain well formed."""
    drop_noms = set(drop_noms)
    drop_psi = set(drop_psi)
    drop_xi = set(drop_xi)
    sup2 = tuple(n for n in s.support if n not in drop_noms)
    psi2 = tuple((v, a) for v, a in s.psi if v not in drop_psi)
    xi2 = tuple(CtxVarDecl(d.var, d.banned - drop_noms, d.cvt)
                for d in s.xi if d.var not in drop_xi)
    out = mk_sequent(sup2, psi2, xi2, s.hyps, s.goal)
    try:
        wf_sequent(sig, out)
    except SequentError as e:
        raise RuleError(f"weakening premise fails: {e}")
    return [out]


# ---------------------------------------------------------------------------
# Axiom and cut

def rule_id(sig: Signature, s: Sequent, hyp: str,
            pi: Permutation = Permutation.identity()) -> list[Sequent]:
    if not pi.support() <= set(s.support):
        raise RuleError("permutation must move only support-set names")
    f2 = s.hyp(hyp).formula
    if not formula_strength(s.xi_banned(), pi, f2, s.goal):
        raise RuleError(f"hypothesis {hyp} is not at least as strong as the goal")
    return []


def rule_cut(sig: Signature, s: Sequent, f2: Formula,
             name: str = "") -> list[Sequent]:
    env = arity_env(sig, s)
    try:
        wf_formula(env, {d.var for d in s.xi}, sig, f2)
    except FormulaError as e:
        raise RuleError(f"cut formula is not well formed: {e}")
    lemma_goal = mk_sequent(s.support, s.psi, s.xi, s.hyps, f2)
    main = add_hyps(s, [f2], base=name or "H")
    return [lemma_goal, main]


# ---------------------------------------------------------------------------
# Logical rules

def rule_top_r(sig: Signature, s: Sequent) -> list[Sequent]:
    if not isinstance(s.goal, Top):
        raise RuleError("goal is not the trivial formula")
    return []


def rule_bot_l(sig: Signature, s: Sequent, hyp: str) -> list[Sequent]:
    if not isinstance(s.hyp(hyp).formula, Bot):
        raise RuleError(f"hypothesis {hyp} is not absurd")
    return []


def rule_and_r(sig: Signature, s: Sequent) -> list[Sequent]:
    if not isinstance(s.goal, And):
        raise RuleError("goal is not a conjunction")
    return [replace(s, goal=s.goal.left), replace(s, goal=s.goal.right)]


def rule_and_l(sig: Signature, s: Sequent, hyp: str, side: int,
               keep: bool = False) -> list[Sequent]:
    f = s.hyp(hyp).formula
    if not isinstance(f, And):
        raise RuleError(f"hypothesis {hyp} is not a conjunction")
    part = f.left if side == 1 else f.right
    base = s if keep else drop_hyp(s, hyp)
    return [add_hyps(base, [part])]


def rule_or_r(sig: Signature, s: Sequent, side: int) -> list[Sequent]:
    if not isinstance(s.goal, Or):
        raise RuleError("goal is not a disjunction")
    return [replace(s, goal=s.goal.left if side == 1 else s.goal.right)]


def rule_or_l(sig: Signature, s: Sequent, hyp: str,
              keep: bool = False) -> list[Sequent]:
    f = s.hyp(hyp).formula
    if not isinstance(f, Or):
        raise RuleError(f"hypothesis {hyp} is not a disjunction")
    base = s if keep else drop_hyp(s, hyp)
    return [add_hyps(base, [f.left]), add_hyps(base, [f.right])]


def rule_imp_r(sig: Signature, s: Sequent) -> list[Sequent]:
    if not isinstance(s.goal, Imp):
        raise RuleError("goal is not an implication")
    return [replace(add_hyps(s, [s.goal.left]), goal=s.goal.right)]


def rule_imp_l(sig: Signature, s: Sequent, hyp: str,
               keep: bool = False) -> list[Sequent]:
    f = s.hyp(hyp).formula
    if not isinstance(f, Imp):
        raise RuleError(f"hypothesis {hyp} is not an implication")
    base = s if keep else drop_hyp(s, hyp)
    minor = replace(base, goal=f.left)
    major = add_hyps(base, [f.right])
    return [minor, major]


def _raise_over_support(s: Sequent, var: Var, ar) -> tuple[Var, Term, object]:
    """A fresh variable abstracting the whole support listing, and the
    spine it stands for."""
    names = {v.name for v, _ in s.psi}
    base = var.name
    name = base
    i = 1
    while name in names:
        i += 1
        name = f"{base}{i}"
    y = Var(name)
    raised = ar
    from .syntax import Arrow
    for n in reversed(s.support):
        raised = Arrow(n.arity, raised)
    spine = eta_expand(y, ar, tuple(eta_expand(n, n.arity) for n in s.support))
    return y, spine, raised


def rule_all_r(sig: Signature, s: Sequent) -> list[Sequent]:
    if not isinstance(s.goal, All):
        raise RuleError("goal is not universally quantified")
    y, spine, raised = _raise_over_support(s, s.goal.var, s.goal.arity)
    body = hsubst_formula(Subst.of((s.goal.var, spine, s.goal.arity)), s.goal.body)
    if body is None:
        raise RuleError("opening the quantifier does not normalize")
    return [replace(s, psi=tuple(s.psi) + ((y, raised),), goal=body)]


def rule_ex_l(sig: Signature, s: Sequent, hyp: str,
              keep: bool = False) -> list[Sequent]:
    f = s.hyp(hyp).formula
    if not isinstance(f, Ex):
        raise RuleError(f"hypothesis {hyp} is not existentially quantified")
    y, spine, raised = _raise_over_support(s, f.var, f.arity)
    body = hsubst_formula(Subst.of((f.var, spine, f.arity)), f.body)
    if body is None:
        raise RuleError("opening the quantifier does not normalize")
    base = s if keep else drop_hyp(s, hyp)
    base = replace(base, psi=tuple(base.psi) + ((y, raised),))
    return [add_hyps(base, [body])]


def _check_witness(sig: Signature, s: Sequent, t: Term, ar) -> None:
    env = arity_env(sig, s)
    if not arities.check_term(env, t, ar):
        raise RuleError("witness term fails arity typing in the sequent scope")


def rule_all_l(sig: Signature, s: Sequent, hyp: str, witness: Term,
               keep: bool = False) -> list[Sequent]:
    f = s.hyp(hyp).formula
    if not isinstance(f, All):
        raise RuleError(f"hypothesis {hyp} is not universally quantified")
    _check_witness(sig, s, witness, f.arity)
    inst = f.open_with(witness)
    if inst is None:
        raise RuleError("instantiation does not normalize")
    base = s if keep else drop_hyp(s, hyp)
    return [add_hyps(base, [inst])]


def rule_ex_r(sig: Signature, s: Sequent, witness: Term) -> list[Sequent]:
    if not isinstance(s.goal, Ex):
        raise RuleError("goal is not existentially quantified")
    _check_witness(sig, s, witness, s.goal.arity)
    inst = s.goal.open_with(witness)
    if inst is None:
        raise RuleError("instantiation does not normalize")
    return [replace(s, goal=inst)]


def rule_ctx_r(sig: Signature, s: Sequent) -> list[Sequent]:
    if not isinstance(s.goal, CtxAll):
        raise RuleError("goal is not context-quantified")
    names = {d.var.name for d in s.xi}
    base = s.goal.var.name
    name = base
    i = 1
    while name in names:
        i += 1
        name = f"{base}{i}"
    g = CtxVar(name)
    decl = CtxVarDecl(g, frozenset(), CtxVarType(s.goal.schema, ()))
    body = s.goal.open_with(g)
    return [replace(s, xi=tuple(s.xi) + (decl,), goal=body)]


def rule_ctx_l(sig: Signature, s: Sequent, hyp: str, g: CtxExpr,
               keep: bool = False) -> list[Sequent]:
    f = s.hyp(hyp).formula
    if not isinstance(f, CtxAll):
        raise RuleError(f"hypothesis {hyp} is not context-quantified")
    if not ctxty_instance(ALL_NOMINALS, s.psi, s.xi_pairs(), sig,
                          CtxVarType(f.schema, ()), g):
        raise RuleError("context expression does not instantiate the schema")
    inst = ctxsubst_formula({f.var: g}, f.body)
    base = s if keep else drop_hyp(s, hyp)
    return [add_hyps(base, [inst])]


# ---------------------------------------------------------------------------
# Rules for atomic formulas

def rule_atm_app_l(sig: Signature, s: Sequent, hyp: str) -> list[Sequent]:
    f = s.hyp(hyp).formula
    if not isinstance(f, Atom) or not isinstance(f.term, Atm) \
            or not isinstance(f.ty, AtomTy):
        raise RuleError(f"hypothesis {hyp} is not an atomic assertion at an atomic type")
    star = None
    work, focus = s, hyp
    if f.ann is not None:
        star = f.ann.idx
        erased = f.erased()
        others = [h.name for h in s.hyps if h.name != hyp and h.formula == erased]
        hyps2 = [h for h in s.hyps if h.name != hyp]
        if others:
            focus = others[0]
        else:
            hyps2.append(Hyp(hyp, erased))
        work = mk_sequent(s.support, s.psi, s.xi, hyps2, s.goal)
    try:
        branches = all_cases(sig, work, focus, star=star)
    except CaseAnalysisError as e:
        raise RuleError(str(e))
    return [b.sequent for b in branches]


def rule_atm_app_r(sig: Signature, s: Sequent) -> list[Sequent]:
    f = s.goal
    if not isinstance(f, Atom) or not isinstance(f.term, Atm) \
            or not isinstance(f.ty, AtomTy):
        raise RuleError("goal is not an atomic assertion at an atomic type")
    if f.ann is not None and f.ann.kind != "@":
        raise RuleError("a strictly bounded atomic goal cannot be introduced")
    star = f.ann.idx if f.ann is not None else None
    r = f.term
    a = classifier_in(sig, s, f.ctx, r.head)
    if a is None:
        raise RuleError(f"head {r.head} has no classifier in scope")
    if not _ctx_occurs_in_assumptions(sig, s, f.ctx):
        raise RuleError("the goal context is not certified by any assumption")
    binders, target = pi_strip(a)
    if len(binders) != len(r.args):
        raise RuleError("spine length does not match the classifier")
    theta = Subst()
    obligations = []
    ann = Annotation("*", star) if star is not None else None
    for (x, ai), m in zip(binders, r.args):
        ai2 = hsubst_type(theta, ai)
        if ai2 is None:
            raise RuleError("argument obligation does not normalize")
        obligations.append(Atom(f.ctx, m, ai2, ann))
        theta = Subst(theta.triples() + [(x, m, erase(ai))])
    final = hsubst_type(theta, target)
    if final is None or not alpha_eq(final, f.ty):
        raise RuleError("classifier instance does not match the goal type")
    return [replace(s, goal=ob) for ob in obligations]


def _ctx_occurs_in_assumptions(sig: Signature, s: Sequent, g: CtxExpr) -> bool:
    for h in s.hyps:
        if isinstance(h.formula, Atom) and h.formula.ctx == g:
            return True
    if g.var is None:
        # a closed context can be certified directly
        from .kernel import CheckError, Kernel
        from .syntax import LFContext
        try:
            Kernel(sig, check_sig=False).check_context(LFContext(tuple(g.entries)))
            return True
        except CheckError:
            return False
    return False


def _abs_premise(sig: Signature, s: Sequent, f: Atom) -> tuple[Sequent, Atom, Nominal]:
    if not isinstance(f.term, Lam) or not isinstance(f.ty, PiTy):
        raise RuleError("the formula is not an abstraction at a binder type")
    ar = erase(f.ty.dom)
    n = fresh_nominal(ar, set(s.support))
    opened = eta_expand(n, ar)
    m2 = hsubst_term(Subst.of((f.term.var, opened, ar)), f.term.body)
    a2 = hsubst_type(Subst.of((f.ty.var, opened, ar)), f.ty.cod)
    if m2 is None or a2 is None:
        raise RuleError("opening the abstraction does not normalize")
    xi2 = tuple(CtxVarDecl(d.var, d.banned | {n}, d.cvt)
                if f.ctx.var == d.var else d for d in s.xi)
    s2 = replace(s, support=tuple(s.support) + (n,), xi=xi2)
    new_atom = Atom(f.ctx.extended(n, f.ty.dom), m2, a2)
    return s2, new_atom, n


def rule_atm_abs_l(sig: Signature, s: Sequent, hyp: str) -> list[Sequent]:
    f = s.hyp(hyp).formula
    if not isinstance(f, Atom):
        raise RuleError(f"hypothesis {hyp} is not an atomic assertion")
    s2, atom, _ = _abs_premise(sig, s, f)
    ann = Annotation("*", f.ann.idx) if f.ann is not None else None
    s2 = drop_hyp(s2, hyp)
    return [add_hyps(s2, [atom.with_ann(ann)])]


def rule_atm_abs_r(sig: Signature, s: Sequent) -> list[Sequent]:
    f = s.goal
    if not isinstance(f, Atom):
        raise RuleError("goal is not an atomic assertion")
    if f.ann is not None and f.ann.kind != "@":
        raise RuleError("a strictly bounded atomic goal cannot be introduced")
    s2, atom, _ = _abs_premise(sig, s, f)
    ann = Annotation("*", f.ann.idx) if f.ann is not None else None
    return [replace(s2, goal=atom.with_ann(ann))]


# ---------------------------------------------------------------------------
# Induction

def _split_antecedents(f: Formula):
    """Decompose `Q1. F1 => ... => Qk. Fk => ... body` into a list of
    (quantifier prefix, antecedent) pairs plus the final consequent."""
    prefix: list = []
    ants = []
    cur = f
    while True:
        qs = []
        while isinstance(cur, (All, CtxAll)):
            qs.append(cur)
            cur = cur.body
        if isinstance(cur, Imp):
            ants.append((tuple(qs), cur.left))
            cur = cur.right
        else:
            return ants, tuple(qs), cur


def _rebuild(ants, tail_qs, body, k: int, ann: Annotation) -> Formula:
    out = body
    for q in reversed(tail_qs):
        out = _requant(q, out)
    for i in range(len(ants) - 1, -1, -1):
        qs, ant = ants[i]
        if i == k - 1:
            ant = ant.with_ann(ann)
        out = Imp(ant, out)
        for q in reversed(qs):
            out = _requant(q, out)
    return out


def _requant(q, body):
    if isinstance(q, All):
        return All(q.var, q.arity, body)
    return CtxAll(q.var, q.schema, body)


def rule_ind(sig: Signature, s: Sequent, k: int, index: int) -> list[Sequent]:
    ants, tail_qs, body = _split_antecedents(s.goal)
    if not 1 <= k <= len(ants):
        raise RuleError(f"the goal has no antecedent {k}")
    _, ant = ants[k - 1]
    if not isinstance(ant, Atom) or ant.ann is not None:
        raise RuleError("the induction antecedent must be an unannotated assertion")
    used = s.ann_indices()
    if index in used:
        raise RuleError(f"annotation index {index} already occurs in the sequent")
    ih = _rebuild(ants, tail_qs, body, k, Annotation("*", index))
    goal2 = _rebuild(ants, tail_qs, body, k, Annotation("@", index))
    return [replace(add_hyps(s, [ih], base="IH"), goal=goal2)]


# ---------------------------------------------------------------------------
# Rules encoding the structural facts about derivations

def _lf_shape(goal: Formula) -> tuple[Atom, Atom]:
    if not isinstance(goal, Imp) or not isinstance(goal.left, Atom) \
            or not isinstance(goal.right, Atom):
        raise RuleError("goal must be an implication between atomic assertions")
    return goal.left, goal.right


def rule_lf_str(sig: Signature, s: Sequent) -> list[Sequent]:
    ante, cons = _lf_shape(s.goal)
    if ante.ann != cons.ann:
        raise RuleError("annotations must agree across the implication")
    if len(ante.ctx.entries) != len(cons.ctx.entries) + 1 \
            or ante.ctx.var != cons.ctx.var \
            or ante.ctx.entries[:-1] != cons.ctx.entries:
        raise RuleError("antecedent context must extend the consequent by one binding")
    n, _ = ante.ctx.entries[-1]
    if not (alpha_eq(ante.term, cons.term) and alpha_eq(ante.ty, cons.ty)):
        raise RuleError("subject and type must be unchanged")
    occ = cons.term.noms | cons.ty.noms
    for _, a in cons.ctx.entries:
        occ |= a.noms
    if n in occ:
        raise RuleError(f"{n} occurs in the judgement")
    return []


def rule_lf_wk(sig: Signature, s: Sequent) -> list[Sequent]:
    ante, cons = _lf_shape(s.goal)
    if ante.ann != cons.ann:
        raise RuleError("annotations must agree across the implication")
    if len(cons.ctx.entries) != len(ante.ctx.entries) + 1 \
            or ante.ctx.var != cons.ctx.var \
            or cons.ctx.entries[:-1] != ante.ctx.entries:
        raise RuleError("consequent context must extend the antecedent by one binding")
    n, b = cons.ctx.entries[-1]
    if not (alpha_eq(ante.term, cons.term) and alpha_eq(ante.ty, cons.ty)):
        raise RuleError("subject and type must be unchanged")
    occ = ante.term.noms | ante.ty.noms
    for _, a in ante.ctx.entries:
        occ |= a.noms
    if n in occ:
        raise RuleError(f"{n} is not fresh for the judgement")
    for d in s.xi:
        if d.var == ante.ctx.var and n not in d.banned:
            raise RuleError(
                f"{n} must be prohibited for {d.var} before weakening by it")
    try:
        obls = type_decompose(sig, s.support, s.xi, ante.ctx, b)
    except CaseAnalysisError as e:
        raise RuleError(str(e))
    out = []
    for sup2, xi2, f2 in obls:
        out.append(mk_sequent(sup2, s.psi, xi2, s.hyps, f2))
    return out


def rule_lf_perm(sig: Signature, s: Sequent) -> list[Sequent]:
    ante, cons = _lf_shape(s.goal)
    if ante.ann != cons.ann:
        raise RuleError("annotations must agree across the implication")
    if not (alpha_eq(ante.term, cons.term) and alpha_eq(ante.ty, cons.ty)):
        raise RuleError("subject and type must be unchanged")
    if ante.ctx.var != cons.ctx.var or len(ante.ctx.entries) != len(cons.ctx.entries):
        raise RuleError("contexts must agree up to one adjacent swap")
    e1, e2 = list(ante.ctx.entries), list(cons.ctx.entries)
    diff = [i for i, (a, b) in enumerate(zip(e1, e2)) if a != b]
    if len(diff) != 2 or diff[1] != diff[0] + 1:
        raise RuleError("contexts must differ in one adjacent swap")
    i = diff[0]
    if e1[i] != e2[i + 1] or e1[i + 1] != e2[i]:
        raise RuleError("contexts must differ in one adjacent swap")
    n1, a1 = e1[i]
    n2, a2 = e1[i + 1]
    if n1 in a2.noms:
        raise RuleError(f"{n1} appears in the type of {n2}")
    return []


def rule_lf_inst(sig: Signature, s: Sequent) -> list[Sequent]:
    goal = s.goal
    if not (isinstance(goal, Imp) and isinstance(goal.right, Imp)):
        raise RuleError("goal must be a double implication between assertions")
    big, mid, out = goal.left, goal.right.left, goal.right.right
    if not all(isinstance(f, Atom) and f.ann is None for f in (big, mid, out)):
        raise RuleError("instantiation applies to unannotated assertions")
    if big.ctx.var != mid.ctx.var or big.ctx.var != out.ctx.var:
        raise RuleError("context variables must agree")
    base = mid.ctx.entries
    if len(big.ctx.entries) <= len(base) or big.ctx.entries[:len(base)] != base:
        raise RuleError("antecedent context must extend the second context")
    ext = big.ctx.entries[len(base):]
    n, b = ext[0]
    if not alpha_eq(mid.ty, b):
        raise RuleError("the substituted binding's type must match")
    witness = mid.term
    theta = Subst.of((n, witness, erase(b)))
    rest = []
    for ni, ai in ext[1:]:
        ai2 = hsubst_type(theta, ai)
        if ai2 is None:
            raise RuleError("instantiated binding does not normalize")
        rest.append((ni, ai2))
    m2 = hsubst_term(theta, big.term)
    a2 = hsubst_type(theta, big.ty)
    if m2 is None or a2 is None:
        raise RuleError("instantiated judgement does not normalize")
    want = Atom(CtxExpr(big.ctx.var, base + tuple(rest)), m2, a2)
    if out != want:
        raise RuleError("consequent does not match the computed instance")
    return []


# ---------------------------------------------------------------------------
# Rule dispatch

def _and_l1(sig, s, hyp, keep=False):
    return rule_and_l(sig, s, hyp, 1, keep)


def _and_l2(sig, s, hyp, keep=False):
    return rule_and_l(sig, s, hyp, 2, keep)


def _or_r1(sig, s):
    return rule_or_r(sig, s, 1)


def _or_r2(sig, s):
    return rule_or_r(sig, s, 2)


RULES: dict[str, Callable] = {
    "wk": rule_wk, "cont": rule_cont,
    "ctx-str": rule_ctx_str, "ctx-wk": rule_ctx_wk,
    "id": rule_id, "cut": rule_cut,
    "top-R": rule_top_r, "bot-L": rule_bot_l,
    "and-R": rule_and_r, "and-L1": _and_l1, "and-L2": _and_l2,
    "or-R1": _or_r1, "or-R2": _or_r2, "or-L": rule_or_l,
    "imp-R": rule_imp_r, "imp-L": rule_imp_l,
    "all-R": rule_all_r, "all-L": rule_all_l,
    "ex-R": rule_ex_r, "ex-L": rule_ex_l,
    "ctx-R": rule_ctx_r, "ctx-L": rule_ctx_l,
    "atm-app-L": rule_atm_app_l, "atm-app-R": rule_atm_app_r,
    "atm-abs-L": rule_atm_abs_l, "atm-abs-R": rule_atm_abs_r,
    "atm-app-L*": rule_atm_app_l, "atm-app-R*": rule_atm_app_r,
    "atm-abs-L*": rule_atm_abs_l, "atm-abs-R*": rule_atm_abs_r,
    "ind": rule_ind,
    "lf-wk": rule_lf_wk, "lf-str": rule_lf_str,
    "lf-perm": rule_lf_perm, "lf-inst": rule_lf_inst,
}


def apply_rule(state: ProofState, rule: str, *args, note: str = "",
               **kwargs) -> ProofState:
    fn = RULES.get(rule)
    if fn is None:
        raise RuleError(f"unknown rule {rule}")
    s = state.focused().sequent
    try:
        subgoals = fn(state.sig, s, *args, **kwargs)
    except SequentError as e:
        raise RuleError(str(e))
    return _commit(state, subgoals, note or rule)
