"""The tactic layer: each tactic elaborates into a sequence of checked
rule applications and either fails without touching the proof state or
commits the whole sequence.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable, Optional

from . import arities
from .cases import all_cases, CaseAnalysisError
from .formulas import (All, And, Annotation, Atom, Bot, CtxAll, CtxExpr,
                       Ex, Formula, Imp, Or, Top, ctxsubst_formula,
                       formula_strength, hsubst_formula)
from .prover import (ProofState, RuleError, RULES, _abs_premise,
                     _commit, apply_rule, rule_atm_abs_r, rule_atm_app_r)
from .schemas import CtxVarType, ctxty_instance
from .sequents import (Hyp, Sequent, SequentError, add_hyps, arity_env,
                       drop_hyp, mk_sequent)
from .subst import Permutation, Subst, hsubst_term, hsubst_type
from .syntax import (ALL_NOMINALS, Atm, AtomTy, Lam, Nominal, PiTy,
                     Signature, Term, Var, erase)
from .unify import Equation, Solution, UnifProblem, _Solver


class TacticError(Exception):
    pass


def _wrap(fn):
    def go(state: ProofState, *args, **kwargs) -> ProofState:
        try:
            return fn(state, *args, **kwargs)
        except (RuleError, SequentError, CaseAnalysisError) as e:
            raise TacticError(str(e))
    return go


def _one_log(before: ProofState, after: ProofState, note: str) -> ProofState:
    """Collapse a multi-rule elaboration into one log entry."""
    return replace(after, log=before.log + (note,))


# ---------------------------------------------------------------------------
# Introductions

@_wrap
def tac_intros(state: ProofState, note: str = "intros") -> ProofState:
    out = state
    first = True
    while True:
        g = out.focused().sequent.goal
        if isinstance(g, CtxAll):
            out = apply_rule(out, "ctx-R")
        elif isinstance(g, All):
            out = apply_rule(out, "all-R")
        elif isinstance(g, Imp):
            out = apply_rule(out, "imp-R")
        else:
            break
        first = False
    if first:
        raise TacticError("nothing to introduce")
    return _one_log(state, out, note)


# ---------------------------------------------------------------------------
# Case analysis

def _abs_decompose_hyp(sig: Signature, seq: Sequent, name: str) -> Sequent:
    """Open abstraction assumptions all the way down, keeping the name."""
    while True:
        try:
            f = seq.hyp(name).formula
        except SequentError:
            return seq
        if not (isinstance(f, Atom) and isinstance(f.term, Lam)
                and isinstance(f.ty, PiTy)):
            return seq
        s2, atom, _ = _abs_premise(sig, seq, f)
        ann = Annotation("*", f.ann.idx) if f.ann is not None else None
        new_f = atom.with_ann(ann)
        hyps = tuple(Hyp(h.name, new_f) if h.name == name else h
                     for h in s2.hyps)
        seq = mk_sequent(s2.support, s2.psi, s2.xi, hyps, s2.goal)


@_wrap
def tac_case(state: ProofState, hyp: str, keep: bool = False,
             note: str = "") -> ProofState:
    sig = state.sig
    s = state.focused().sequent
    f = s.hyp(hyp).formula
    note = note or f"case {hyp}"
    if isinstance(f, Atom):
        if isinstance(f.term, Atm) and isinstance(f.ty, AtomTy):
            star = None
            work, focus = s, hyp
            if f.ann is not None:
                star = f.ann.idx
                erased = f.erased()
                others = [h.name for h in s.hyps
                          if h.name != hyp and h.formula == erased]
                hyps2 = [h for h in s.hyps if h.name != hyp]
                if others:
                    focus = others[0]
                else:
                    hyps2.append(Hyp(hyp, erased))
                work = mk_sequent(s.support, s.psi, s.xi, hyps2, s.goal)
            branches = all_cases(sig, work, focus, star=star)
            goals = []
            for b in branches:
                seq = b.sequent
                for nm in b.new_hyps:
                    seq = _abs_decompose_hyp(sig, seq, nm)
                goals.append(seq)
            return _commit(state, goals, note)
        if isinstance(f.term, Lam) and isinstance(f.ty, PiTy):
            seq = _abs_decompose_hyp(sig, s, hyp)
            return _commit(state, [seq], note)
        raise TacticError(f"cannot analyze {hyp}")
    if isinstance(f, Ex):
        return apply_rule(state, "ex-L", hyp, keep, note=note)
    if isinstance(f, And):
        base = s if keep else drop_hyp(s, hyp)
        return _commit(state, [add_hyps(base, [f.left, f.right])], note)
    if isinstance(f, Or):
        return apply_rule(state, "or-L", hyp, keep, note=note)
    if isinstance(f, Bot):
        return apply_rule(state, "bot-L", hyp, note=note)
    if isinstance(f, Top):
        return _commit(state, [drop_hyp(s, hyp)], note)
    raise TacticError(f"cannot analyze {hyp}: unsupported shape")


# ---------------------------------------------------------------------------
# Using an implication-shaped hypothesis or lemma

def _peel(f: Formula):
    """Quantifier prefix (in order) and the implication chain underneath."""
    qs = []
    while isinstance(f, (All, CtxAll)):
        qs.append(f)
        f = f.body
    ants = []
    while isinstance(f, Imp):
        ants.append(f.left)
        f = f.right
    return qs, ants, f


@_wrap
def tac_apply(state: ProofState, name: str, to: Iterable[str] = (),
              withs: Optional[dict] = None, note: str = "") -> ProofState:
    sig = state.sig
    s = state.focused().sequent
    withs = dict(withs or {})
    lemmas = state.lemma_map()
    if s.has_hyp_named(name):
        formula = s.hyp(name).formula
        from_lemma = False
    elif name in lemmas:
        formula = lemmas[name]
        from_lemma = True
    else:
        raise TacticError(f"no hypothesis or lemma named {name}")
    to = list(to)
    qs, ants, cons = _peel(formula)
    if len(to) != len(ants):
        raise TacticError(
            f"{name} expects {len(ants)} argument hypotheses, got {len(to)}")
    hyp_fs = [s.hyp(h).formula for h in to]

    # explicit instantiations by bound-variable name
    sigma: dict = {}
    theta_pairs: list = []
    term_qs: list[tuple[Var, object]] = []
    for q in qs:
        key = q.var.name
        if isinstance(q, CtxAll):
            if key in withs:
                g = withs.pop(key)
                if not isinstance(g, CtxExpr):
                    raise TacticError(f"{key} needs a context expression")
                sigma[q.var] = g
        else:
            if key in withs:
                t = withs.pop(key)
                theta_pairs.append((q.var, t, q.arity))
            else:
                term_qs.append((q.var, q.arity))
    if withs:
        raise TacticError(f"unused instantiations: {sorted(withs)}")

    # infer missing context instantiations from the first usable argument
    body_ants = [ctxsubst_formula(sigma, a) for a in ants]
    missing_cvars = {q.var for q in qs if isinstance(q, CtxAll)} - set(sigma)
    for cv in list(missing_cvars):
        for a, hf in zip(body_ants, hyp_fs):
            if isinstance(a, Atom) and isinstance(hf, Atom) and a.ctx.var == cv:
                k = len(a.ctx.entries)
                he = hf.ctx.entries
                if k == 0:
                    sigma[cv] = hf.ctx
                elif len(he) >= k:
                    sigma[cv] = CtxExpr(hf.ctx.var, he[:len(he) - k])
                break
        if cv not in sigma:
            raise TacticError(f"cannot infer an instantiation for {cv}")
    body_ants = [ctxsubst_formula(sigma, a) for a in ants]
    cons = ctxsubst_formula(sigma, cons)

    # check inferred/explicit context instantiations against their schemas
    for q in qs:
        if isinstance(q, CtxAll):
            g = sigma[q.var]
            if not ctxty_instance(ALL_NOMINALS, s.psi, s.xi_pairs(), sig,
                                  CtxVarType(q.schema, ()), g):
                raise TacticError(
                    f"instantiation for {q.var} does not fit its schema")

    # infer the remaining term instantiations by matching
    theta = Subst(theta_pairs)
    if term_qs:
        eqs = []
        for a, hf in zip(body_ants, hyp_fs):
            a2 = hsubst_formula(theta, a)
            if a2 is None:
                raise TacticError("instantiation does not normalize")
            if isinstance(a2, Atom) and isinstance(hf, Atom):
                eqs.append(Equation(a2.term, hf.term, erase(a2.ty)))
                eqs.append(Equation(a2.ty, hf.ty, None))
        psi_all = tuple(s.psi) + tuple((v, ar) for v, ar in term_qs)
        prob = UnifProblem(frozenset(), psi_all, tuple(eqs))
        from .syntax import induced_arity_context
        res = _Solver(prob, induced_arity_context(sig), sig,
                      flex={v for v, _ in term_qs}).run()
        if not isinstance(res, Solution):
            raise TacticError(f"cannot infer instantiations for {name}")
        for v, ar in term_qs:
            hit = res.theta.get(v)
            if hit is None:
                raise TacticError(f"cannot infer an instantiation for {v}")
            theta = Subst(theta.triples() + [(v, hit[0], ar)])

    # check the witnesses and discharge each antecedent with its hypothesis
    env = arity_env(sig, s)
    for _, t, ar in theta.triples():
        if not arities.check_term(env, t, ar):
            raise TacticError("an instantiation fails arity typing in scope")
    xib = s.xi_banned()
    pid = Permutation.identity()
    for a, hf, hname in zip(body_ants, hyp_fs, to):
        inst = hsubst_formula(theta, a)
        if inst is None:
            raise TacticError("instantiation does not normalize")
        if not formula_strength(xib, pid, hf, inst):
            raise TacticError(
                f"hypothesis {hname} does not discharge its antecedent")
    out_f = hsubst_formula(theta, cons)
    if out_f is None:
        raise TacticError("conclusion instance does not normalize")
    note = note or f"apply {name} to {' '.join(to)}"
    return _commit(state, [add_hyps(s, [out_f])], note)


# ---------------------------------------------------------------------------
# Goal-closing search

def _infer_perm_map(e2, e1, m: dict, bound: dict) -> bool:
    """Collect a nominal correspondence making e2 match e1."""
    if isinstance(e2, Lam):
        if not isinstance(e1, Lam):
            return False
        bound = dict(bound)
        bound[e2.var] = e1.var
        return _infer_perm_map(e2.body, e1.body, m, bound)
    if isinstance(e2, Atm):
        if not isinstance(e1, Atm) or len(e2.args) != len(e1.args):
            return False
        h2, h1 = e2.head, e1.head
        if isinstance(h2, Nominal):
            if not isinstance(h1, Nominal) or h2.arity != h1.arity:
                return False
            if m.get(h2, h1) != h1:
                return False
            m[h2] = h1
        elif isinstance(h2, Var):
            if bound.get(h2, h2) != h1:
                return False
        elif h2 != h1:
            return False
        return all(_infer_perm_map(a2, a1, m, bound)
                   for a2, a1 in zip(e2.args, e1.args))
    if type(e2) is not type(e1):
        return False
    if hasattr(e2, "head"):  # atomic type
        if e2.head != e1.head or len(e2.args) != len(e1.args):
            return False
        return all(_infer_perm_map(a2, a1, m, bound)
                   for a2, a1 in zip(e2.args, e1.args))
    if isinstance(e2, PiTy):
        if not _infer_perm_map(e2.dom, e1.dom, m, bound):
            return False
        bound = dict(bound)
        bound[e2.var] = e1.var
        return _infer_perm_map(e2.cod, e1.cod, m, bound)
    return False


def _infer_perm(s: Sequent, f2: Formula, f1: Formula) -> Optional[Permutation]:
    """A support-set permutation making the assumption at least as strong
    as the goal, when the formulas are atomic and such a renaming exists."""
    if not (isinstance(f2, Atom) and isinstance(f1, Atom)):
        return None
    m: dict = {}
    if f2.ctx.var != f1.ctx.var or len(f2.ctx.entries) != len(f1.ctx.entries):
        return None
    ok = _infer_perm_map(f2.term, f1.term, m, {}) and \
        _infer_perm_map(f2.ty, f1.ty, m, {})
    for (n2, a2), (n1, a1) in zip(f2.ctx.entries, f1.ctx.entries):
        if n2.arity != n1.arity or m.get(n2, n1) != n1:
            return None
        m[n2] = n1
        ok = ok and _infer_perm_map(a2, a1, m, {})
    if not ok:
        return None
    moved = {a: b for a, b in m.items() if a != b}
    if len(set(moved.values())) != len(moved):
        return None
    support = set(s.support)
    dom, rng = set(moved), set(moved.values())
    if not (dom <= support and rng <= support):
        return None
    # complete to a bijection on the union of domain and range
    pairs = dict(moved)
    left = sorted(dom - rng, key=lambda n: n.order_key())
    right = sorted(rng - dom, key=lambda n: n.order_key())
    for a, b in zip(right, left):
        pairs[a] = b
    try:
        pi = Permutation(tuple(pairs.items()))
    except Exception:
        return None
    if not pi.support() <= support:
        return None
    if not formula_strength(s.xi_banned(), pi, f2, f1):
        return None
    return pi


def _search_seq(sig: Signature, lemmas: dict, s: Sequent, depth: int) -> bool:
    g = s.goal
    if isinstance(g, Top):
        return True
    xib = s.xi_banned()
    pid = Permutation.identity()
    for h in s.hyps:
        if formula_strength(xib, pid, h.formula, g):
            return True
        pi = _infer_perm(s, h.formula, g)
        if pi is not None:
            return True
    if depth <= 0:
        return False
    if isinstance(g, Atom) and isinstance(g.term, Lam) and isinstance(g.ty, PiTy):
        try:
            subs = rule_atm_abs_r(sig, s)
        except RuleError:
            return False
        return all(_search_seq(sig, lemmas, sub, depth) for sub in subs)
    if isinstance(g, Atom) and isinstance(g.term, Atm) and isinstance(g.ty, AtomTy):
        try:
            subs = rule_atm_app_r(sig, s)
        except RuleError:
            return False
        return all(_search_seq(sig, lemmas, sub, depth - 1) for sub in subs)
    return False


@_wrap
def tac_search(state: ProofState, depth: int = 5, note: str = "") -> ProofState:
    s = state.focused().sequent
    if not _search_seq(state.sig, state.lemma_map(), s, depth):
        raise TacticError("search found no proof")
    return _commit(state, [], note or "search")


# ---------------------------------------------------------------------------
# Small wrappers

@_wrap
def tac_exists(state: ProofState, witness: Term, note: str = "") -> ProofState:
    return apply_rule(state, "ex-R", witness, note=note or "exists")


@_wrap
def tac_split(state: ProofState) -> ProofState:
    return apply_rule(state, "and-R", note="split")


@_wrap
def tac_left(state: ProofState) -> ProofState:
    return apply_rule(state, "or-R1", note="left")


@_wrap
def tac_right(state: ProofState) -> ProofState:
    return apply_rule(state, "or-R2", note="right")


@_wrap
def tac_assert(state: ProofState, f: Formula, note: str = "") -> ProofState:
    return apply_rule(state, "cut", f, note=note or "assert")


@_wrap
def tac_clear(state: ProofState, hyp: str) -> ProofState:
    return apply_rule(state, "wk", hyp, note=f"clear {hyp}")


@_wrap
def tac_ind(state: ProofState, k: int, note: str = "") -> ProofState:
    index = state.next_ann
    out = apply_rule(state, "ind", k, index, note=note or f"ind {k}")
    return replace(out, next_ann=index + 1)


@_wrap
def tac_id(state: ProofState, hyp: str,
           pi: Permutation = Permutation.identity()) -> ProofState:
    return apply_rule(state, "id", hyp, pi, note=f"id {hyp}")


# ---------------------------------------------------------------------------
# Tactics elaborating the rules that encode structural facts

def _cut_and_close(state: ProofState, imp_f: Formula, closer: str,
                   note: str) -> ProofState:
    """Cut in an implication whose first subgoal closes by an axiom rule."""
    sig = state.sig
    s = state.focused().sequent
    out = apply_rule(state, "cut", imp_f, note=note)
    axiom_goal = out.focused().sequent
    subs = RULES[closer](sig, axiom_goal)
    out = _commit(out, subs, "")
    return out


@_wrap
def tac_strengthen(state: ProofState, hyp: str) -> ProofState:
    s = state.focused().sequent
    f = s.hyp(hyp).formula
    if not isinstance(f, Atom) or not f.ctx.entries:
        raise TacticError("strengthening needs an assertion with a last binding")
    target = Atom(CtxExpr(f.ctx.var, f.ctx.entries[:-1]), f.term, f.ty, f.ann)
    out = _cut_and_close(state, Imp(f, target), "lf-str", "")
    out = apply_rule(out, "imp-L", _last_hyp_name(out))
    out = apply_rule(out, "id", hyp)
    return _one_log(state, out, f"strengthen {hyp}")


@_wrap
def tac_weaken(state: ProofState, hyp: str, n: Nominal, b) -> ProofState:
    s = state.focused().sequent
    f = s.hyp(hyp).formula
    if not isinstance(f, Atom):
        raise TacticError("weakening needs an atomic assertion")
    target = Atom(f.ctx.extended(n, b), f.term, f.ty, f.ann)
    out = _cut_and_close(state, Imp(f, target), "lf-wk", "")
    # goals are now: decomposition obligations, then the main goal; finish
    # the implication chain on the main goal, then surface the obligations
    k = len(out.goals) - len(state.goals)
    goals = out.goals
    out = replace(out, goals=(goals[k],) + goals[:k] + goals[k + 1:])
    out = apply_rule(out, "imp-L", _last_hyp_name(out))
    out = apply_rule(out, "id", hyp)
    goals = out.goals
    out = replace(out, goals=goals[1:k + 1] + (goals[0],) + goals[k + 1:])
    return _one_log(state, out, f"weaken {hyp} with {n}")


@_wrap
def tac_permute(state: ProofState, hyp: str, first: Nominal) -> ProofState:
    s = state.focused().sequent
    f = s.hyp(hyp).formula
    if not isinstance(f, Atom):
        raise TacticError("permutation needs an atomic assertion")
    entries = list(f.ctx.entries)
    idx = next((i for i, (n, _) in enumerate(entries) if n == first), None)
    if idx is None or idx + 1 >= len(entries):
        raise TacticError(f"{first} has no successor binding to swap with")
    swapped = entries[:idx] + [entries[idx + 1], entries[idx]] + entries[idx + 2:]
    target = Atom(CtxExpr(f.ctx.var, tuple(swapped)), f.term, f.ty, f.ann)
    out = _cut_and_close(state, Imp(f, target), "lf-perm", "")
    out = apply_rule(out, "imp-L", _last_hyp_name(out))
    out = apply_rule(out, "id", hyp)
    return _one_log(state, out, f"permute {hyp} {first}")


@_wrap
def tac_inst(state: ProofState, hyp: str, n: Nominal, witness: Term,
             by: Optional[str] = None) -> ProofState:
    """Instantiate a context binding of an assumption with a term; the
    typing premise is discharged by `by` or left as a subgoal."""
    sig = state.sig
    s = state.focused().sequent
    f = s.hyp(hyp).formula
    if not isinstance(f, Atom) or f.ann is not None:
        raise TacticError("instantiation needs an unannotated assertion")
    entries = list(f.ctx.entries)
    idx = next((i for i, (m, _) in enumerate(entries) if m == n), None)
    if idx is None:
        raise TacticError(f"{n} is not bound in the context of {hyp}")
    b = entries[idx][1]
    theta = Subst.of((n, witness, erase(b)))
    rest = []
    for ni, ai in entries[idx + 1:]:
        ai2 = hsubst_type(theta, ai)
        if ai2 is None:
            raise TacticError("instantiated binding does not normalize")
        rest.append((ni, ai2))
    m2 = hsubst_term(theta, f.term)
    a2 = hsubst_type(theta, f.ty)
    if m2 is None or a2 is None:
        raise TacticError("instantiated judgement does not normalize")
    mid = Atom(CtxExpr(f.ctx.var, tuple(entries[:idx])), witness, b)
    outf = Atom(CtxExpr(f.ctx.var, tuple(entries[:idx]) + tuple(rest)), m2, a2)
    out = _cut_and_close(state, Imp(f, Imp(mid, outf)), "lf-inst", "")
    out = apply_rule(out, "imp-L", _last_hyp_name(out))
    out = apply_rule(out, "id", hyp)
    out = apply_rule(out, "imp-L", _last_hyp_name(out))
    if by is not None:
        out = apply_rule(out, "id", by)
    return _one_log(state, out, f"inst {hyp} with {n} = ...")


def _last_hyp_name(state: ProofState) -> str:
    return state.focused().sequent.hyps[-1].name
