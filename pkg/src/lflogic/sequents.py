"""Sequents: a support set of nominal constants, a term variables context,
a context variables context, named assumption formulas, and a goal.

Substitution into sequents raises the surviving term variables over the
newly introduced nominal constants so that later instantiations may
mention them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from . import arities
from .formulas import (CtxVar, Formula, FormulaError, ctxsubst_formula,
                       formula_ann_indices, hsubst_formula, permute_formula,
                       wf_formula)
from .schemas import CtxVarType, SchemaError, ctxty_instance, wf_ctxvar_ty
from .subst import Permutation, Subst, hsubst_type, permute
from .syntax import (ALL_NOMINALS, ArityCtx, ArityType, Arrow, NameSet,
                     Nominal, Signature, Var, eta_expand,
                     induced_arity_context)


class SequentError(Exception):
    """A sequent operation's precondition is violated; the message names
    the failed clause."""


@dataclass(frozen=True)
class CtxVarDecl:
    var: CtxVar
    banned: frozenset
    cvt: CtxVarType


@dataclass(frozen=True)
class Hyp:
    name: str
    formula: Formula


@dataclass(frozen=True)
class Sequent:
    support: tuple[Nominal, ...]
    psi: tuple[tuple[Var, ArityType], ...]
    xi: tuple[CtxVarDecl, ...]
    hyps: tuple[Hyp, ...]
    goal: Formula

    def psi_map(self) -> dict:
        return dict(self.psi)

    def xi_map(self) -> dict:
        return {d.var: d for d in self.xi}

    def xi_banned(self) -> dict:
        return {d.var: NameSet.of(d.banned) for d in self.xi}

    def xi_pairs(self) -> dict:
        return {d.var: (d.banned, d.cvt) for d in self.xi}

    def hyp(self, name: str) -> Hyp:
        for h in self.hyps:
            if h.name == name:
                return h
        raise SequentError(f"no hypothesis named {name}")

    def has_hyp_named(self, name: str) -> bool:
        return any(h.name == name for h in self.hyps)

    def formulas(self) -> list[Formula]:
        return [h.formula for h in self.hyps] + [self.goal]

    def ann_indices(self) -> frozenset:
        out = frozenset()
        for f in self.formulas():
            out |= formula_ann_indices(f)
        return out

    def fresh_hyp_name(self, base: str = "H") -> str:
        i = 1
        while any(h.name == f"{base}{i}" for h in self.hyps):
            i += 1
        return f"{base}{i}"


def mk_sequent(support: Iterable[Nominal], psi, xi, hyps: Iterable[Hyp],
               goal: Formula) -> Sequent:
    """Normalized construction: support ordered canonically, assumption
    formulas deduplicated (set semantics; the earliest name survives)."""
    sup = tuple(sorted(set(support), key=lambda n: n.order_key()))
    out_hyps: list[Hyp] = []
    names: set[str] = set()
    for h in hyps:
        if any(h.formula == g.formula for g in out_hyps):
            continue
        name = h.name
        i = 1
        while name in names:
            i += 1
            name = f"{h.name}'{i}" if not h.name[-1].isdigit() else f"{h.name}_{i}"
        names.add(name)
        out_hyps.append(Hyp(name, h.formula))
    return Sequent(sup, tuple(psi), tuple(xi), tuple(out_hyps), goal)


def add_hyps(s: Sequent, formulas: Iterable[Formula], base: str = "H") -> Sequent:
    hyps = list(s.hyps)
    for f in formulas:
        if any(f == h.formula for h in hyps):
            continue
        taken = {h.name for h in hyps}
        i = 1
        while f"{base}{i}" in taken:
            i += 1
        hyps.append(Hyp(f"{base}{i}", f))
    return replace(s, hyps=tuple(hyps))


def drop_hyp(s: Sequent, name: str) -> Sequent:
    return replace(s, hyps=tuple(h for h in s.hyps if h.name != name))


# ---------------------------------------------------------------------------
# Wellformedness

def arity_env(sig: Signature, s: Sequent) -> ArityCtx:
    return (induced_arity_context(sig)
            .with_vars(s.psi)
            .with_nom_scope(NameSet.of(s.support)))


def wf_sequent(sig: Signature, s: Sequent) -> None:
    sup = set(s.support)
    if len({v for v, _ in s.psi}) != len(s.psi):
        raise SequentError("duplicate term variable")
    if len({d.var for d in s.xi}) != len(s.xi):
        raise SequentError("duplicate context variable")
    for d in s.xi:
        if not d.banned <= sup:
            raise SequentError(
                f"prohibited names of {d.var} are not within the support set")
        try:
            wf_ctxvar_ty(NameSet.of(sup - d.banned), s.psi, sig, d.cvt)
        except SchemaError as e:
            raise SequentError(f"context variable type of {d.var}: {e}")
    env = arity_env(sig, s)
    xi_names = {d.var for d in s.xi}
    for h in s.hyps:
        try:
            wf_formula(env, xi_names, sig, h.formula)
        except FormulaError as e:
            raise SequentError(f"hypothesis {h.name}: {e}")
    try:
        wf_formula(env, xi_names, sig, s.goal)
    except FormulaError as e:
        raise SequentError(f"goal: {e}")


# ---------------------------------------------------------------------------
# Raising

def raise_psi(psi: Iterable[tuple[Var, ArityType]],
              over: Iterable[Nominal]) -> tuple[list[tuple[Var, ArityType]], Subst]:
    """A renamed copy of the context whose variables abstract over the
    given nominal listing, together with the substitution sending each old
    variable to the new one applied to the listing."""
    ns = list(over)
    out: list[tuple[Var, ArityType]] = []
    triples = []
    for x, ar in psi:
        raised = ar
        for n in reversed(ns):
            raised = Arrow(n.arity, raised)
        y = Var(x.name)
        out.append((y, raised))
        spine = tuple(eta_expand(n, n.arity) for n in ns)
        triples.append((x, eta_expand(y, ar, spine), ar))
    return out, Subst(triples)


# ---------------------------------------------------------------------------
# Term substitution into sequents

@dataclass(frozen=True)
class AppliedSubst:
    sequent: Sequent
    raising: Subst
    raised_psi: tuple[tuple[Var, ArityType], ...]


def check_subst_compatible(sig: Signature, s: Sequent, theta: Subst,
                           psi_new: Iterable[tuple[Var, ArityType]]) -> None:
    psi_new = list(psi_new)
    env = (induced_arity_context(sig).with_vars(psi_new)
           .with_nom_scope(ALL_NOMINALS))
    if not arities.subst_preserves(env, theta.triples()):
        raise SequentError(
            "substitution is not arity type preserving (compatibility clause 1)")
    if theta.supp() & set(s.support):
        raise SequentError(
            "substitution uses names from the support set (compatibility clause 2)")
    combined = dict(theta.ctx())
    for x, ar in psi_new:
        combined.setdefault(x, ar)
    for x, ar in s.psi:
        if x in combined and combined[x] != ar:
            raise SequentError(
                f"typing of {x} disagrees (compatibility clause 3)")


def _apply_formula(theta: Subst, f: Formula) -> Formula:
    out = hsubst_formula(theta, f)
    if out is None:
        raise SequentError("substitution into a formula is undefined")
    return out


def _apply_cvt(theta: Subst, cvt: CtxVarType) -> CtxVarType:
    blocks = []
    for b in cvt.blocks:
        entries = []
        for n, a in b:
            a2 = hsubst_type(theta, a)
            if a2 is None:
                raise SequentError("substitution into a context block is undefined")
            entries.append((n, a2))
        blocks.append(tuple(entries))
    return CtxVarType(cvt.schema, tuple(blocks))


def apply_term_subst(sig: Signature, s: Sequent, theta: Subst,
                     psi_new: Iterable[tuple[Var, ArityType]] = ()) -> AppliedSubst:
    psi_new = list(psi_new)
    check_subst_compatible(sig, s, theta, psi_new)
    new_noms = sorted(theta.supp(), key=lambda n: n.order_key())
    residual = [(x, ar) for x, ar in s.psi if x not in theta.dom()]
    for x, ar in psi_new:
        if all(x != y for y, _ in residual):
            residual.append((x, ar))
    psi2, theta_r = raise_psi(residual, new_noms)

    def both(f: Formula) -> Formula:
        return _apply_formula(theta_r, _apply_formula(theta, f))

    xi2 = tuple(CtxVarDecl(d.var, d.banned, _apply_cvt(theta_r, _apply_cvt(theta, d.cvt)))
                for d in s.xi)
    hyps2 = tuple(Hyp(h.name, both(h.formula)) for h in s.hyps)
    goal2 = both(s.goal)
    out = mk_sequent(tuple(s.support) + tuple(new_noms), psi2, xi2, hyps2, goal2)
    return AppliedSubst(out, theta_r, tuple(psi2))


# ---------------------------------------------------------------------------
# Context substitution into sequents

def ctx_subst_support(sigma: dict) -> frozenset:
    out = set()
    for g in sigma.values():
        out |= g.noms()
    return frozenset(out)


def check_ctx_subst_appropriate(sig: Signature, s: Sequent, sigma: dict) -> None:
    xi = s.xi_map()
    rest = {d.var: (d.banned, d.cvt) for d in s.xi if d.var not in sigma}
    for gv, g in sigma.items():
        d = xi.get(gv)
        if d is None:
            raise SequentError(f"no context variable {gv} to substitute for")
        try:
            wf_ctxvar_ty(NameSet.of(set(s.support)), s.psi, sig, d.cvt)
        except SchemaError as e:
            raise SequentError(f"context variable type of {gv}: {e}")
        if not ctxty_instance(NameSet.all_but(d.banned), s.psi, rest, sig,
                              d.cvt, g):
            raise SequentError(
                f"image for {gv} does not instantiate its context variable type")


def apply_ctx_subst(sig: Signature, s: Sequent, sigma: dict) -> AppliedSubst:
    check_ctx_subst_appropriate(sig, s, sigma)
    new_noms = sorted(ctx_subst_support(sigma) - set(s.support),
                      key=lambda n: n.order_key())
    psi2, theta_r = raise_psi(s.psi, new_noms)

    def both(f: Formula) -> Formula:
        return _apply_formula(theta_r, ctxsubst_formula(sigma, f))

    xi2 = tuple(CtxVarDecl(d.var, d.banned, _apply_cvt(theta_r, d.cvt))
                for d in s.xi if d.var not in sigma)
    hyps2 = tuple(Hyp(h.name, both(h.formula)) for h in s.hyps)
    goal2 = both(s.goal)
    out = mk_sequent(tuple(s.support) + tuple(new_noms), psi2, xi2, hyps2, goal2)
    return AppliedSubst(out, theta_r, tuple(psi2))


# ---------------------------------------------------------------------------
# Permutation

def permute_sequent(pi: Permutation, s: Sequent) -> Sequent:
    from .schemas import CtxVarType
    sup = tuple(sorted((pi(n) for n in s.support), key=lambda n: n.order_key()))
    xi2 = []
    for d in s.xi:
        blocks = tuple(tuple((pi(n), permute(pi, a)) for n, a in b)
                       for b in d.cvt.blocks)
        xi2.append(CtxVarDecl(d.var, frozenset(pi(n) for n in d.banned),
                              CtxVarType(d.cvt.schema, blocks)))
    hyps2 = tuple(Hyp(h.name, permute_formula(pi, h.formula)) for h in s.hyps)
    return Sequent(sup, s.psi, tuple(xi2), hyps2, permute_formula(pi, s.goal))
