"""Block and context schemas, their wellformedness, and the instantiation
relations connecting them to context expressions and context variable
types.

A block schema is a template `{x1:a1,...,xm:am} y1:A1,...,yk:Ak`: choosing
distinct nominal constants for the body variables and arity-typed terms
for the header variables yields one block of bindings.  A context schema
is an ordered collection of alternatives; its instances are sequences of
blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import arities
from .formulas import CtxExpr
from .subst import Subst, hsubst_type
from .syntax import (ArityCtx, ArityType, NameSet, Nominal, Signature,
                     Term, Type, Var, erase, eta_expand)
from .unify import Equation, Solution, UnifProblem, _Solver


class SchemaError(Exception):
    def __init__(self, msg: str, path: tuple = ()):
        super().__init__(msg)
        self.path = path


@dataclass(frozen=True)
class BlockSchema:
    header: tuple[tuple[Var, ArityType], ...]
    body: tuple[tuple[Var, Type], ...]

    def arities(self) -> list[ArityType]:
        return [erase(a) for _, a in self.body]

    def __eq__(self, other):
        if not isinstance(other, BlockSchema):
            return NotImplemented
        if len(self.header) != len(other.header) or len(self.body) != len(other.body):
            return False
        if [ar for _, ar in self.header] != [ar for _, ar in other.header]:
            return False
        m12 = {v1: v2 for (v1, _), (v2, _) in zip(self.header, other.header)}
        m21 = {v2: v1 for (v1, _), (v2, _) in zip(self.header, other.header)}
        from .syntax import _aeq
        for (y1, a1), (y2, a2) in zip(self.body, other.body):
            if not _aeq(a1, a2, m12, m21):
                return False
            m12[y1], m21[y2] = y2, y1
        return True

    def __hash__(self):
        return hash((len(self.header), len(self.body),
                     tuple(ar for _, ar in self.header)))


@dataclass(frozen=True)
class ContextSchema:
    blocks: tuple[BlockSchema, ...]
    name: str = field(default="", compare=False)

    def __str__(self):
        return self.name or f"<schema:{len(self.blocks)} blocks>"


Block = tuple[tuple[Nominal, Type], ...]


@dataclass(frozen=True)
class CtxVarType:
    """A schema together with the blocks already forced during reasoning."""
    schema: ContextSchema
    blocks: tuple[Block, ...] = ()

    def block_noms(self) -> frozenset:
        out = set()
        for b in self.blocks:
            for n, _ in b:
                out.add(n)
        return frozenset(out)

    def all_noms(self) -> frozenset:
        out = set()
        for b in self.blocks:
            for n, a in b:
                out.add(n)
                out |= a.noms
        return frozenset(out)


# ---------------------------------------------------------------------------
# Wellformedness of schemas

def check_block_schema(sig: Signature, b: BlockSchema) -> None:
    from .syntax import induced_arity_context
    names = [v for v, _ in b.header] + [y for y, _ in b.body]
    if len(set(names)) != len(names):
        raise SchemaError("header and body variables must be distinct")
    theta = induced_arity_context(sig).with_vars(list(b.header))
    for y, a in b.body:
        if not arities.check_type(theta, sig, a):
            raise SchemaError(f"body type for {y} is not arity-kinded", (str(y),))
        theta = theta.with_vars([(y, erase(a))])


def check_context_schema(sig: Signature, c: ContextSchema) -> None:
    for i, b in enumerate(c.blocks):
        try:
            check_block_schema(sig, b)
        except SchemaError as e:
            raise SchemaError(str(e), (i,) + e.path)


# ---------------------------------------------------------------------------
# Instantiation

def _body_with_names(b: BlockSchema, ns: list[Nominal]) -> Optional[list[Type]]:
    """Body types with the body variables replaced by the given nominals;
    None when the replacement does not normalize."""
    out: list[Type] = []
    theta = Subst()
    for (y, a), n in zip(b.body, ns):
        a2 = hsubst_type(theta, a)
        if a2 is None:
            return None
        out.append(a2)
        theta = Subst(theta.triples() + [(y, eta_expand(n, erase(a)), erase(a))])
    return out


def is_block_instance(nset: NameSet, psi: Iterable[tuple[Var, ArityType]],
                      sig: Signature, b: BlockSchema,
                      entries: Block) -> Optional[Subst]:
    """The header substitution that generates `entries` from `b`, if any.

    The chosen nominals must be distinct, have the erased body arities,
    and lie inside `nset`; header instantiations must be arity-typed over
    `nset`, `psi`, and the signature constants.
    """
    if len(entries) != len(b.body):
        return None
    ns = [n for n, _ in entries]
    if len(set(ns)) != len(ns):
        return None
    for n, (_, a) in zip(ns, b.body):
        if n not in nset or n.arity != erase(a):
            return None
    templates = _body_with_names(b, ns)
    if templates is None:
        return None
    from .syntax import induced_arity_context
    theta0 = induced_arity_context(sig)
    psi = list(psi)
    header_vars = [(x, ar) for x, ar in b.header]
    eqs = [Equation(tmpl, actual, None)
           for tmpl, (_, actual) in zip(templates, entries)]
    prob = UnifProblem(frozenset(), tuple(header_vars + psi), tuple(eqs))
    res = _Solver(prob, theta0, sig, flex=set(x for x, _ in header_vars)).run()
    if not isinstance(res, Solution):
        return None
    env = theta0.with_vars(psi).with_nom_scope(nset)
    theta = res.theta
    witness = []
    for x, ar in header_vars:
        hit = theta.get(x)
        if hit is None:
            # unconstrained header variable: certify existence with any
            # canonical filler over the permitted symbols
            filler = _default_term(env, sig, ar)
            if filler is None:
                return None
            witness.append((x, filler, ar))
            continue
        if not arities.check_term(env, hit[0], ar):
            return None
        witness.append((x, hit[0], ar))
    return Subst(witness)


def _default_term(env: ArityCtx, sig: Signature, ar: ArityType) -> Optional[Term]:
    for d in sig.term_decls():
        if erase(d.ty) == ar:
            from .syntax import Const
            return eta_expand(Const(d.name), ar)
    return None


def is_schema_instance(nset: NameSet, psi: Iterable[tuple[Var, ArityType]],
                       sig: Signature, c: ContextSchema,
                       g: CtxExpr) -> bool:
    """Whether a variable-free context expression is a sequence of block
    instantiations of the schema."""
    if g.var is not None:
        return False
    psi = list(psi)
    entries = list(g.entries)
    lengths = sorted({len(b.body) for b in c.blocks}, reverse=True)

    seen: dict[int, bool] = {}

    def go(upto: int) -> bool:
        if upto == 0:
            return True
        if upto in seen:
            return seen[upto]
        ok = False
        for k in lengths:
            if k == 0 or k > upto:
                continue
            seg = tuple(entries[upto - k:upto])
            if any(is_block_instance(nset, psi, sig, b, seg) is not None
                   for b in c.blocks if len(b.body) == k) and go(upto - k):
                ok = True
                break
        seen[upto] = ok
        return ok

    return go(len(entries))


def one_step_instance(nset: NameSet, psi, sig: Signature, c: ContextSchema,
                      entries: Block) -> bool:
    return any(is_block_instance(nset, psi, sig, b, entries) is not None
               for b in c.blocks)


# ---------------------------------------------------------------------------
# Context variable types

def wf_ctxvar_ty(nset: NameSet, psi: Iterable[tuple[Var, ArityType]],
                 sig: Signature, cvt: CtxVarType) -> None:
    psi = list(psi)
    for i, blk in enumerate(cvt.blocks):
        if not one_step_instance(nset, psi, sig, cvt.schema, blk):
            raise SchemaError(
                f"block {i} is not an instantiation of the schema", (i,))


def ctxty_instance(nset: NameSet, psi: Iterable[tuple[Var, ArityType]],
                   xi: dict, sig: Signature, cvt: CtxVarType,
                   g: CtxExpr) -> bool:
    """Whether `g` matches the context variable type: its recorded blocks
    in order, interspersed with fresh instantiations of the schema, and an
    optional leading variable of the same schema.

    `xi` maps context variables to (banned name set, CtxVarType) pairs.
    The leading-variable case demands that every name the variable may use
    lies inside `nset`, which is checkable only for cofinite `nset`.
    """
    psi = list(psi)
    entries = list(g.entries)
    blocks = list(cvt.blocks)

    def leaf(remaining_blocks: list[Block]) -> bool:
        if remaining_blocks:
            return False
        if g.var is None:
            return True
        hit = xi.get(g.var)
        if hit is None:
            return False
        banned, g_cvt = hit
        if g_cvt.schema != cvt.schema:
            return False
        # every name outside the variable's prohibition set must be allowed
        if nset.finite:
            return False
        return nset.elems <= frozenset(banned)

    def go(upto: int, blocks_upto: int) -> bool:
        if upto == 0:
            return leaf(blocks[:blocks_upto])
        # consume the last recorded block exactly
        if blocks_upto > 0:
            blk = blocks[blocks_upto - 1]
            k = len(blk)
            if k <= upto and tuple(entries[upto - k:upto]) == tuple(blk):
                if go(upto - k, blocks_upto - 1):
                    return True
        # or absorb a fresh one-step instantiation
        for b in cvt.schema.blocks:
            k = len(b.body)
            if k == 0 or k > upto:
                continue
            seg = tuple(entries[upto - k:upto])
            if is_block_instance(nset, psi, sig, b, seg) is not None:
                if go(upto - k, blocks_upto):
                    return True
        return False

    return go(len(entries), len(blocks))
