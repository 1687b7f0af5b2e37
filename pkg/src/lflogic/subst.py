"""Simultaneous hereditary substitution, composition, restriction, and
permutations of nominal constants.

Application is a decision procedure: it terminates with the substituted
expression or with None when no normalization rule applies (an arity
clash).  Callers treat None as failure, never as a crash.  Bound-variable
capture is avoided by renaming binders before descent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from . import arities
from .syntax import (ArityCtx, ArityType, Arrow, Atm, AtomTy, Expr, Kind,
                     KType, Lam, LFContext, MalformedError, Nominal, PiKind,
                     PiTy, Term, Type, Var)

SubstKey = Union[Var, Nominal]


class Subst:
    """A finite set of triples (variable, canonical term, arity type).

    Domain entries are variables in ordinary use; a nominal constant may
    appear as a key for context-entry instantiation.
    """

    def __init__(self, triples: Iterable[tuple[SubstKey, Term, ArityType]] = ()):
        self.map: dict[SubstKey, tuple[Term, ArityType]] = {}
        for x, m, ar in triples:
            if x in self.map:
                raise MalformedError(f"duplicate substitution variable {x}")
            self.map[x] = (m, ar)

    @staticmethod
    def of(*triples: tuple[SubstKey, Term, ArityType]) -> "Subst":
        return Subst(triples)

    def triples(self) -> list[tuple[SubstKey, Term, ArityType]]:
        return [(x, m, ar) for x, (m, ar) in self.map.items()]

    def dom(self) -> set[SubstKey]:
        return set(self.map)

    def range_terms(self) -> list[Term]:
        return [m for m, _ in self.map.values()]

    def ctx(self) -> list[tuple[Var, ArityType]]:
        return [(x, ar) for x, (_, ar) in self.map.items() if isinstance(x, Var)]

    def supp(self) -> frozenset:
        out = frozenset()
        for m in self.range_terms():
            out |= m.noms
        return out

    def range_fv(self) -> frozenset:
        out = frozenset()
        for m in self.range_terms():
            out |= m.fv
        return out

    def size(self) -> int:
        return max((ar.size() for _, ar in self.map.values()), default=0)

    def get(self, x: SubstKey):
        return self.map.get(x)

    def restrict(self, keep: Iterable[Var]) -> "Subst":
        ks = set(keep)
        return Subst((x, m, ar) for x, (m, ar) in self.map.items() if x in ks)

    def without(self, drop: Iterable[SubstKey]) -> "Subst":
        ds = set(drop)
        return Subst((x, m, ar) for x, (m, ar) in self.map.items() if x not in ds)

    def is_empty(self) -> bool:
        return not self.map

    def __len__(self):
        return len(self.map)

    def __eq__(self, other):
        return isinstance(other, Subst) and self.map == other.map

    def __repr__(self):
        items = ", ".join(f"{x}:={m!r}" for x, (m, _) in self.map.items())
        return f"Subst({items})"


EMPTY_SUBST = Subst()


# ---------------------------------------------------------------------------
# Application

def hsubst_term(theta: Subst, m: Term) -> Optional[Term]:
    if theta.is_empty() or not _touches(theta, m):
        return m
    if isinstance(m, Lam):
        v, body = m.var, m.body
        if v in theta.dom() or v in theta.range_fv():
            v2 = v.fresh()
            body = rename_var(body, v, v2)
            v = v2
        b = hsubst_term(theta, body)
        return None if b is None else Lam(v, b)
    if isinstance(m, Atm):
        r = hsubst_atomic(theta, m)
        return None if r is None else r[1]
    raise TypeError(f"hsubst_term: not a term: {m!r}")


def hsubst_atomic(theta: Subst, r: Atm):
    """Substitute into a spine.

    Returns ('atom', R') when the head survives, ('canon', M, arity) when
    the head was replaced and the spine normalized away, or None.
    """
    hit = theta.get(r.head) if isinstance(r.head, (Var, Nominal)) else None
    if hit is None:
        args2 = []
        for a in r.args:
            a2 = hsubst_term(theta, a)
            if a2 is None:
                return None
            args2.append(a2)
        return ("atom", Atm(r.head, tuple(args2)))
    cur, ar = hit
    for a in r.args:
        a2 = hsubst_term(theta, a)
        if a2 is None:
            return None
        if not isinstance(cur, Lam) or not isinstance(ar, Arrow):
            return None
        red = hsubst_term(Subst.of((cur.var, a2, ar.left)), cur.body)
        if red is None:
            return None
        cur, ar = red, ar.right
    return ("canon", cur, ar)


def hsubst_type(theta: Subst, a: Type) -> Optional[Type]:
    if theta.is_empty() or not _touches(theta, a):
        return a
    if isinstance(a, AtomTy):
        args2 = []
        for m in a.args:
            m2 = hsubst_term(theta, m)
            if m2 is None:
                return None
            args2.append(m2)
        return AtomTy(a.head, tuple(args2))
    if isinstance(a, PiTy):
        v, dom, cod = a.var, a.dom, a.cod
        if v in theta.dom() or v in theta.range_fv():
            v2 = v.fresh()
            cod = rename_var(cod, v, v2)
            v = v2
        d = hsubst_type(theta, dom)
        c = hsubst_type(theta, cod)
        return None if d is None or c is None else PiTy(v, d, c)
    raise TypeError(f"hsubst_type: not a type: {a!r}")


def hsubst_kind(theta: Subst, k: Kind) -> Optional[Kind]:
    if isinstance(k, KType):
        return k
    if isinstance(k, PiKind):
        v, dom, body = k.var, k.dom, k.body
        if v in theta.dom() or v in theta.range_fv():
            v2 = v.fresh()
            body = rename_var(body, v, v2)
            v = v2
        d = hsubst_type(theta, dom)
        b = hsubst_kind(theta, body)
        return None if d is None or b is None else PiKind(v, d, b)
    raise TypeError(f"hsubst_kind: not a kind: {k!r}")


def hsubst_context(theta: Subst, ctx: LFContext) -> Optional[LFContext]:
    """Distribute into binding types; fails on a bound-name clash."""
    entries = []
    for k, t in ctx:
        if k in theta.dom() or (isinstance(k, Var) and k in theta.range_fv()):
            return None
        t2 = hsubst_type(theta, t)
        if t2 is None:
            return None
        entries.append((k, t2))
    return LFContext(entries)


def _touches(theta: Subst, e: Expr) -> bool:
    dom = theta.dom()
    if any(v in dom for v in e.fv):
        return True
    return any(n in dom for n in e.noms)


# ---------------------------------------------------------------------------
# Renaming (a special case of substitution that cannot fail)

def rename_var(e, old: Var, new: Var):
    """Replace free occurrences of a variable by a fresh one."""
    if isinstance(e, (Term, Type, Kind)) and old not in e.fv:
        return e
    if isinstance(e, Lam):
        if e.var == old:
            return e
        return Lam(e.var, rename_var(e.body, old, new))
    if isinstance(e, Atm):
        head = new if e.head == old else e.head
        return Atm(head, tuple(rename_var(a, old, new) for a in e.args))
    if isinstance(e, AtomTy):
        return AtomTy(e.head, tuple(rename_var(a, old, new) for a in e.args))
    if isinstance(e, PiTy):
        dom = rename_var(e.dom, old, new)
        if e.var == old:
            return PiTy(e.var, dom, e.cod)
        return PiTy(e.var, dom, rename_var(e.cod, old, new))
    if isinstance(e, KType):
        return e
    if isinstance(e, PiKind):
        dom = rename_var(e.dom, old, new)
        if e.var == old:
            return PiKind(e.var, dom, e.body)
        return PiKind(e.var, dom, rename_var(e.body, old, new))
    raise TypeError(f"rename_var: unsupported {e!r}")


# ---------------------------------------------------------------------------
# Composition and related algebra

class CompositionError(Exception):
    pass


def compose(theta2: Subst, theta1: Subst, theta_ctx: ArityCtx) -> Subst:
    """theta2 after theta1, checked arity-compatible relative to theta_ctx."""
    if not arities.subst_preserves(theta_ctx, theta2.triples()):
        raise CompositionError("outer substitution is not arity preserving")
    inner_ctx = theta_ctx.with_vars([(x, ar) for x, ar in theta2.ctx()])
    if not arities.subst_preserves(inner_ctx, theta1.triples()):
        raise CompositionError("inner substitution is not arity preserving")
    triples: list[tuple[SubstKey, Term, ArityType]] = []
    for x, m, ar in theta1.triples():
        m2 = hsubst_term(theta2, m)
        if m2 is None:
            raise CompositionError(f"composition undefined at {x}")
        triples.append((x, m2, ar))
    dom1 = theta1.dom()
    for y, n, br in theta2.triples():
        if y not in dom1:
            triples.append((y, n, br))
    return Subst(triples)


def restrict(theta: Subst, psi: Iterable[Var]) -> Subst:
    return theta.restrict(psi)


# ---------------------------------------------------------------------------
# Permutations of nominal constants

@dataclass(frozen=True)
class Permutation:
    """A finitely supported, arity-preserving bijection on nominals."""
    mapping: tuple[tuple[Nominal, Nominal], ...]

    def __post_init__(self):
        m = dict(self.mapping)
        if len(m) != len(self.mapping):
            raise MalformedError("permutation maps a constant twice")
        if set(m) != set(m.values()):
            raise MalformedError("permutation is not a bijection on its support")
        for a, b in m.items():
            if a.arity != b.arity:
                raise MalformedError("permutation must preserve arity types")

    @staticmethod
    def of(*pairs: tuple[Nominal, Nominal]) -> "Permutation":
        return Permutation(tuple((a, b) for a, b in pairs if a != b))

    @staticmethod
    def swap(a: Nominal, b: Nominal) -> "Permutation":
        if a == b:
            return IDENTITY_PERM
        return Permutation(((a, b), (b, a)))

    @staticmethod
    def identity() -> "Permutation":
        return IDENTITY_PERM

    def __call__(self, n: Nominal) -> Nominal:
        for a, b in self.mapping:
            if a == n:
                return b
        return n

    def inverse(self) -> "Permutation":
        return Permutation(tuple((b, a) for a, b in self.mapping))

    def support(self) -> frozenset:
        return frozenset(a for a, b in self.mapping if a != b)

    def is_identity(self) -> bool:
        return all(a == b for a, b in self.mapping)


IDENTITY_PERM = Permutation(())


def permute(pi: Permutation, e):
    """Apply a permutation structurally; dispatches on the value's type."""
    if isinstance(e, Nominal):
        return pi(e)
    if pi.is_identity():
        return e
    if isinstance(e, (Term, Type, Kind)):
        return _permute_expr(pi, e)
    if isinstance(e, LFContext):
        return LFContext((pi(k) if isinstance(k, Nominal) else k, _permute_expr(pi, t))
                         for k, t in e)
    if isinstance(e, Subst):
        return Subst((pi(x) if isinstance(x, Nominal) else x, _permute_expr(pi, m), ar)
                     for x, m, ar in e.triples())
    if isinstance(e, frozenset):
        return frozenset(pi(n) for n in e)
    if isinstance(e, tuple):
        return tuple(permute(pi, x) for x in e)
    raise TypeError(f"permute: unsupported value {e!r}")


def _permute_expr(pi: Permutation, e):
    if isinstance(e, Lam):
        return Lam(e.var, _permute_expr(pi, e.body))
    if isinstance(e, Atm):
        head = pi(e.head) if isinstance(e.head, Nominal) else e.head
        return Atm(head, tuple(_permute_expr(pi, a) for a in e.args))
    if isinstance(e, AtomTy):
        return AtomTy(e.head, tuple(_permute_expr(pi, a) for a in e.args))
    if isinstance(e, PiTy):
        return PiTy(e.var, _permute_expr(pi, e.dom), _permute_expr(pi, e.cod))
    if isinstance(e, KType):
        return e
    if isinstance(e, PiKind):
        return PiKind(e.var, _permute_expr(pi, e.dom), _permute_expr(pi, e.body))
    raise TypeError(f"permute: unsupported expression {e!r}")
