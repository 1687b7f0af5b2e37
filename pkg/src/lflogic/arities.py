"""Arity typing for terms and arity kinding for types.

Canonical terms check against an arity type (abstractions against arrows,
atomic terms only against the base arity); atomic terms synthesize.  Types
are arity-kinded by demanding that atomic heads are applied exactly as
their declared kinds prescribe.
"""

from __future__ import annotations

from .syntax import (Arrow, ArityCtx, ArityType, Atm, AtomTy, KType, Lam,
                     PiKind, PiTy, Signature, Term, Type, erase, o)


def synth_atomic(theta: ArityCtx, t: Atm) -> ArityType | None:
    """Arity type of an atomic spine, or None when unassigned/ill-formed."""
    ar = theta.lookup(t.head)
    if ar is None:
        return None
    for arg in t.args:
        if not isinstance(ar, Arrow):
            return None
        if not check_term(theta, arg, ar.left):
            return None
        ar = ar.right
    return ar


def check_term(theta: ArityCtx, m: Term, ar: ArityType) -> bool:
    """Whether `m` has arity type `ar` (long-normal discipline)."""
    if isinstance(m, Lam):
        if not isinstance(ar, Arrow):
            return False
        return check_term(theta.with_vars([(m.var, ar.left)]), m.body, ar.right)
    if isinstance(m, Atm):
        if ar != o:
            return False
        return synth_atomic(theta, m) == o
    return False


def infer_term(theta: ArityCtx, m: Term) -> ArityType | None:
    """Arity type of `m` when it is determined by the structure of `m`.

    Abstractions do not determine their argument arity, so inference only
    succeeds for atomic terms; used by callers that track arities anyway.
    """
    if isinstance(m, Atm):
        at = synth_atomic(theta, m)
        return at if at == o else None
    return None


def synth_kind(theta: ArityCtx, sig: Signature, a: AtomTy):
    """Residual kind of an atomic type head after consuming its arguments."""
    k = sig.lookup_type(a.head)
    if k is None:
        return None
    for arg in a.args:
        if not isinstance(k, PiKind):
            return None
        if not check_term(theta, arg, erase(k.dom)):
            return None
        k = k.body
    return k


def check_type(theta: ArityCtx, sig: Signature, a: Type) -> bool:
    """Arity kinding: atomic heads fully applied, binders tracked by erasure."""
    if isinstance(a, AtomTy):
        return isinstance(synth_kind(theta, sig, a), KType)
    if isinstance(a, PiTy):
        if not check_type(theta, sig, a.dom):
            return False
        inner = theta.with_vars([(a.var, erase(a.dom))])
        return check_type(inner, sig, a.cod)
    return False


def subst_preserves(theta: ArityCtx, triples) -> bool:
    """Whether every substitution triple's term checks at its arity type."""
    return all(check_term(theta, m, ar) for _, m, ar in triples)
