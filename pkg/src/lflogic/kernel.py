"""Formation checking for signatures, contexts, kinds, types, and terms.

Checking is bidirectional.  Binders are opened with fresh nominal
constants, so context entries may bind either variables or nominals.
Judgements that succeed return a Derivation carrying a height: leaves
count 1, an abstraction adds 1 to its body, and the focused rule for an
atomic head adds 1 to the maximum of its argument obligations.
"""

from __future__ import annotations

from dataclasses import dataclass


from . import arities
from .subst import Subst, hsubst_kind, hsubst_term, hsubst_type
from .syntax import (ArityCtx, Atm, AtomTy, Const, CtxKey, EMPTY_CTX, KType,
                     Kind, LFContext, Lam, Nominal, PiKind, PiTy, Signature,
                     Term, TermDecl, Type, Var, alpha_eq, erase, eta_expand,
                     fresh_nominal)


class CheckError(Exception):
    """A formation judgement failed; `path` locates the failing subterm."""

    def __init__(self, msg: str, path: tuple = ()):
        super().__init__(msg)
        self.path = path

    def at(self, step) -> "CheckError":
        return CheckError(str(self), (step,) + self.path)


@dataclass(frozen=True)
class Derivation:
    judgement: str
    subjects: tuple
    height: int
    children: tuple = ()


def _derive(judgement, subjects, children=()) -> Derivation:
    h = 1 + max((c.height for c in children), default=0)
    return Derivation(judgement, tuple(subjects), h, tuple(children))


class Kernel:
    """Formation checking against a fixed signature, with caching."""

    def __init__(self, sig: Signature, check_sig: bool = True):
        self.sig = sig
        self._ctx_cache: dict = {}
        self._type_wf_cache: dict = {}
        if check_sig:
            self.check_signature()

    # -- signatures and contexts ------------------------------------------

    def check_signature(self) -> None:
        seen: set[str] = set()
        prefix = Signature()
        for d in self.sig:
            if d.name in seen:
                raise CheckError(f"duplicate declaration: {d.name}", (d.name,))
            sub = Kernel(prefix, check_sig=False)
            try:
                if isinstance(d, TermDecl):
                    if d.ty.fv or d.ty.noms:
                        raise CheckError("classifier must be closed")
                    sub.check_type(EMPTY_CTX, d.ty)
                else:
                    if d.kind.fv or d.kind.noms:
                        raise CheckError("classifier must be closed")
                    sub.check_kind(EMPTY_CTX, d.kind)
            except CheckError as e:
                raise e.at(d.name)
            seen.add(d.name)
            prefix = prefix.extended(d)

    def check_context(self, ctx: LFContext) -> None:
        key = ctx
        hit = self._ctx_cache.get(key)
        if hit is not None:
            if isinstance(hit, CheckError):
                raise hit
            return
        try:
            seen: list[CtxKey] = []
            prefix = EMPTY_CTX
            for k, t in ctx:
                if any(k == s for s in seen):
                    raise CheckError(f"duplicate context binding: {k}", (str(k),))
                self.check_type(prefix, t)
                seen.append(k)
                prefix = prefix.extended(k, t)
        except CheckError as e:
            self._ctx_cache[key] = e
            raise
        self._ctx_cache[key] = True

    # -- kinds and types ---------------------------------------------------

    def check_kind(self, ctx: LFContext, k: Kind) -> Derivation:
        if isinstance(k, KType):
            return _derive("kind", (ctx, k))
        if isinstance(k, PiKind):
            d1 = self.check_type(ctx, k.dom)
            n = self._fresh_for(ctx, k.dom, k.body)
            body = hsubst_kind(Subst.of((k.var, eta_expand(n, erase(k.dom)), erase(k.dom))), k.body)
            if body is None:
                raise CheckError("kind body does not normalize", ("pi-kind",))
            d2 = self.check_kind(ctx.extended(n, k.dom), body)
            return _derive("kind", (ctx, k), (d1, d2))
        raise CheckError(f"not a kind: {k!r}")

    def check_type(self, ctx: LFContext, a: Type) -> Derivation:
        key = (ctx, a)
        hit = self._type_wf_cache.get(key)
        if hit is not None:
            if isinstance(hit, CheckError):
                raise hit
            return hit
        try:
            if isinstance(a, AtomTy):
                out = self.focused_check_atomic_kind(ctx, a)
            elif isinstance(a, PiTy):
                d1 = self.check_type(ctx, a.dom)
                n = self._fresh_for(ctx, a.dom, a.cod)
                cod = hsubst_type(Subst.of((a.var, eta_expand(n, erase(a.dom)), erase(a.dom))), a.cod)
                if cod is None:
                    raise CheckError("type body does not normalize", ("pi-type",))
                d2 = self.check_type(ctx.extended(n, a.dom), cod)
                out = _derive("type", (ctx, a), (d1, d2))
            else:
                raise CheckError(f"not a type: {a!r}")
        except CheckError as e:
            self._type_wf_cache[key] = e
            raise
        self._type_wf_cache[key] = out
        return out

    def focused_check_atomic_kind(self, ctx: LFContext, p: AtomTy) -> Derivation:
        k = self.sig.lookup_type(p.head)
        if k is None:
            raise CheckError(f"unbound type constant {p.head}", (p.head,))
        children = []
        theta = Subst()
        rest = k
        for i, m in enumerate(p.args):
            rest_s = hsubst_kind(theta, rest)
            if rest_s is None or not isinstance(rest_s, PiKind):
                raise CheckError(f"{p.head} is applied to too many arguments",
                                 (p.head, i))
            children.append(self.check_term(ctx, m, rest_s.dom))
            theta = Subst(theta.triples() + [(rest_s.var, m, erase(rest_s.dom))])
            rest = rest_s.body
        final = hsubst_kind(theta, rest)
        if final is None:
            raise CheckError("kind instance does not normalize", (p.head,))
        if not isinstance(final, KType):
            raise CheckError(f"{p.head} is underapplied", (p.head,))
        return _derive("atomic-kind", (ctx, p), tuple(children))

    # -- terms --------------------------------------------------------------

    def check_term(self, ctx: LFContext, m: Term, a: Type) -> Derivation:
        if isinstance(m, Lam):
            if not isinstance(a, PiTy):
                raise CheckError("abstraction must have a function type", ("lam",))
            n = self._fresh_for(ctx, a.dom, m, a)
            ar = erase(a.dom)
            opened = eta_expand(n, ar)
            body = hsubst_term(Subst.of((m.var, opened, ar)), m.body)
            cod = hsubst_type(Subst.of((a.var, opened, ar)), a.cod)
            if body is None or cod is None:
                raise CheckError("abstraction does not normalize", ("lam",))
            d = self.check_term(ctx.extended(n, a.dom), body, cod)
            return Derivation("term", (ctx, m, a), d.height + 1, (d,))
        if isinstance(m, Atm):
            if not isinstance(a, AtomTy):
                raise CheckError("atomic term cannot have a function type", ("atom",))
            return self.focused_check_atomic(ctx, m, a)
        raise CheckError(f"not a term: {m!r}")

    def classifier_of_head(self, ctx: LFContext, head) -> Type:
        if isinstance(head, Const):
            t = self.sig.lookup_term(head.name)
            if t is None:
                raise CheckError(f"unbound constant {head.name}", (head.name,))
            return t
        t = ctx.lookup(head)
        if t is None:
            raise CheckError(f"unbound head {head}", (str(head),))
        return t

    def focused_check_atomic(self, ctx: LFContext, r: Atm, p: AtomTy) -> Derivation:
        """Check an atomic term against an atomic type through the head's
        classifier, accumulating the argument instantiation."""
        a = self.classifier_of_head(ctx, r.head)
        children = []
        theta = Subst()
        rest: Type = a
        for i, m in enumerate(r.args):
            rest_s = hsubst_type(theta, rest)
            if rest_s is None or not isinstance(rest_s, PiTy):
                raise CheckError(f"head {r.head} applied to too many arguments",
                                 (str(r.head), i))
            children.append(self.check_term(ctx, m, rest_s.dom))
            theta = Subst(theta.triples() + [(rest_s.var, m, erase(rest_s.dom))])
            rest = rest_s.cod
        final = hsubst_type(theta, rest)
        if final is None:
            raise CheckError("classifier instance does not normalize", (str(r.head),))
        if not alpha_eq(final, p):
            raise CheckError(
                f"target type mismatch at head {r.head}", (str(r.head), "target"))
        return _derive("atomic-term", (ctx, r, p), tuple(children))

    # -- helpers -------------------------------------------------------------

    def _fresh_for(self, ctx: LFContext, dom: Type, *exprs) -> Nominal:
        """Fresh nominal at the arity of `dom`, avoiding every nominal in
        the context and the given expressions."""
        avoid = set(ctx.noms()) | set(dom.noms)
        for e in exprs:
            avoid |= e.noms
        return fresh_nominal(erase(dom), avoid)


# ---------------------------------------------------------------------------
# Judgement transformations mirroring the structural facts about
# derivations: weakening, strengthening, exchange, and instantiation.

@dataclass(frozen=True)
class TermJudgement:
    ctx: LFContext
    term: Term
    ty: Type


class TransformError(Exception):
    """A side condition of a judgement transformation is violated."""


def weaken(kernel: Kernel, j: TermJudgement, key: CtxKey, ty: Type) -> tuple[TermJudgement, Derivation]:
    if j.ctx.lookup(key) is not None or any(k == key for k in j.ctx.keys()):
        raise TransformError(f"{key} already bound in the context")
    occ = (j.term.noms | j.ty.noms) if isinstance(key, Nominal) else (j.term.fv | j.ty.fv)
    if key in occ:
        raise TransformError(f"{key} is not fresh for the judgement")
    kernel.check_type(j.ctx, ty)
    before = kernel.check_term(j.ctx, j.term, j.ty)
    out = TermJudgement(j.ctx.extended(key, ty), j.term, j.ty)
    after = kernel.check_term(out.ctx, out.term, out.ty)
    if after.height != before.height:
        raise TransformError("weakening changed the derivation height")
    return out, after


def strengthen(kernel: Kernel, j: TermJudgement, key: CtxKey) -> tuple[TermJudgement, Derivation]:
    entries = list(j.ctx)
    idx = None
    for i, (k, _) in enumerate(entries):
        if k == key:
            idx = i
    if idx is None:
        raise TransformError(f"{key} is not bound in the context")
    occurs = j.term.fv | j.ty.fv if isinstance(key, Var) else j.term.noms | j.ty.noms
    if key in occurs:
        raise TransformError(f"{key} occurs in the judgement")
    for k, t in entries[idx + 1:]:
        tail_occ = t.fv if isinstance(key, Var) else t.noms
        if key in tail_occ:
            raise TransformError(f"{key} occurs in a later binding")
    before = kernel.check_term(j.ctx, j.term, j.ty)
    out = TermJudgement(LFContext(entries[:idx] + entries[idx + 1:]), j.term, j.ty)
    after = kernel.check_term(out.ctx, out.term, out.ty)
    if after.height != before.height:
        raise TransformError("strengthening changed the derivation height")
    return out, after


def exchange(kernel: Kernel, j: TermJudgement, pos: int) -> tuple[TermJudgement, Derivation]:
    """Swap the adjacent bindings at positions pos and pos+1."""
    entries = list(j.ctx)
    if not 0 <= pos < len(entries) - 1:
        raise TransformError("exchange position out of range")
    (k1, t1), (k2, t2) = entries[pos], entries[pos + 1]
    k1_occ = t2.fv if isinstance(k1, Var) else t2.noms
    if k1 in k1_occ:
        raise TransformError(f"{k1} appears in the type of {k2}")
    swapped = entries[:pos] + [(k2, t2), (k1, t1)] + entries[pos + 2:]
    before = kernel.check_term(j.ctx, j.term, j.ty)
    out = TermJudgement(LFContext(swapped), j.term, j.ty)
    kernel.check_context(out.ctx)
    after = kernel.check_term(out.ctx, out.term, out.ty)
    if after.height != before.height:
        raise TransformError("exchange changed the derivation height")
    return out, after


def instantiate(kernel: Kernel, j: TermJudgement, key: CtxKey, witness: Term) -> tuple[TermJudgement, Derivation]:
    """Substitute a checked witness for a context binding, rewriting the
    suffix of the context and the judgement subjects."""
    entries = list(j.ctx)
    idx = None
    for i, (k, _) in enumerate(entries):
        if k == key:
            idx = i
            break
    if idx is None:
        raise TransformError(f"{key} is not bound in the context")
    prefix = LFContext(entries[:idx])
    a0 = entries[idx][1]
    kernel.check_term(prefix, witness, a0)
    theta = Subst.of((key, witness, erase(a0)))
    suffix = []
    for k, t in entries[idx + 1:]:
        t2 = hsubst_type(theta, t)
        if t2 is None:
            raise TransformError("suffix type does not normalize")
        suffix.append((k, t2))
    term2 = hsubst_term(theta, j.term)
    ty2 = hsubst_type(theta, j.ty)
    if term2 is None or ty2 is None:
        raise TransformError("judgement subjects do not normalize")
    out = TermJudgement(LFContext(entries[:idx] + suffix), term2, ty2)
    after = kernel.check_term(out.ctx, out.term, out.ty)
    return out, after


# ---------------------------------------------------------------------------
# Convenience wrappers over a transient kernel

def check_signature(sig: Signature) -> None:
    Kernel(sig)


def check_context(sig: Signature, ctx: LFContext) -> None:
    Kernel(sig).check_context(ctx)


def check_term(sig: Signature, ctx: LFContext, m: Term, a: Type) -> Derivation:
    return Kernel(sig).check_term(ctx, m, a)


def check_type(sig: Signature, ctx: LFContext, a: Type) -> Derivation:
    return Kernel(sig).check_type(ctx, a)


def check_kind(sig: Signature, ctx: LFContext, k: Kind) -> Derivation:
    return Kernel(sig).check_kind(ctx, k)


def arity_check_term(theta: ArityCtx, m: Term, ar) -> bool:
    return arities.check_term(theta, m, ar)


def arity_kind_type(theta: ArityCtx, sig: Signature, a: Type) -> bool:
    return arities.check_type(theta, sig, a)
