"""Assertion-level formulas: atomic typing assertions over context
expressions, propositional connectives, term quantifiers indexed by arity
types, and context quantifiers indexed by context schemas.

Atomic formulas carry an optional height annotation (`@i` or `*i`), kept
as a field on the leaf so erasure is free.  Alpha-equivalence over both
term and context binders is the formula equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import arities
from .subst import Permutation, Subst, hsubst_term, hsubst_type, rename_var
from .syntax import (ArityCtx, ArityType, Nominal, Signature, Term, Type,
                     Var, _next_uid, erase)


class FormulaError(Exception):
    def __init__(self, msg: str, path: tuple = ()):
        super().__init__(msg)
        self.path = path


@dataclass(frozen=True)
class CtxVar:
    """A context variable; identity is the uid."""
    name: str
    uid: int = field(default_factory=_next_uid)

    def __str__(self):
        return self.name

    def fresh(self) -> "CtxVar":
        return CtxVar(self.name)


@dataclass(frozen=True)
class Annotation:
    kind: str  # "@" or "*"
    idx: int

    def __post_init__(self):
        assert self.kind in ("@", "*") and self.idx >= 1

    def __str__(self):
        return f"{self.kind}{self.idx}" if self.idx > 1 else self.kind


def ann_stronger_or_eq(a: Optional[Annotation], b: Optional[Annotation]) -> bool:
    """The ordering used when matching assumptions against goals."""
    if a == b:
        return True
    if b is None:
        return a is not None
    return a is not None and a.idx == b.idx and a.kind == "*" and b.kind == "@"


@dataclass(frozen=True)
class CtxExpr:
    """A context expression: optional leading context variable, then
    ordered bindings of nominal constants."""
    var: Optional[CtxVar]
    entries: tuple[tuple[Nominal, Type], ...] = ()

    @staticmethod
    def empty() -> "CtxExpr":
        return CtxExpr(None, ())

    @staticmethod
    def of_var(g: CtxVar) -> "CtxExpr":
        return CtxExpr(g, ())

    def extended(self, n: Nominal, a: Type) -> "CtxExpr":
        return CtxExpr(self.var, self.entries + ((n, a),))

    def bound_noms(self) -> frozenset:
        return frozenset(n for n, _ in self.entries)

    def noms(self) -> frozenset:
        out = set(self.bound_noms())
        for _, a in self.entries:
            out |= a.noms
        return frozenset(out)

    def fv(self) -> frozenset:
        out = frozenset()
        for _, a in self.entries:
            out |= a.fv
        return out

    def __str__(self):
        parts = ([str(self.var)] if self.var else []) + \
            [f"{n}:{a!r}" for n, a in self.entries]
        return ", ".join(parts) if parts else "."


class Formula:
    __slots__ = ("_hash",)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Formula):
            return NotImplemented
        if self._hash != other._hash:
            return False
        return f_alpha_eq(self, other)

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return self._hash

    def _seal(self, h):
        object.__setattr__(self, "_hash", h)

    def __setattr__(self, *a):
        raise AttributeError("immutable")


class Top(Formula):
    __slots__ = ()

    def __init__(self):
        self._seal(hash("top"))

    def __repr__(self):
        return "Top()"


class Bot(Formula):
    __slots__ = ()

    def __init__(self):
        self._seal(hash("bot"))

    def __repr__(self):
        return "Bot()"


class _Bin(Formula):
    __slots__ = ("left", "right")
    tag = ""

    def __init__(self, left: Formula, right: Formula):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        self._seal(hash((self.tag, left._hash, right._hash)))

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class Imp(_Bin):
    __slots__ = ()
    tag = "imp"


class And(_Bin):
    __slots__ = ()
    tag = "and"


class Or(_Bin):
    __slots__ = ()
    tag = "or"


class Atom(Formula):
    """An atomic typing assertion `{G |- M : A}` with optional annotation."""
    __slots__ = ("ctx", "term", "ty", "ann")

    def __init__(self, ctx: CtxExpr, term: Term, ty: Type,
                 ann: Optional[Annotation] = None):
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "term", term)
        object.__setattr__(self, "ty", ty)
        object.__setattr__(self, "ann", ann)
        self._seal(hash(("atom", len(ctx.entries), term._hash, ty._hash, ann)))

    def erased(self) -> "Atom":
        return self if self.ann is None else Atom(self.ctx, self.term, self.ty)

    def with_ann(self, ann: Optional[Annotation]) -> "Atom":
        return Atom(self.ctx, self.term, self.ty, ann)

    def __repr__(self):
        return f"Atom({self.ctx}, {self.term!r}, {self.ty!r}, {self.ann})"


class CtxAll(Formula):
    """Universal quantification over a context variable at a schema."""
    __slots__ = ("var", "schema", "body")

    def __init__(self, var: CtxVar, schema, body: Formula):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "body", body)
        self._seal(hash(("ctxall", body._hash)))

    def open_with(self, g: CtxVar) -> Formula:
        return ctxsubst_formula({self.var: CtxExpr.of_var(g)}, self.body)

    def __repr__(self):
        return f"CtxAll({self.var}, {self.schema!r}, {self.body!r})"


class _Quant(Formula):
    __slots__ = ("var", "arity", "body")
    tag = ""

    def __init__(self, var: Var, arity: ArityType, body: Formula):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "body", body)
        self._seal(hash((self.tag, arity, body._hash)))

    def open_with(self, t: Term) -> Optional[Formula]:
        return hsubst_formula(Subst.of((self.var, t, self.arity)), self.body)

    def __repr__(self):
        return f"{type(self).__name__}({self.var}, {self.arity}, {self.body!r})"


class All(_Quant):
    __slots__ = ()
    tag = "all"


class Ex(_Quant):
    __slots__ = ()
    tag = "ex"


TOP = Top()
BOT = Bot()


def imps(*fs: Formula) -> Formula:
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Imp(f, out)
    return out


def alls(pairs: Iterable[tuple[Var, ArityType]], body: Formula) -> Formula:
    out = body
    for v, ar in reversed(list(pairs)):
        out = All(v, ar, out)
    return out


# ---------------------------------------------------------------------------
# Alpha equivalence for formulas (exact nominals, exact annotations,
# bound term/context variables up to renaming)

def f_alpha_eq(f1: Formula, f2: Formula, m12=None, m21=None) -> bool:
    m12 = {} if m12 is None else m12
    m21 = {} if m21 is None else m21
    return _feq(f1, f2, m12, m21)


def _ctx_eq(g1: CtxExpr, g2: CtxExpr, m12, m21) -> bool:
    v1 = m12.get(g1.var, g1.var) if g1.var else None
    if v1 != g2.var:
        return False
    if len(g1.entries) != len(g2.entries):
        return False
    from .syntax import _aeq
    for (n1, a1), (n2, a2) in zip(g1.entries, g2.entries):
        if n1 != n2 or not _aeq(a1, a2, m12, m21):
            return False
    return True


def _feq(f1, f2, m12, m21) -> bool:
    if type(f1) is not type(f2):
        return False
    from .syntax import _aeq
    if isinstance(f1, (Top, Bot)):
        return True
    if isinstance(f1, _Bin):
        return _feq(f1.left, f2.left, m12, m21) and _feq(f1.right, f2.right, m12, m21)
    if isinstance(f1, Atom):
        return (f1.ann == f2.ann and _ctx_eq(f1.ctx, f2.ctx, m12, m21)
                and _aeq(f1.term, f2.term, m12, m21)
                and _aeq(f1.ty, f2.ty, m12, m21))
    if isinstance(f1, CtxAll):
        if f1.schema != f2.schema:
            return False
        return _feq_bind(f1.var, f1.body, f2.var, f2.body, m12, m21)
    if isinstance(f1, _Quant):
        if f1.arity != f2.arity:
            return False
        return _feq_bind(f1.var, f1.body, f2.var, f2.body, m12, m21)
    raise TypeError(f"f_alpha_eq: unsupported {f1!r}")


def _feq_bind(v1, b1, v2, b2, m12, m21) -> bool:
    o12, o21 = m12.get(v1), m21.get(v2)
    m12[v1], m21[v2] = v2, v1
    try:
        return _feq(b1, b2, m12, m21)
    finally:
        if o12 is None:
            del m12[v1]
        else:
            m12[v1] = o12
        if o21 is None:
            del m21[v2]
        else:
            m21[v2] = o21


# ---------------------------------------------------------------------------
# Free variables

def formula_fv(f: Formula) -> frozenset:
    if isinstance(f, (Top, Bot)):
        return frozenset()
    if isinstance(f, _Bin):
        return formula_fv(f.left) | formula_fv(f.right)
    if isinstance(f, Atom):
        return f.ctx.fv() | f.term.fv | f.ty.fv
    if isinstance(f, CtxAll):
        return formula_fv(f.body)
    if isinstance(f, _Quant):
        return formula_fv(f.body) - {f.var}
    raise TypeError


def formula_cvars(f: Formula) -> frozenset:
    if isinstance(f, (Top, Bot)):
        return frozenset()
    if isinstance(f, _Bin):
        return formula_cvars(f.left) | formula_cvars(f.right)
    if isinstance(f, Atom):
        return frozenset([f.ctx.var]) if f.ctx.var else frozenset()
    if isinstance(f, CtxAll):
        return formula_cvars(f.body) - {f.var}
    if isinstance(f, _Quant):
        return formula_cvars(f.body)
    raise TypeError


def formula_noms(f: Formula) -> frozenset:
    if isinstance(f, (Top, Bot)):
        return frozenset()
    if isinstance(f, _Bin):
        return formula_noms(f.left) | formula_noms(f.right)
    if isinstance(f, Atom):
        return f.ctx.noms() | f.term.noms | f.ty.noms
    if isinstance(f, (CtxAll, _Quant)):
        return formula_noms(f.body)
    raise TypeError


def formula_ann_indices(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        return frozenset([f.ann.idx]) if f.ann else frozenset()
    if isinstance(f, _Bin):
        return formula_ann_indices(f.left) | formula_ann_indices(f.right)
    if isinstance(f, (CtxAll, _Quant)):
        return formula_ann_indices(f.body)
    return frozenset()


# ---------------------------------------------------------------------------
# Wellformedness

def wf_ctx_expr(theta: ArityCtx, xi_names: Iterable[CtxVar], sig: Signature,
                g: CtxExpr) -> None:
    if g.var is not None and g.var not in set(xi_names):
        raise FormulaError(f"unbound context variable {g.var}", ("ctx",))
    for n, a in g.entries:
        if theta.lookup(n) is None:
            raise FormulaError(f"nominal constant {n} out of scope", ("ctx", str(n)))
        if erase(a) != n.arity:
            raise FormulaError(
                f"binding type for {n} erases to the wrong arity", ("ctx", str(n)))
        if not arities.check_type(theta, sig, a):
            raise FormulaError(f"binding type for {n} is not arity-kinded",
                               ("ctx", str(n)))


def wf_formula(theta: ArityCtx, xi_names: Iterable[CtxVar], sig: Signature,
               f: Formula) -> None:
    """Wellformedness; annotations are ignored (checked on the erasure)."""
    xi = set(xi_names)
    if isinstance(f, (Top, Bot)):
        return
    if isinstance(f, _Bin):
        try:
            wf_formula(theta, xi, sig, f.left)
        except FormulaError as e:
            raise FormulaError(str(e), ("left",) + e.path)
        try:
            wf_formula(theta, xi, sig, f.right)
        except FormulaError as e:
            raise FormulaError(str(e), ("right",) + e.path)
        return
    if isinstance(f, Atom):
        wf_ctx_expr(theta, xi, sig, f.ctx)
        if not arities.check_type(theta, sig, f.ty):
            raise FormulaError("assertion type is not arity-kinded", ("type",))
        if not arities.check_term(theta, f.term, erase(f.ty)):
            raise FormulaError("assertion subject fails arity typing", ("term",))
        return
    if isinstance(f, CtxAll):
        from .schemas import check_context_schema
        check_context_schema(sig, f.schema)
        wf_formula(theta, xi | {f.var}, sig, f.body)
        return
    if isinstance(f, _Quant):
        wf_formula(theta.with_vars([(f.var, f.arity)]), xi, sig, f.body)
        return
    raise TypeError(f"wf_formula: unsupported {f!r}")


# ---------------------------------------------------------------------------
# Substitution into formulas

def hsubst_formula(theta: Subst, f: Formula) -> Optional[Formula]:
    """Hereditary substitution distributed through the formula; bound
    variables are renamed away from the substitution as needed."""
    if theta.is_empty():
        return f
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, _Bin):
        l = hsubst_formula(theta, f.left)
        r = hsubst_formula(theta, f.right)
        return None if l is None or r is None else type(f)(l, r)
    if isinstance(f, Atom):
        entries = []
        for n, a in f.ctx.entries:
            a2 = hsubst_type(theta, a)
            if a2 is None:
                return None
            entries.append((n, a2))
        m2 = hsubst_term(theta, f.term)
        t2 = hsubst_type(theta, f.ty)
        if m2 is None or t2 is None:
            return None
        return Atom(CtxExpr(f.ctx.var, tuple(entries)), m2, t2, f.ann)
    if isinstance(f, CtxAll):
        b = hsubst_formula(theta, f.body)
        return None if b is None else CtxAll(f.var, f.schema, b)
    if isinstance(f, _Quant):
        v, body = f.var, f.body
        if v in theta.dom() or v in theta.range_fv():
            v2 = v.fresh()
            body = form_rename_var(body, v, v2)
            v = v2
        b = hsubst_formula(theta, body)
        return None if b is None else type(f)(v, f.arity, b)
    raise TypeError(f"hsubst_formula: unsupported {f!r}")


def ctxsubst_formula(sigma: dict, f: Formula) -> Formula:
    """Replace context variables by context expressions.  No check is made
    for nominal-constant clashes between the image and later bindings."""
    if not sigma:
        return f
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, _Bin):
        return type(f)(ctxsubst_formula(sigma, f.left), ctxsubst_formula(sigma, f.right))
    if isinstance(f, Atom):
        g = f.ctx
        if g.var is not None and g.var in sigma:
            img: CtxExpr = sigma[g.var]
            g = CtxExpr(img.var, img.entries + g.entries)
        return Atom(g, f.term, f.ty, f.ann)
    if isinstance(f, CtxAll):
        v, body = f.var, f.body
        image_vars = {e.var for e in sigma.values() if e.var is not None}
        if v in sigma or v in image_vars:
            v2 = v.fresh()
            body = form_rename_cvar(body, v, v2)
            v = v2
        return CtxAll(v, f.schema, ctxsubst_formula(sigma, body))
    if isinstance(f, _Quant):
        return type(f)(f.var, f.arity, ctxsubst_formula(sigma, f.body))
    raise TypeError(f"ctxsubst_formula: unsupported {f!r}")


def form_rename_var(f: Formula, old: Var, new: Var) -> Formula:
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, _Bin):
        return type(f)(form_rename_var(f.left, old, new),
                       form_rename_var(f.right, old, new))
    if isinstance(f, Atom):
        entries = tuple((n, rename_var(a, old, new)) for n, a in f.ctx.entries)
        return Atom(CtxExpr(f.ctx.var, entries), rename_var(f.term, old, new),
                    rename_var(f.ty, old, new), f.ann)
    if isinstance(f, CtxAll):
        return CtxAll(f.var, f.schema, form_rename_var(f.body, old, new))
    if isinstance(f, _Quant):
        if f.var == old:
            return f
        return type(f)(f.var, f.arity, form_rename_var(f.body, old, new))
    raise TypeError


def form_rename_cvar(f: Formula, old: CtxVar, new: CtxVar) -> Formula:
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, _Bin):
        return type(f)(form_rename_cvar(f.left, old, new),
                       form_rename_cvar(f.right, old, new))
    if isinstance(f, Atom):
        g = f.ctx
        if g.var == old:
            g = CtxExpr(new, g.entries)
        return Atom(g, f.term, f.ty, f.ann)
    if isinstance(f, CtxAll):
        if f.var == old:
            return f
        return CtxAll(f.var, f.schema, form_rename_cvar(f.body, old, new))
    if isinstance(f, _Quant):
        return type(f)(f.var, f.arity, form_rename_cvar(f.body, old, new))
    raise TypeError


# ---------------------------------------------------------------------------
# Permutation

def permute_formula(pi: Permutation, f: Formula) -> Formula:
    from .subst import permute
    if pi.is_identity():
        return f
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, _Bin):
        return type(f)(permute_formula(pi, f.left), permute_formula(pi, f.right))
    if isinstance(f, Atom):
        entries = tuple((pi(n), permute(pi, a)) for n, a in f.ctx.entries)
        return Atom(CtxExpr(f.ctx.var, entries), permute(pi, f.term),
                    permute(pi, f.ty), f.ann)
    if isinstance(f, CtxAll):
        return CtxAll(f.var, f.schema, permute_formula(pi, f.body))
    if isinstance(f, _Quant):
        return type(f)(f.var, f.arity, permute_formula(pi, f.body))
    raise TypeError


# ---------------------------------------------------------------------------
# Equivalence under a permutation, and the strength ordering

# `xi` maps each context variable in scope to the collection of nominal
# constants its instantiations must avoid; bound context variables map to
# the whole family (any permutation is harmless for them).

def ctx_expr_equiv(xi: dict, pi: Permutation, g2: CtxExpr, g1: CtxExpr) -> bool:
    if len(g2.entries) != len(g1.entries):
        return False
    if (g2.var is None) != (g1.var is None):
        return False
    if g2.var is not None:
        if g2.var != g1.var:
            return False
        banned = xi.get(g2.var)
        if banned is None:
            return False
        if not all(n in banned for n in pi.support()):
            return False
    from .subst import permute
    from .syntax import alpha_eq
    for (n2, a2), (n1, a1) in zip(g2.entries, g1.entries):
        if pi(n2) != n1 or not alpha_eq(permute(pi, a2), a1):
            return False
    return True


def formula_equiv(xi: dict, pi: Permutation, f2: Formula, f1: Formula) -> bool:
    """Equivalence of (annotation-erased) formulas under a permutation."""
    from .subst import permute
    from .syntax import alpha_eq
    if type(f2) is not type(f1):
        return False
    if isinstance(f2, (Top, Bot)):
        return True
    if isinstance(f2, _Bin):
        return (formula_equiv(xi, pi, f2.left, f1.left)
                and formula_equiv(xi, pi, f2.right, f1.right))
    if isinstance(f2, Atom):
        return (ctx_expr_equiv(xi, pi, f2.ctx, f1.ctx)
                and alpha_eq(permute(pi, f2.term), f1.term)
                and alpha_eq(permute(pi, f2.ty), f1.ty))
    if isinstance(f2, CtxAll):
        if f2.schema != f1.schema:
            return False
        from .syntax import ALL_NOMINALS
        g = f2.var.fresh()
        xi2 = dict(xi)
        xi2[g] = ALL_NOMINALS
        return formula_equiv(xi2, pi, form_rename_cvar(f2.body, f2.var, g),
                             form_rename_cvar(f1.body, f1.var, g))
    if isinstance(f2, _Quant):
        if f2.arity != f1.arity:
            return False
        z = f2.var.fresh()
        return formula_equiv(xi, pi, form_rename_var(f2.body, f2.var, z),
                             form_rename_var(f1.body, f1.var, z))
    raise TypeError


def formula_strength(xi: dict, pi: Permutation, f2: Formula, f1: Formula) -> bool:
    """Whether f2 is at least as strong as f1: implications are
    contravariant in the antecedent (checked under the inverse
    permutation), and annotations are compared leaf-wise."""
    if type(f2) is not type(f1):
        return False
    if isinstance(f2, (Top, Bot)):
        return True
    if isinstance(f2, Imp):
        return (formula_strength(xi, pi.inverse(), f1.left, f2.left)
                and formula_strength(xi, pi, f2.right, f1.right))
    if isinstance(f2, _Bin):
        return (formula_strength(xi, pi, f2.left, f1.left)
                and formula_strength(xi, pi, f2.right, f1.right))
    if isinstance(f2, Atom):
        return (ann_stronger_or_eq(f2.ann, f1.ann)
                and formula_equiv(xi, pi, f2.erased(), f1.erased()))
    if isinstance(f2, CtxAll):
        if f2.schema != f1.schema:
            return False
        from .syntax import ALL_NOMINALS
        g = f2.var.fresh()
        xi2 = dict(xi)
        xi2[g] = ALL_NOMINALS
        return formula_strength(xi2, pi, form_rename_cvar(f2.body, f2.var, g),
                                form_rename_cvar(f1.body, f1.var, g))
    if isinstance(f2, _Quant):
        if f2.arity != f1.arity:
            return False
        z = f2.var.fresh()
        return formula_strength(xi, pi, form_rename_var(f2.body, f2.var, z),
                                form_rename_var(f1.body, f1.var, z))
    raise TypeError


@dataclass(frozen=True)
class HeightAssignment:
    """Total map from annotation indices to height bounds: finitely many
    overrides over a default."""
    default: int = 0
    overrides: tuple[tuple[int, int], ...] = ()

    def __call__(self, idx: int) -> int:
        for i, m in self.overrides:
            if i == idx:
                return m
        return self.default

    def set(self, idx: int, m: int) -> "HeightAssignment":
        kept = tuple((i, v) for i, v in self.overrides if i != idx)
        return HeightAssignment(self.default, kept + ((idx, m),))
