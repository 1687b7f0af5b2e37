"""Abstract syntax for the kernel: arity types, terms, types, kinds,
signatures, contexts, nominal constants, and arity contexts.

Terms are kept in canonical form by construction: the grammar has no
beta-redex.  Atomic terms are spines ``h M1 ... Mn`` whose head is a
constant, a variable, or a nominal constant.  Alpha-equivalence is the
equality used everywhere; every node carries a precomputed
alpha-invariant hash and its free-variable/nominal sets.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union


class MalformedError(Exception):
    """Raised when an input value violates a structural invariant."""


# ---------------------------------------------------------------------------
# Arity types

class ArityType:
    __slots__ = ()

    def size(self) -> int:
        raise NotImplementedError

    def flatten(self) -> tuple[list["ArityType"], "ArityType"]:
        """Return (argument arities, final target) of a right-nested arrow."""
        args: list[ArityType] = []
        t: ArityType = self
        while isinstance(t, Arrow):
            args.append(t.left)
            t = t.right
        return args, t


@dataclass(frozen=True)
class O(ArityType):
    __slots__ = ()

    def size(self) -> int:
        return 0

    def __str__(self):
        return "o"


@dataclass(frozen=True)
class Arrow(ArityType):
    left: ArityType
    right: ArityType

    def size(self) -> int:
        return 1 + self.left.size() + self.right.size()

    def __str__(self):
        l = f"({self.left})" if isinstance(self.left, Arrow) else str(self.left)
        return f"{l} -> {self.right}"


o = O()


def arrow(*tys: ArityType) -> ArityType:
    """Right-nested arrow from a list of arity types (last is the target)."""
    if not tys:
        raise MalformedError("arrow needs at least one arity type")
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = Arrow(t, out)
    return out


# ---------------------------------------------------------------------------
# Variables, constants, nominal constants

_uid_counter = itertools.count(1)
_uid_lock = threading.Lock()


def _next_uid() -> int:
    with _uid_lock:
        return next(_uid_counter)


@dataclass(frozen=True, eq=True)
class Var:
    """A term-level variable; identity is the uid, `name` is a print hint."""
    name: str
    uid: int = field(default_factory=_next_uid)

    def __str__(self):
        return self.name

    def fresh(self) -> "Var":
        return Var(self.name)


@dataclass(frozen=True)
class Const:
    """A term-level constant declared in a signature."""
    name: str

    def __str__(self):
        return self.name


# Nominal constant families are ordered by first registration; the family
# of base arity is always registered first so its members print as n, n1, ...
_nominal_families: dict[ArityType, int] = {}
_nominal_lock = threading.Lock()


def nominal_family(ar: ArityType) -> int:
    with _nominal_lock:
        fam = _nominal_families.get(ar)
        if fam is None:
            fam = len(_nominal_families)
            _nominal_families[ar] = fam
        return fam


@dataclass(frozen=True)
class Nominal:
    """A nominal constant: the `index`-th member of its arity family."""
    arity: ArityType
    index: int

    def __post_init__(self):
        nominal_family(self.arity)

    def family(self) -> int:
        return nominal_family(self.arity)

    def order_key(self) -> tuple[int, int]:
        return (self.family(), self.index)

    def __str__(self):
        base = "n" if self.index == 0 else f"n{self.index}"
        fam = self.family()
        return base if fam == 0 else base + "'" * fam

    def __lt__(self, other: "Nominal"):
        return self.order_key() < other.order_key()


nominal_family(o)

Head = Union[Const, Var, Nominal]


def fresh_nominal(ar: ArityType, avoid: Iterable[Nominal]) -> Nominal:
    """The least nominal constant of arity `ar` outside `avoid`."""
    used = {n.index for n in avoid if n.arity == ar}
    i = 0
    while i in used:
        i += 1
    return Nominal(ar, i)


def fresh_nominals(ars: Iterable[ArityType], avoid: Iterable[Nominal]) -> list[Nominal]:
    out: list[Nominal] = []
    taken = list(avoid)
    for ar in ars:
        n = fresh_nominal(ar, taken)
        out.append(n)
        taken.append(n)
    return out


# ---------------------------------------------------------------------------
# Terms, types, kinds

class Expr:
    """Base for terms/types/kinds; subclasses set _hash, _fv, _noms."""
    __slots__ = ("_hash", "_fv", "_noms")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        if self._hash != other._hash:
            return False
        return alpha_eq(self, other)

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return self._hash

    @property
    def fv(self) -> frozenset:
        return self._fv

    @property
    def noms(self) -> frozenset:
        return self._noms

    def _seal(self, h: int, fv: frozenset, noms: frozenset):
        object.__setattr__(self, "_hash", h)
        object.__setattr__(self, "_fv", fv)
        object.__setattr__(self, "_noms", noms)


_EMPTY: frozenset = frozenset()


class Term(Expr):
    __slots__ = ()


class Lam(Term):
    __slots__ = ("var", "body")

    def __init__(self, var: Var, body: Term):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)
        self._seal(hash(("lam", body._hash)), body._fv - {var}, body._noms)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __repr__(self):
        return f"Lam({self.var!r}, {self.body!r})"


class Atm(Term):
    """Atomic term: a head applied to a spine of canonical arguments."""
    __slots__ = ("head", "args")

    def __init__(self, head: Head, args: tuple[Term, ...] = ()):
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "args", tuple(args))
        fv = frozenset([head]) if isinstance(head, Var) else _EMPTY
        noms = frozenset([head]) if isinstance(head, Nominal) else _EMPTY
        hh = hash(("atm", head if not isinstance(head, Var) else "var",
                   tuple(a._hash for a in self.args)))
        for a in self.args:
            fv |= a._fv
            noms |= a._noms
        self._seal(hh, fv, noms)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __repr__(self):
        return f"Atm({self.head!r}, {self.args!r})"


class Type(Expr):
    __slots__ = ()


class AtomTy(Type):
    """Atomic type: a type-level constant applied to term arguments."""
    __slots__ = ("head", "args")

    def __init__(self, head: str, args: tuple[Term, ...] = ()):
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "args", tuple(args))
        fv = _EMPTY
        noms = _EMPTY
        for a in self.args:
            fv |= a._fv
            noms |= a._noms
        self._seal(hash(("atomty", head, tuple(a._hash for a in self.args))), fv, noms)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __repr__(self):
        return f"AtomTy({self.head!r}, {self.args!r})"


class PiTy(Type):
    __slots__ = ("var", "dom", "cod")

    def __init__(self, var: Var, dom: Type, cod: Type):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        self._seal(hash(("pity", dom._hash, cod._hash)),
                   dom._fv | (cod._fv - {var}), dom._noms | cod._noms)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __repr__(self):
        return f"PiTy({self.var!r}, {self.dom!r}, {self.cod!r})"


class Kind(Expr):
    __slots__ = ()


class KType(Kind):
    __slots__ = ()

    def __init__(self):
        self._seal(hash("ktype"), _EMPTY, _EMPTY)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __repr__(self):
        return "KType()"


class PiKind(Kind):
    __slots__ = ("var", "dom", "body")

    def __init__(self, var: Var, dom: Type, body: Kind):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "body", body)
        self._seal(hash(("pikind", dom._hash, body._hash)),
                   dom._fv | (body._fv - {var}), dom._noms | body._noms)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __repr__(self):
        return f"PiKind({self.var!r}, {self.dom!r}, {self.body!r})"


KTYPE = KType()


def arrow_ty(dom: Type, cod: Type) -> PiTy:
    """Non-dependent function type."""
    return PiTy(Var("_"), dom, cod)


def ty_arrows(*tys: Type) -> Type:
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = arrow_ty(t, out)
    return out


def pi_strip(a: Type) -> tuple[list[tuple[Var, Type]], Type]:
    """Split a type into its binder prefix and atomic target."""
    binders = []
    while isinstance(a, PiTy):
        binders.append((a.var, a.dom))
        a = a.cod
    return binders, a


def kind_strip(k: Kind) -> list[tuple[Var, Type]]:
    binders = []
    while isinstance(k, PiKind):
        binders.append((k.var, k.dom))
        k = k.body
    return binders


# ---------------------------------------------------------------------------
# Alpha equivalence

def alpha_eq(e1, e2) -> bool:
    """Equality modulo renaming of bound variables."""
    return _aeq(e1, e2, {}, {})


def _aeq(e1, e2, m12: dict, m21: dict) -> bool:
    if type(e1) is not type(e2):
        return False
    if isinstance(e1, Atm):
        h1, h2 = e1.head, e2.head
        if isinstance(h1, Var) or isinstance(h2, Var):
            if not (isinstance(h1, Var) and isinstance(h2, Var)):
                return False
            if m12.get(h1, h1) != h2 or m21.get(h2, h2) != h1:
                return False
        elif h1 != h2:
            return False
        if len(e1.args) != len(e2.args):
            return False
        return all(_aeq(a, b, m12, m21) for a, b in zip(e1.args, e2.args))
    if isinstance(e1, Lam):
        return _aeq_bind(e1.var, e1.body, e2.var, e2.body, m12, m21)
    if isinstance(e1, AtomTy):
        if e1.head != e2.head or len(e1.args) != len(e2.args):
            return False
        return all(_aeq(a, b, m12, m21) for a, b in zip(e1.args, e2.args))
    if isinstance(e1, PiTy):
        if not _aeq(e1.dom, e2.dom, m12, m21):
            return False
        return _aeq_bind(e1.var, e1.cod, e2.var, e2.cod, m12, m21)
    if isinstance(e1, KType):
        return True
    if isinstance(e1, PiKind):
        if not _aeq(e1.dom, e2.dom, m12, m21):
            return False
        return _aeq_bind(e1.var, e1.body, e2.var, e2.body, m12, m21)
    raise TypeError(f"alpha_eq: unsupported node {type(e1)}")


def _aeq_bind(v1, b1, v2, b2, m12, m21) -> bool:
    o12, o21 = m12.get(v1), m21.get(v2)
    m12[v1], m21[v2] = v2, v1
    try:
        return _aeq(b1, b2, m12, m21)
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
# Erasure

def erase(a: Type) -> ArityType:
    """Arity skeleton of a type: dependencies forgotten."""
    if isinstance(a, AtomTy):
        return o
    if isinstance(a, PiTy):
        return Arrow(erase(a.dom), erase(a.cod))
    raise TypeError(f"erase: not a type: {a!r}")


def erase_kind(k: Kind) -> ArityType:
    if isinstance(k, KType):
        return o
    if isinstance(k, PiKind):
        return Arrow(erase(k.dom), erase_kind(k.body))
    raise TypeError(f"erase_kind: not a kind: {k!r}")


# ---------------------------------------------------------------------------
# Eta expansion: atomic spines of arrow arity are wrapped in abstractions
# so that every produced term is in long normal form.

def eta_expand(head: Head, ar: ArityType, args: tuple[Term, ...] = ()) -> Term:
    """Long-normal term for `head args` where the spine has arity `ar`."""
    arg_ars, _ = ar.flatten()
    if not arg_ars:
        return Atm(head, args)
    vs = [Var("x") for _ in arg_ars]
    spine = tuple(args) + tuple(eta_expand(v, a) for v, a in zip(vs, arg_ars))
    out: Term = Atm(head, spine)
    for v in reversed(vs):
        out = Lam(v, out)
    return out


# ---------------------------------------------------------------------------
# Signatures

@dataclass(frozen=True)
class TermDecl:
    name: str
    ty: Type


@dataclass(frozen=True)
class TypeDecl:
    name: str
    kind: Kind


Decl = Union[TermDecl, TypeDecl]


class Signature:
    """An ordered list of constant declarations with unique names."""

    def __init__(self, decls: Iterable[Decl] = ()):
        self.decls: tuple[Decl, ...] = tuple(decls)
        self._terms: dict[str, Type] = {}
        self._types: dict[str, Kind] = {}
        for d in self.decls:
            if d.name in self._terms or d.name in self._types:
                raise MalformedError(f"duplicate declaration: {d.name}")
            if isinstance(d, TermDecl):
                self._terms[d.name] = d.ty
            else:
                self._types[d.name] = d.kind

    def lookup_term(self, name: str) -> Optional[Type]:
        return self._terms.get(name)

    def lookup_type(self, name: str) -> Optional[Kind]:
        return self._types.get(name)

    def term_decls(self) -> list[TermDecl]:
        return [d for d in self.decls if isinstance(d, TermDecl)]

    def names(self) -> set[str]:
        return set(self._terms) | set(self._types)

    def extended(self, decl: Decl) -> "Signature":
        return Signature(self.decls + (decl,))

    def __iter__(self):
        return iter(self.decls)

    def __repr__(self):
        return f"Signature({[d.name for d in self.decls]})"


# ---------------------------------------------------------------------------
# Contexts (kernel-level): ordered bindings of variables or nominal
# constants to types.

CtxKey = Union[Var, Nominal]


class LFContext:
    def __init__(self, entries: Iterable[tuple[CtxKey, Type]] = ()):
        self.entries: tuple[tuple[CtxKey, Type], ...] = tuple(entries)

    def keys(self) -> list[CtxKey]:
        return [k for k, _ in self.entries]

    def lookup(self, key: CtxKey) -> Optional[Type]:
        for k, t in reversed(self.entries):
            if k == key:
                return t
        return None

    def extended(self, key: CtxKey, ty: Type) -> "LFContext":
        return LFContext(self.entries + ((key, ty),))

    def noms(self) -> frozenset:
        out = set()
        for k, t in self.entries:
            if isinstance(k, Nominal):
                out.add(k)
            out |= t.noms
        return frozenset(out)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other):
        return isinstance(other, LFContext) and list(self.entries) == list(other.entries)

    def __hash__(self):
        return hash(tuple(self.entries))

    def __repr__(self):
        return f"LFContext({self.entries!r})"


EMPTY_CTX = LFContext()


# ---------------------------------------------------------------------------
# Name sets: finite or cofinite collections of nominal constants.  The
# cofinite form is needed wherever "every nominal constant except ..."
# must be represented.

@dataclass(frozen=True)
class NameSet:
    finite: bool
    elems: frozenset  # members if finite, excluded members otherwise

    def __contains__(self, n: Nominal) -> bool:
        return (n in self.elems) == self.finite

    def union_fin(self, more: Iterable[Nominal]) -> "NameSet":
        if self.finite:
            return NameSet(True, self.elems | frozenset(more))
        return NameSet(False, self.elems - frozenset(more))

    @staticmethod
    def of(ns: Iterable[Nominal]) -> "NameSet":
        return NameSet(True, frozenset(ns))

    @staticmethod
    def all_but(ns: Iterable[Nominal]) -> "NameSet":
        return NameSet(False, frozenset(ns))


ALL_NOMINALS = NameSet.all_but(())
NO_NOMINALS = NameSet.of(())


# ---------------------------------------------------------------------------
# Arity contexts: functional assignments of arity types to constants and
# variables, plus a nominal-constant scope (each nominal's arity is
# intrinsic, so the scope only records membership).

class ArityCtx:
    def __init__(self, consts: dict[str, ArityType] | None = None,
                 vars: dict[Var, ArityType] | None = None,
                 noms: NameSet = NO_NOMINALS):
        self.consts = consts or {}
        self.vars = vars or {}
        self.noms = noms

    def lookup(self, key) -> Optional[ArityType]:
        if isinstance(key, Const):
            return self.consts.get(key.name)
        if isinstance(key, str):
            return self.consts.get(key)
        if isinstance(key, Var):
            return self.vars.get(key)
        if isinstance(key, Nominal):
            return key.arity if key in self.noms else None
        return None

    def assigns(self, key) -> bool:
        return self.lookup(key) is not None

    def with_vars(self, more: Iterable[tuple[Var, ArityType]]) -> "ArityCtx":
        """Left-biased extension: `more` wins over existing assignments."""
        vs = dict(self.vars)
        vs.update(more)
        return ArityCtx(self.consts, vs, self.noms)

    def with_noms(self, ns: Iterable[Nominal]) -> "ArityCtx":
        return ArityCtx(self.consts, dict(self.vars), self.noms.union_fin(ns))

    def with_nom_scope(self, scope: NameSet) -> "ArityCtx":
        return ArityCtx(self.consts, dict(self.vars), scope)

    def __repr__(self):
        return f"ArityCtx(consts={list(self.consts)}, vars={list(map(str, self.vars))}, noms={self.noms})"


def induced_arity_context(sig: Signature, ctx: LFContext = EMPTY_CTX) -> ArityCtx:
    """Arity assignments obtained by erasing every classifier in sight."""
    consts: dict[str, ArityType] = {}
    for d in sig:
        if d.name in consts:
            raise MalformedError(f"duplicate declaration: {d.name}")
        consts[d.name] = erase(d.ty) if isinstance(d, TermDecl) else erase_kind(d.kind)
    vars: dict[Var, ArityType] = {}
    noms: set[Nominal] = set()
    for k, t in ctx:
        if isinstance(k, Var):
            if k in vars:
                raise MalformedError(f"duplicate context binding: {k}")
            vars[k] = erase(t)
        else:
            if k in noms:
                raise MalformedError(f"duplicate context binding: {k}")
            noms.add(k)
    return ArityCtx(consts, vars, NameSet.of(noms))
