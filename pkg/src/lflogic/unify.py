"""Unification over the pattern fragment: instantiatable variables applied
to distinct nominal constants.

Problems inside the fragment have a most general solution or none at all;
the singleton most general solution is a covering set.  Anything outside
the fragment is reported as such rather than guessed at.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from . import arities
from .subst import Subst, hsubst_term, hsubst_type
from .syntax import (ArityCtx, ArityType, Arrow, Atm, AtomTy, Const, Lam,
                     Nominal, PiKind, PiTy, Signature, Term, Type, Var,
                     alpha_eq, erase, eta_expand, fresh_nominal, o)


@dataclass(frozen=True)
class Equation:
    lhs: object
    rhs: object
    arity: Optional[ArityType]  # None for type equations

    def is_type_eq(self) -> bool:
        return self.arity is None


@dataclass(frozen=True)
class UnifProblem:
    """Equations over a prohibited support set and a variables context."""
    noms: frozenset
    psi: tuple[tuple[Var, ArityType], ...]
    eqs: tuple[Equation, ...]

    def psi_map(self) -> dict:
        return dict(self.psi)


@dataclass(frozen=True)
class Solution:
    theta: Subst
    psi: tuple[tuple[Var, ArityType], ...]


@dataclass(frozen=True)
class NoSolution:
    reason: str


@dataclass(frozen=True)
class OutsideFragment:
    reason: str


Result = Union[Solution, NoSolution, OutsideFragment]


class _Fail(Exception):
    pass


class _Outside(Exception):
    pass


def generalized_var(ar: ArityType, psi: Iterable[Var], noms: Iterable[Nominal],
                    hint: str = "z") -> tuple[Var, ArityType, Term]:
    """A fresh variable raised over the given nominal listing, together
    with its long-normal spine term."""
    ns = list(noms)
    used = {v.name for v in psi}
    name = hint
    i = 1
    while name in used:
        i += 1
        name = f"{hint}{i}"
    z = Var(name)
    raised = ar
    for n in reversed(ns):
        raised = Arrow(n.arity, raised)
    term = eta_expand(z, ar, tuple(eta_expand(n, n.arity) for n in ns))
    return z, raised, term


def problem_wf(problem: UnifProblem, theta0: ArityCtx, sig: Signature) -> bool:
    """Both sides of every equation are typed alike in the problem scope."""
    env = theta0.with_vars(problem.psi).with_noms(problem.noms)
    for eq in problem.eqs:
        if eq.is_type_eq():
            if not (arities.check_type(env, sig, eq.lhs)
                    and arities.check_type(env, sig, eq.rhs)):
                return False
        else:
            if not (arities.check_term(env, eq.lhs, eq.arity)
                    and arities.check_term(env, eq.rhs, eq.arity)):
                return False
    return True


class _Solver:
    def __init__(self, problem: UnifProblem, theta0: ArityCtx, sig: Signature,
                 flex: Optional[set] = None):
        self.sig = sig
        self.theta0 = theta0
        self.psi: dict[Var, ArityType] = dict(problem.psi)
        self.flex = set(self.psi) if flex is None else set(flex)
        self.banned = set(problem.noms)
        self.bindings: dict[Var, tuple[Term, ArityType]] = {}
        self.created: dict[Var, ArityType] = {}
        self.work: list[Equation] = list(problem.eqs)
        self.used_noms: set[Nominal] = set(problem.noms)
        for eq in problem.eqs:
            for side in (eq.lhs, eq.rhs):
                self.used_noms |= side.noms

    # -- helpers ------------------------------------------------------------

    def _is_flex(self, head) -> bool:
        return isinstance(head, Var) and head in self.flex and head not in self.bindings

    def _subst(self) -> Subst:
        return Subst((x, m, ar) for x, (m, ar) in self.bindings.items())

    def _fresh_var(self, ar: ArityType, hint: str = "w") -> Var:
        v = Var(hint)
        self.created[v] = ar
        self.flex.add(v)
        return v

    def _fresh_nom(self, ar: ArityType) -> Nominal:
        n = fresh_nominal(ar, self.used_noms)
        self.used_noms.add(n)
        self.banned.add(n)
        return n

    def _arity_of_head(self, head) -> Optional[ArityType]:
        if isinstance(head, Nominal):
            return head.arity
        if isinstance(head, Const):
            return self.theta0.lookup(head)
        if isinstance(head, Var):
            if head in self.bindings:
                return self.bindings[head][1]
            return self.psi.get(head) or self.created.get(head)
        return None

    def _bind(self, x: Var, t: Term, ar: ArityType):
        if x in t.fv:
            raise _Fail(f"occurs check: {x}")
        bad = t.noms & self.banned
        if bad:
            raise _Fail(f"solution would mention prohibited names {sorted(map(str, bad))}")
        one = Subst.of((x, t, ar))
        for y, (m, br) in list(self.bindings.items()):
            m2 = hsubst_term(one, m)
            if m2 is None:
                raise _Fail("binding does not normalize")
            self.bindings[y] = (m2, br)
        self.bindings[x] = (t, ar)
        nw = []
        for eq in self.work:
            if eq.is_type_eq():
                l, r = hsubst_type(one, eq.lhs), hsubst_type(one, eq.rhs)
            else:
                l, r = hsubst_term(one, eq.lhs), hsubst_term(one, eq.rhs)
            if l is None or r is None:
                raise _Fail("equation does not normalize under binding")
            nw.append(Equation(l, r, eq.arity))
        self.work = nw

    def _pattern_spine(self, args: tuple[Term, ...]) -> list[Nominal]:
        """The nominal listing of a flex spine; raises when outside the
        fragment (non-nominal argument or repeated nominal)."""
        ns: list[Nominal] = []
        for a in args:
            n = _as_eta_nominal(a)
            if n is None:
                raise _Outside("variable applied to a non-nominal argument")
            ns.append(n)
        if len(set(ns)) != len(ns):
            raise _Outside("variable applied to repeated nominal constants")
        return ns

    # -- main loop -----------------------------------------------------------

    def run(self) -> Result:
        try:
            while self.work:
                eq = self.work.pop()
                if eq.is_type_eq():
                    self._type_eq(eq.lhs, eq.rhs)
                else:
                    self._term_eq(eq.lhs, eq.rhs, eq.arity)
        except _Fail as e:
            return NoSolution(str(e))
        except _Outside as e:
            return OutsideFragment(str(e))
        theta = self._subst()
        psi_out: dict[Var, ArityType] = {}
        for v, ar in list(self.psi.items()) + list(self.created.items()):
            if v not in self.bindings:
                psi_out[v] = ar
        for m, _ in theta.map.values():
            for v in m.fv:
                if v not in psi_out and v not in self.bindings:
                    psi_out[v] = self.psi.get(v) or self.created.get(v) or o
        return Solution(theta, tuple(psi_out.items()))

    def _type_eq(self, a1: Type, a2: Type):
        if isinstance(a1, AtomTy) and isinstance(a2, AtomTy):
            if a1.head != a2.head or len(a1.args) != len(a2.args):
                raise _Fail(f"type heads differ: {a1.head} vs {a2.head}")
            k = self.sig.lookup_type(a1.head)
            ars = []
            while isinstance(k, PiKind):
                ars.append(erase(k.dom))
                k = k.body
            for m1, m2, ar in zip(a1.args, a2.args, ars):
                self.work.append(Equation(m1, m2, ar))
            return
        if isinstance(a1, PiTy) and isinstance(a2, PiTy):
            self.work.append(Equation(a1.dom, a2.dom, None))
            n = self._fresh_nom(erase(a1.dom))
            op = eta_expand(n, erase(a1.dom))
            c1 = hsubst_type(Subst.of((a1.var, op, erase(a1.dom))), a1.cod)
            c2 = hsubst_type(Subst.of((a2.var, op, erase(a2.dom))), a2.cod)
            if c1 is None or c2 is None:
                raise _Fail("type bodies do not normalize")
            self.work.append(Equation(c1, c2, None))
            return
        raise _Fail("type structure mismatch")

    def _term_eq(self, m1: Term, m2: Term, ar: ArityType):
        if isinstance(ar, Arrow):
            if not (isinstance(m1, Lam) and isinstance(m2, Lam)):
                raise _Fail("terms at a function arity must be abstractions")
            n = self._fresh_nom(ar.left)
            op = eta_expand(n, ar.left)
            b1 = hsubst_term(Subst.of((m1.var, op, ar.left)), m1.body)
            b2 = hsubst_term(Subst.of((m2.var, op, ar.left)), m2.body)
            if b1 is None or b2 is None:
                raise _Fail("bodies do not normalize")
            self.work.append(Equation(b1, b2, ar.right))
            return
        if not (isinstance(m1, Atm) and isinstance(m2, Atm)):
            raise _Fail("ill-sorted term equation")
        f1, f2 = self._is_flex(m1.head), self._is_flex(m2.head)
        if f1 and f2:
            self._flex_flex(m1, m2)
        elif f1:
            self._flex_rigid(m1, m2)
        elif f2:
            self._flex_rigid(m2, m1)
        else:
            self._rigid_rigid(m1, m2)

    def _rigid_rigid(self, m1: Atm, m2: Atm):
        h1, h2 = m1.head, m2.head
        if h1 != h2:
            raise _Fail(f"rigid head clash: {h1} vs {h2}")
        if len(m1.args) != len(m2.args):
            raise _Fail("argument count mismatch")
        har = self._arity_of_head(h1)
        if har is None:
            raise _Fail(f"head {h1} has no arity assignment")
        ars, _ = har.flatten()
        for a1, a2, ar in zip(m1.args, m2.args, ars):
            self.work.append(Equation(a1, a2, ar))

    def _flex_rigid(self, fx: Atm, rigid: Atm):
        x = fx.head
        spine = self._pattern_spine(fx.args)
        body = self._invert(x, spine, rigid)
        self._bind(x, _abstract(body, spine), self._arity_of_head(x))

    def _invert(self, x: Var, spine: list[Nominal], t: Term,
                scope: frozenset = frozenset()) -> Term:
        """Check that `t` can become the body of x's binding: no occurrence
        of x, no escaping nominal, nested instantiatable variables pruned
        down to the spine and the locally bound variables."""
        if isinstance(t, Lam):
            return Lam(t.var, self._invert(x, spine, t.body, scope | {t.var}))
        assert isinstance(t, Atm)
        head = t.head
        if isinstance(head, Var) and head == x:
            raise _Fail(f"occurs check: {x}")
        if self._is_flex(head):
            items = []
            for a in t.args:
                h = _as_eta_head(a)
                if isinstance(h, Nominal) or (isinstance(h, Var) and h in scope):
                    items.append(h)
                else:
                    raise _Outside("variable applied to a non-nominal argument")
            if len(set(items)) != len(items):
                raise _Outside("variable applied to repeated arguments")
            keep = [i for i, it in enumerate(items)
                    if isinstance(it, Var) or it in spine]
            if len(keep) == len(items):
                return t
            har = self._arity_of_head(head)
            arg_ars, base = har.flatten()
            pruned_ar = base
            for i in reversed(keep):
                pruned_ar = Arrow(arg_ars[i], pruned_ar)
            y2 = self._fresh_var(pruned_ar, head.name)
            vs = [Var("p") for _ in items]
            body: Term = Atm(y2, tuple(eta_expand(vs[i], arg_ars[i]) for i in keep))
            for v in reversed(vs):
                body = Lam(v, body)
            self._bind(head, body, har)
            new_t = hsubst_term(Subst.of((head, body, har)), t)
            if new_t is None:
                raise _Fail("pruning did not normalize")
            return self._invert(x, spine, new_t, scope)
        if isinstance(head, Nominal) and head not in spine and head in self.banned:
            raise _Fail(f"nominal {head} escapes its scope")
        return Atm(head, tuple(self._invert(x, spine, a, scope) for a in t.args))

    def _flex_flex(self, m1: Atm, m2: Atm):
        x, y = m1.head, m2.head
        sp1 = self._pattern_spine(m1.args)
        sp2 = self._pattern_spine(m2.args)
        if x == y:
            if sp1 == sp2:
                return
            har = self._arity_of_head(x)
            arg_ars, base = har.flatten()
            keep = [i for i in range(len(sp1)) if sp1[i] == sp2[i]]
            kept_ars = [arg_ars[i] for i in keep]
            zar = base
            for a in reversed(kept_ars):
                zar = Arrow(a, zar)
            z = self._fresh_var(zar, x.name)
            vs = [Var("p") for _ in sp1]
            body: Term = Atm(z, tuple(eta_expand(vs[i], arg_ars[i]) for i in keep))
            for v in reversed(vs):
                body = Lam(v, body)
            self._bind(x, body, har)
            return
        # distinct heads: prefer keeping the older variable when one spine
        # contains the other, otherwise introduce a shared fresh variable
        sub1, sub2 = set(sp1) <= set(sp2), set(sp2) <= set(sp1)
        if sub1 and sub2:
            if x.uid <= y.uid:
                self._project(y, sp2, x, sp1)
            else:
                self._project(x, sp1, y, sp2)
            return
        if sub1:
            self._project(y, sp2, x, sp1)
            return
        if sub2:
            self._project(x, sp1, y, sp2)
            return
        common = [n for n in sp1 if n in sp2]
        base = self._arity_of_head(x).flatten()[1]
        zar = base
        for n in reversed(common):
            zar = Arrow(n.arity, zar)
        z = self._fresh_var(zar, x.name)
        for (v, sp) in ((x, sp1), (y, sp2)):
            har = self._arity_of_head(v)
            arg_ars, _ = har.flatten()
            vs = [Var("p") for _ in sp]
            pos = {n: i for i, n in enumerate(sp)}
            body: Term = Atm(z, tuple(eta_expand(vs[pos[n]], arg_ars[pos[n]])
                                      for n in common))
            for w in reversed(vs):
                body = Lam(w, body)
            self._bind(v, body, har)

    def _project(self, kill: Var, kill_spine: list[Nominal],
                 keep: Var, keep_spine: list[Nominal]):
        """Bind `kill` so that `kill kill_spine` equals `keep keep_spine`;
        requires keep_spine's names to occur in kill_spine."""
        har = self._arity_of_head(kill)
        arg_ars, _ = har.flatten()
        vs = [Var("p") for _ in kill_spine]
        pos = {n: i for i, n in enumerate(kill_spine)}
        args = tuple(eta_expand(vs[pos[n]], arg_ars[pos[n]]) for n in keep_spine)
        body: Term = Atm(keep, args)
        for v in reversed(vs):
            body = Lam(v, body)
        self._bind(kill, body, har)


def _as_eta_head(t: Term):
    """The head `h` when `t` is the long-normal form of bare `h`."""
    binders = []
    while isinstance(t, Lam):
        binders.append(t.var)
        t = t.body
    if not isinstance(t, Atm) or len(t.args) != len(binders):
        return None
    for a, v in zip(t.args, binders):
        if _as_eta_head(a) != v:
            return None
    return t.head


def _as_eta_nominal(t: Term) -> Optional[Nominal]:
    h = _as_eta_head(t)
    return h if isinstance(h, Nominal) else None


def _abstract(t: Term, spine: list[Nominal]) -> Term:
    """Wrap `t` in abstractions binding the spine nominals in order."""
    vs = [Var("q") for _ in spine]
    out = _replace_noms(t, {n: v for n, v in zip(spine, vs)})
    for v in reversed(vs):
        out = Lam(v, out)
    return out


def _replace_noms(t: Term, m: dict):
    if isinstance(t, Lam):
        return Lam(t.var, _replace_noms(t.body, m))
    assert isinstance(t, Atm)
    head = m.get(t.head, t.head) if isinstance(t.head, Nominal) else t.head
    return Atm(head, tuple(_replace_noms(a, m) for a in t.args))


def solve(problem: UnifProblem, theta0: ArityCtx, sig: Signature,
          flex: Optional[set] = None) -> Result:
    """Solve within the pattern fragment; the result is a singleton most
    general solution, a definite failure, or an explicit refusal."""
    res = _Solver(problem, theta0, sig, flex).run()
    if isinstance(res, Solution):
        _assert_solution(problem, theta0, sig, res)
    return res


def _assert_solution(problem: UnifProblem, theta0: ArityCtx, sig: Signature,
                     sol: Solution):
    from .syntax import ALL_NOMINALS
    theta = sol.theta
    assert not (theta.supp() & problem.noms), "solution mentions prohibited names"
    env = theta0.with_vars(sol.psi).with_nom_scope(ALL_NOMINALS)
    for _, m, ar in theta.triples():
        assert arities.check_term(env, m, ar), "binding is not arity preserving"
    psi_m = dict(problem.psi)
    for x, ar in dict(sol.psi).items():
        if x in psi_m:
            assert psi_m[x] == ar, "inconsistent typing for a surviving variable"
    for eq in problem.eqs:
        if eq.is_type_eq():
            l, r = hsubst_type(theta, eq.lhs), hsubst_type(theta, eq.rhs)
        else:
            l, r = hsubst_term(theta, eq.lhs), hsubst_term(theta, eq.rhs)
        assert l is not None and r is not None and alpha_eq(l, r), \
            "solution does not equate an equation"


# ---------------------------------------------------------------------------
# Covering check: one solution covers another when a residual substitution
# matches their restrictions to the problem variables.

def covers(sol2: Solution, theta1: Subst, psi: Iterable[tuple[Var, ArityType]],
           theta0: ArityCtx, sig: Signature) -> Optional[Subst]:
    """A substitution theta3 such that (theta3 o theta2) and theta1 agree
    on `psi`, or None when none is found by pattern matching."""
    psi = list(psi)
    eqs = []
    for x, ar in psi:
        lhs = hsubst_term(sol2.theta, eta_expand(x, ar))
        rhs = hsubst_term(theta1, eta_expand(x, ar))
        if lhs is None or rhs is None:
            return None
        eqs.append(Equation(lhs, rhs, ar))
    flex_vars = set(dict(sol2.psi)) | {x for x, _ in psi if x not in sol2.theta.dom()}
    prob = UnifProblem(frozenset(), tuple(dict(list(psi) + list(sol2.psi)).items()),
                       tuple(eqs))
    res = _Solver(prob, theta0, sig, flex=flex_vars).run()
    if not isinstance(res, Solution):
        return None
    theta3 = res.theta
    # verify the restriction equality explicitly
    from .subst import CompositionError, compose
    from .syntax import ALL_NOMINALS
    try:
        comp = compose(theta3, sol2.theta,
                       theta0.with_vars(res.psi).with_nom_scope(ALL_NOMINALS))
    except CompositionError:
        return None
    left = comp.restrict([x for x, _ in psi])
    right = theta1.restrict([x for x, _ in psi])
    lm = {x: m for x, m, _ in left.triples()}
    rm = {x: m for x, m, _ in right.triples()}
    for x, ar in psi:
        lt = lm.get(x, eta_expand(x, ar))
        rt = rm.get(x, eta_expand(x, ar))
        if not alpha_eq(lt, rt):
            return None
    return theta3
