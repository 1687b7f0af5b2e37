import random

import pytest

from lflogic.subst import Subst, hsubst_term
from lflogic.syntax import (Atm, Lam, Nominal, Var, alpha_eq, arrow, erase,
                            eta_expand, induced_arity_context, o)
from lflogic.unify import (Equation, NoSolution, OutsideFragment, Solution,
                           UnifProblem, covers, generalized_var, problem_wf,
                           solve)
from tests.conftest import app, eq, idlam, of, tm, tp


def mkproblem(noms, psi, eqs):
    return UnifProblem(frozenset(noms), tuple(psi), tuple(eqs))


def test_generalized_var_plain():
    z, ar, t = generalized_var(o, [], [])
    assert ar == o and t == Atm(z)


def test_generalized_var_raised():
    n = Nominal(o, 0)
    z, ar, t = generalized_var(o, [], [n])
    assert ar == arrow(o, o)
    assert t == Atm(z, (Atm(n),))


def test_generalized_var_avoids_names():
    z, _, _ = generalized_var(o, [Var("z"), Var("z2")], [])
    assert z.name not in ("z", "z2")


def test_identity_equation(stlc):
    theta0 = induced_arity_context(stlc)
    r = app("empty")
    res = solve(mkproblem([], [], [Equation(r, r, o)]), theta0, stlc)
    assert isinstance(res, Solution)
    assert res.theta.is_empty()


def test_rigid_rigid_clash(stlc):
    theta0 = induced_arity_context(stlc)
    t1, t2 = Var("T1"), Var("T2")
    lhs = of(app("empty"), Atm(t1))
    rhs = of(app("app", app("empty"), app("empty")), Atm(t2))
    res = solve(mkproblem([], [(t1, o), (t2, o)],
                          [Equation(lhs, rhs, None)]), theta0, stlc)
    assert isinstance(res, NoSolution)


def test_inversion(stlc):
    theta0 = induced_arity_context(stlc)
    n = Nominal(o, 0)
    x = Var("X")
    res = solve(mkproblem([n], [(x, arrow(o, o))],
                          [Equation(Atm(x, (Atm(n),)), app("empty"), o)]),
                theta0, stlc)
    assert isinstance(res, Solution)
    m, ar = res.theta.get(x)
    assert isinstance(m, Lam) and m.body == app("empty")
    back = hsubst_term(res.theta, Atm(x, (Atm(n),)))
    assert back == app("empty")


def test_inversion_spine_use(stlc):
    theta0 = induced_arity_context(stlc)
    n = Nominal(o, 0)
    x = Var("X")
    res = solve(mkproblem([n], [(x, arrow(o, o))],
                          [Equation(Atm(x, (Atm(n),)), app("app", Atm(n), app("empty")), o)]),
                theta0, stlc)
    assert isinstance(res, Solution)
    back = hsubst_term(res.theta, Atm(x, (Atm(n),)))
    assert back == app("app", Atm(n), app("empty"))


def test_escape_fails(stlc):
    theta0 = induced_arity_context(stlc)
    n, n1 = Nominal(o, 0), Nominal(o, 1)
    x = Var("X")
    res = solve(mkproblem([n, n1], [(x, arrow(o, o))],
                          [Equation(Atm(x, (Atm(n),)), Atm(n1), o)]),
                theta0, stlc)
    assert isinstance(res, NoSolution)


def test_occurs_check(stlc):
    theta0 = induced_arity_context(stlc)
    x = Var("X")
    res = solve(mkproblem([], [(x, o)],
                          [Equation(Atm(x), app("app", Atm(x), app("empty")), o)]),
                theta0, stlc)
    assert isinstance(res, NoSolution)


def test_flex_flex_same_spine_keeps_older(stlc):
    theta0 = induced_arity_context(stlc)
    t1 = Var("t1")
    t2 = Var("t2")
    assert t1.uid < t2.uid
    res = solve(mkproblem([], [(t1, o), (t2, o)],
                          [Equation(Atm(t2), Atm(t1), o)]), theta0, stlc)
    assert isinstance(res, Solution)
    assert set(res.theta.dom()) == {t2}
    assert res.theta.get(t2)[0] == Atm(t1)


def test_flex_flex_same_var_prune(stlc):
    theta0 = induced_arity_context(stlc)
    n, n1 = Nominal(o, 0), Nominal(o, 1)
    x = Var("X")
    res = solve(mkproblem([n, n1], [(x, arrow(o, o))],
                          [Equation(Atm(x, (Atm(n),)), Atm(x, (Atm(n1),)), o)]),
                theta0, stlc)
    assert isinstance(res, Solution)
    m, _ = res.theta.get(x)
    assert isinstance(m, Lam) and m.var not in m.body.fv


def test_under_binders(stlc):
    theta0 = induced_arity_context(stlc)
    x = Var("X")
    y = Var("y")
    lhs = Lam(y, Atm(x, (Atm(y),)))
    rhs = idlam()
    res = solve(mkproblem([], [(x, arrow(o, o))],
                          [Equation(lhs, rhs, arrow(o, o))]), theta0, stlc)
    assert isinstance(res, Solution)
    assert alpha_eq(res.theta.get(x)[0], idlam())


def test_outside_fragment_compound_arg(stlc):
    theta0 = induced_arity_context(stlc)
    x = Var("X")
    res = solve(mkproblem([], [(x, arrow(o, o))],
                          [Equation(Atm(x, (app("empty"),)), app("empty"), o)]),
                theta0, stlc)
    assert isinstance(res, OutsideFragment)


def test_outside_fragment_repeated_nominal(stlc):
    theta0 = induced_arity_context(stlc)
    n = Nominal(o, 0)
    x = Var("X")
    res = solve(mkproblem([n], [(x, arrow(o, arrow(o, o)))],
                          [Equation(Atm(x, (Atm(n), Atm(n))), Atm(n), o)]),
                theta0, stlc)
    assert isinstance(res, OutsideFragment)


def test_outside_fragment_var_arg(stlc):
    theta0 = induced_arity_context(stlc)
    x, v = Var("X"), Var("v")
    res = solve(mkproblem([], [(x, arrow(o, o)), (v, o)],
                          [Equation(Atm(x, (Atm(v),)), app("empty"), o)]),
                theta0, stlc)
    assert isinstance(res, OutsideFragment)


def test_problem_wf(stlc):
    theta0 = induced_arity_context(stlc)
    x = Var("X")
    good = mkproblem([], [(x, o)], [Equation(Atm(x), app("empty"), o)])
    assert problem_wf(good, theta0, stlc)
    bad = mkproblem([], [(x, o)], [Equation(Atm(x), app("empty"), arrow(o, o))])
    assert not problem_wf(bad, theta0, stlc)


def test_covering_simple(stlc):
    theta0 = induced_arity_context(stlc)
    x = Var("X")
    psi = [(x, o)]
    res = solve(mkproblem([], psi, [Equation(of(Atm(x), app("unit")),
                                             of(app("empty"), app("unit")), None)]),
                theta0, stlc)
    assert isinstance(res, Solution)
    planted = Subst.of((x, app("empty"), o))
    theta3 = covers(res, planted, psi, theta0, stlc)
    assert theta3 is not None


def test_covering_with_residual(stlc):
    theta0 = induced_arity_context(stlc)
    x, y = Var("X"), Var("Y")
    psi = [(x, o), (y, o)]
    # solving X = app Y Y against a planted closed instance
    res = solve(mkproblem([], psi, [Equation(Atm(x), app("app", Atm(y), Atm(y)), o)]),
                theta0, stlc)
    assert isinstance(res, Solution)
    planted = Subst.of((x, app("app", app("empty"), app("empty")), o),
                       (y, app("empty"), o))
    theta3 = covers(res, planted, psi, theta0, stlc)
    assert theta3 is not None
