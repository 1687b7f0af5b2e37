import pytest

from lflogic.formulas import Atom, CtxExpr, CtxVar, Ex, TOP
from lflogic.schemas import CtxVarType
from lflogic.sequents import (CtxVarDecl, Hyp, SequentError, apply_ctx_subst,
                              apply_term_subst, mk_sequent, permute_sequent,
                              raise_psi, wf_sequent)
from lflogic.subst import Permutation, Subst
from lflogic.syntax import Atm, Nominal, Var, alpha_eq, arrow, o
from tests.conftest import app, eq, of, tm, tp
from tests.test_formulas import c_schema


def simple_sequent(stlc):
    g = CtxVar("Gamma")
    e = Var("e")
    f = Atom(CtxExpr.of_var(g), Atm(e), tm())
    xi = [CtxVarDecl(g, frozenset(), CtxVarType(c_schema()))]
    d = Var("d")
    return mk_sequent([], [(e, o)], xi, [Hyp("H1", f)],
                      Ex(d, o, Atom(CtxExpr.of_var(g), Atm(d), tm())))


def test_wf_sequent(stlc):
    wf_sequent(stlc, simple_sequent(stlc))


def test_wf_sequent_rejects_banned_outside_support(stlc):
    g = CtxVar("Gamma")
    n = Nominal(o, 7)
    xi = [CtxVarDecl(g, frozenset([n]), CtxVarType(c_schema()))]
    s = mk_sequent([], [], xi, [], TOP)
    with pytest.raises(SequentError):
        wf_sequent(stlc, s)


def test_wf_annotated_iff_erased(stlc):
    from lflogic.formulas import Annotation
    s = simple_sequent(stlc)
    f = s.hyps[0].formula.with_ann(Annotation("@", 1))
    s2 = mk_sequent(s.support, s.psi, s.xi, [Hyp("H1", f)], s.goal)
    wf_sequent(stlc, s2)


def test_raise_psi_empty_listing():
    x = Var("x")
    psi, theta = raise_psi([(x, o)], [])
    (y, ar) = psi[0]
    assert ar == o
    assert theta.get(x)[0] == Atm(y)


def test_raise_psi_one_nominal():
    x = Var("x")
    n = Nominal(o, 0)
    psi, theta = raise_psi([(x, o)], [n])
    (y, ar) = psi[0]
    assert ar == arrow(o, o)
    assert theta.get(x)[0] == Atm(y, (Atm(n),))


def test_raise_psi_nothing():
    psi, theta = raise_psi([], [Nominal(o, 0)])
    assert psi == [] and theta.is_empty()


def test_apply_term_subst_identity(stlc):
    s = simple_sequent(stlc)
    out = apply_term_subst(stlc, s, Subst())
    assert out.sequent.support == s.support
    assert len(out.sequent.psi) == len(s.psi)
    # raising over nothing keeps formula shapes
    assert out.sequent.hyps[0].formula.ty == tm()


def test_apply_term_subst_new_nominal(stlc):
    s = simple_sequent(stlc)
    e = s.psi[0][0]
    n9 = Nominal(o, 9)
    out = apply_term_subst(stlc, s, Subst.of((e, Atm(n9), o)))
    assert n9 in out.sequent.support
    # the surviving variable d is raised over the new name
    assert all(ar == arrow(o, o) for _, ar in out.sequent.psi)
    wf_sequent(stlc, out.sequent)


def test_apply_term_subst_rejects_support_clash(stlc):
    s = simple_sequent(stlc)
    n0 = Nominal(o, 0)
    s2 = mk_sequent([n0], s.psi, s.xi, s.hyps, s.goal)
    e = s.psi[0][0]
    with pytest.raises(SequentError):
        apply_term_subst(stlc, s2, Subst.of((e, Atm(n0), o)))


def test_apply_term_subst_rejects_type_clash(stlc):
    s = simple_sequent(stlc)
    e = s.psi[0][0]
    bad = Subst.of((e, app("arr", app("unit"), app("unit")), arrow(o, o)))
    with pytest.raises(SequentError):
        apply_term_subst(stlc, s, bad)


def test_apply_ctx_subst(stlc):
    s = simple_sequent(stlc)
    g = s.xi[0].var
    n1, n2 = Nominal(o, 0), Nominal(o, 1)
    img = CtxExpr(None, ((n1, tm()), (n2, of(Atm(n1), app("unit")))))
    out = apply_ctx_subst(stlc, s, {g: img})
    assert out.sequent.xi == ()
    assert n1 in out.sequent.support and n2 in out.sequent.support
    got = out.sequent.hyps[0].formula
    assert got.ctx.var is None and len(got.ctx.entries) == 2
    wf_sequent(stlc, out.sequent)


def test_apply_ctx_subst_missing_variable(stlc):
    s = simple_sequent(stlc)
    with pytest.raises(SequentError):
        apply_ctx_subst(stlc, s, {CtxVar("Delta"): CtxExpr.empty()})


def test_apply_ctx_subst_rejects_bad_instance(stlc):
    s = simple_sequent(stlc)
    g = s.xi[0].var
    n1 = Nominal(o, 0)
    img = CtxExpr(None, ((n1, tp()),))
    with pytest.raises(SequentError):
        apply_ctx_subst(stlc, s, {g: img})


def test_permute_sequent_roundtrip(stlc):
    g = CtxVar("Gamma")
    n1, n2, n3 = Nominal(o, 0), Nominal(o, 1), Nominal(o, 2)
    blk = ((n1, tm()), (n2, of(Atm(n1), app("unit"))))
    xi = [CtxVarDecl(g, frozenset([n3]), CtxVarType(c_schema(), (blk,)))]
    f = Atom(CtxExpr.of_var(g), Atm(n1), tm())
    s = mk_sequent([n1, n2, n3], [], xi, [Hyp("H1", f)], TOP)
    wf_sequent(stlc, s)
    pi = Permutation.swap(n1, n3)
    s2 = permute_sequent(pi, s)
    wf_sequent(stlc, s2)
    assert permute_sequent(pi, s2).hyps == s.hyps
    assert s2.hyps[0].formula.term == Atm(n3)
    assert s2.xi[0].banned == frozenset([n1])
    assert s2.xi[0].cvt.blocks[0][0][0] == n3
