import pytest

from lflogic.formulas import (Annotation, Atom, BOT, CtxAll, CtxExpr, CtxVar,
                              Ex, All, FormulaError, Imp, TOP,
                              ann_stronger_or_eq, ctxsubst_formula,
                              formula_equiv, formula_strength, f_alpha_eq,
                              hsubst_formula, permute_formula, wf_formula)
from lflogic.subst import Permutation, Subst
from lflogic.syntax import (ALL_NOMINALS, Atm, NameSet, Nominal, Var,
                            induced_arity_context, o)
from tests.conftest import app, eq, idlam, of, tm, tp


def env_all(stlc):
    return induced_arity_context(stlc).with_nom_scope(ALL_NOMINALS)


def c_schema():
    from lflogic.schemas import BlockSchema, ContextSchema
    t, x, y = Var("T"), Var("x"), Var("y")
    return ContextSchema((BlockSchema(((t, o),), ((x, tm()), (y, of(Atm(x), Atm(t))))),),
                         name="c")


def uniqueness_formula(goal_in_gamma=True):
    g = CtxVar("Gamma")
    e, t1, t2, d1, d2, d3 = (Var(s) for s in ["e", "t1", "t2", "d1", "d2", "d3"])
    gg = CtxExpr.of_var(g)
    target = CtxExpr.of_var(g) if goal_in_gamma else CtxExpr.empty()
    body = Imp(Atom(gg, Atm(e), tm()),
           Imp(Atom(gg, Atm(t1), tp()),
           Imp(Atom(gg, Atm(t2), tp()),
           Imp(Atom(gg, Atm(d1), of(Atm(e), Atm(t1))),
           Imp(Atom(gg, Atm(d2), of(Atm(e), Atm(t2))),
               Ex(d3, o, Atom(target, Atm(d3), eq(Atm(t1), Atm(t2)))))))))
    out = body
    for v in [d2, d1, t2, t1, e]:
        out = All(v, o, out)
    return CtxAll(g, c_schema(), out)


def test_wf_uniqueness_formula(stlc):
    wf_formula(env_all(stlc), set(), stlc, uniqueness_formula())
    wf_formula(env_all(stlc), set(), stlc, uniqueness_formula(False))


def test_wf_allows_duplicate_context_names(stlc):
    n = Nominal(o, 0)
    f = Atom(CtxExpr(None, ((n, tm()), (n, tp()))), app("empty"), tm())
    wf_formula(env_all(stlc), set(), stlc, f)


def test_wf_unbound_context_variable(stlc):
    g = CtxVar("Gamma")
    f = Atom(CtxExpr.of_var(g), app("empty"), tm())
    with pytest.raises(FormulaError):
        wf_formula(env_all(stlc), set(), stlc, f)
    wf_formula(env_all(stlc), {g}, stlc, f)


def test_hsubst_formula_simple(stlc):
    g = CtxVar("Gamma")
    e = Var("e")
    f = Atom(CtxExpr.of_var(g), Atm(e), tm())
    out = hsubst_formula(Subst.of((e, app("empty"), o)), f)
    assert out == Atom(CtxExpr.of_var(g), app("empty"), tm())


def test_ctxsubst_formula(stlc):
    g = CtxVar("Gamma")
    n1 = Nominal(o, 0)
    f = Atom(CtxExpr.of_var(g), Atm(n1), tm())
    out = ctxsubst_formula({g: CtxExpr(None, ((n1, tm()),))}, f)
    assert out == Atom(CtxExpr(None, ((n1, tm()),)), Atm(n1), tm())


def test_hsubst_formula_renames_bound(stlc):
    x = Var("x")
    f = All(x, o, Atom(CtxExpr.empty(), Atm(x), tm()))
    out = hsubst_formula(Subst.of((x, app("empty"), o)), f)
    assert isinstance(out, All)
    assert out == f  # binder renamed, body untouched


def test_formula_equiv_identity(stlc):
    f = uniqueness_formula()
    assert formula_equiv({}, Permutation.identity(), f, f)


def test_formula_equiv_swap():
    n, n1 = Nominal(o, 0), Nominal(o, 1)
    pi = Permutation.swap(n, n1)
    f2 = Atom(CtxExpr(None, ((n1, tm()),)), Atm(n1), tm())
    f1 = Atom(CtxExpr(None, ((n, tm()),)), Atm(n), tm())
    assert formula_equiv({}, pi, f2, f1)


def test_formula_equiv_ctx_var_name_condition():
    n, n1 = Nominal(o, 0), Nominal(o, 1)
    pi = Permutation.swap(n, n1)
    g = CtxVar("Gamma")
    f2 = Atom(CtxExpr(g, ((n1, tm()),)), Atm(n1), tm())
    f1 = Atom(CtxExpr(g, ((n, tm()),)), Atm(n), tm())
    # permitted when the variable's instantiations avoid the swapped names
    assert formula_equiv({g: NameSet.of([n, n1])}, pi, f2, f1)
    # rejected when the variable might use them
    assert not formula_equiv({g: NameSet.of([])}, pi, f2, f1)


def test_strength_annotations():
    at = Atom(CtxExpr.empty(), app("empty"), tm())
    star = at.with_ann(Annotation("*", 1))
    amp = at.with_ann(Annotation("@", 1))
    pi = Permutation.identity()
    assert formula_strength({}, pi, star, amp)
    assert formula_strength({}, pi, star, at)
    assert formula_strength({}, pi, amp, at)
    assert not formula_strength({}, pi, amp, star)
    assert not formula_strength({}, pi, at, amp)


def test_strength_contravariant_antecedent():
    at = Atom(CtxExpr.empty(), app("empty"), tm())
    star = at.with_ann(Annotation("*", 1))
    amp = at.with_ann(Annotation("@", 1))
    b = Atom(CtxExpr.empty(), app("unit"), tp())
    pi = Permutation.identity()
    # weakening the antecedent strengthens the implication
    assert formula_strength({}, pi, Imp(amp, b), Imp(star, b))
    assert not formula_strength({}, pi, Imp(star, b), Imp(amp, b))


def test_permute_formula_roundtrip():
    n, n1 = Nominal(o, 0), Nominal(o, 1)
    pi = Permutation.swap(n, n1)
    f = Atom(CtxExpr(None, ((n, tm()),)), Atm(n), tm())
    assert permute_formula(pi, permute_formula(pi, f)) == f
    assert permute_formula(Permutation.identity(), f) is f


def test_closed_equiv_is_permutation_image():
    n, n1 = Nominal(o, 0), Nominal(o, 1)
    pi = Permutation.swap(n, n1)
    f2 = Atom(CtxExpr(None, ((n1, tm()),)), Atm(n1), tm())
    f1 = Atom(CtxExpr(None, ((n, tm()),)), Atm(n), tm())
    assert formula_equiv({}, pi, f2, f1)
    assert permute_formula(pi, f2) == f1


def test_ann_ordering():
    a1, s1 = Annotation("@", 1), Annotation("*", 1)
    s2 = Annotation("*", 2)
    assert ann_stronger_or_eq(s1, a1)
    assert ann_stronger_or_eq(s1, None)
    assert ann_stronger_or_eq(a1, None)
    assert not ann_stronger_or_eq(a1, s1)
    assert not ann_stronger_or_eq(s2, a1)
    assert not ann_stronger_or_eq(None, a1)
