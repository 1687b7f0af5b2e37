import pytest

from lflogic.formulas import (And, Annotation, Atom, BOT, CtxAll, CtxExpr,
                              CtxVar, Ex, All, Imp, Or, TOP)
from lflogic.prover import (ProofState, RuleError, apply_rule, initial_state,
                            rule_and_r, rule_atm_abs_r, rule_atm_app_r,
                            rule_ctx_str, rule_ctx_wk, rule_cut, rule_id,
                            rule_imp_r, rule_ind, rule_lf_inst, rule_lf_perm,
                            rule_lf_str, rule_lf_wk)
from lflogic.schemas import CtxVarType
from lflogic.sequents import CtxVarDecl, Hyp, mk_sequent, wf_sequent
from lflogic.subst import Permutation
from lflogic.syntax import Atm, Lam, Nominal, Var, arrow, o
from lflogic.tactics import (TacticError, tac_apply, tac_assert, tac_case,
                             tac_clear, tac_exists, tac_id, tac_ind,
                             tac_intros, tac_search, tac_split)
from tests.conftest import app, eq, idlam, of, tm, tp
from tests.test_formulas import c_schema, uniqueness_formula


def goal_state(stlc, goal, support=(), psi=(), xi=(), hyps=()):
    s = mk_sequent(support, psi, xi, hyps, goal)
    wf_sequent(stlc, s)
    return ProofState(stlc, (type(initial_state(stlc, TOP).goals[0])(1, s),),
                      next_gid=2)


def atom_empty():
    return Atom(CtxExpr.empty(), app("empty"), tm())


def test_id_closes(stlc):
    st = goal_state(stlc, atom_empty(), hyps=[Hyp("H1", atom_empty())])
    out = apply_rule(st, "id", "H1", Permutation.identity())
    assert out.done()


def test_id_annotation_strength(stlc):
    star = atom_empty().with_ann(Annotation("*", 1))
    st = goal_state(stlc, atom_empty(), hyps=[Hyp("H1", star)])
    assert apply_rule(st, "id", "H1", Permutation.identity()).done()
    amp = atom_empty().with_ann(Annotation("@", 1))
    st2 = goal_state(stlc, star, hyps=[Hyp("H1", amp)])
    with pytest.raises(RuleError):
        apply_rule(st2, "id", "H1", Permutation.identity())


def test_id_rejects_unsupported_permutation(stlc):
    n0, n1 = Nominal(o, 0), Nominal(o, 1)
    st = goal_state(stlc, atom_empty(), hyps=[Hyp("H1", atom_empty())])
    with pytest.raises(RuleError):
        apply_rule(st, "id", "H1", Permutation.swap(n0, n1))


def test_id_with_nominal_swap(stlc):
    n0, n1 = Nominal(o, 0), Nominal(o, 1)
    f1 = Atom(CtxExpr(None, ((n0, tm()),)), Atm(n0), tm())
    f2 = Atom(CtxExpr(None, ((n1, tm()),)), Atm(n1), tm())
    st = goal_state(stlc, f1, support=[n0, n1], hyps=[Hyp("H1", f2)])
    out = apply_rule(st, "id", "H1", Permutation.swap(n0, n1))
    assert out.done()


def test_cut(stlc):
    st = goal_state(stlc, atom_empty())
    out = apply_rule(st, "cut", TOP)
    assert len(out.goals) == 2
    assert out.goals[0].sequent.goal == TOP
    assert any(h.formula == TOP for h in out.goals[1].sequent.hyps)


def test_cut_rejects_ill_formed(stlc):
    g = CtxVar("Gamma")
    st = goal_state(stlc, atom_empty())
    bad = Atom(CtxExpr.of_var(g), app("empty"), tm())
    with pytest.raises(RuleError):
        apply_rule(st, "cut", bad)


def test_propositional_rules(stlc):
    a = atom_empty()
    st = goal_state(stlc, And(TOP, TOP))
    out = apply_rule(st, "and-R")
    assert len(out.goals) == 2
    st = goal_state(stlc, Imp(a, TOP))
    out = apply_rule(st, "imp-R")
    assert out.goals[0].sequent.hyps[0].formula == a
    st = goal_state(stlc, Or(TOP, BOT))
    assert apply_rule(apply_rule(st, "or-R1"), "top-R").done()
    st = goal_state(stlc, a, hyps=[Hyp("H1", BOT)])
    assert apply_rule(st, "bot-L", "H1").done()
    st = goal_state(stlc, a, hyps=[Hyp("H1", Or(a, a))])
    out = apply_rule(st, "or-L", "H1")
    assert len(out.goals) == 2


def test_propositional_shape_rejections(stlc):
    st = goal_state(stlc, TOP)
    for rule, args in [("and-R", ()), ("imp-R", ()), ("or-R1", ()),
                       ("ex-R", (app("empty"),)), ("all-R", ()), ("ctx-R", ())]:
        with pytest.raises(RuleError):
            apply_rule(st, rule, *args)
    st2 = goal_state(stlc, BOT, hyps=[Hyp("H1", TOP)])
    for rule in ["bot-L", "or-L", "imp-L", "ex-L"]:
        with pytest.raises(RuleError):
            apply_rule(st2, rule, "H1")
    with pytest.raises(RuleError):
        apply_rule(st2, "top-R")


def test_all_r_raises_over_support(stlc):
    x = Var("x")
    n = Nominal(o, 3)
    goal = All(x, o, Atom(CtxExpr(None, ((n, tm()),)), Atm(x), tm()))
    st = goal_state(stlc, goal, support=[n])
    out = apply_rule(st, "all-R")
    s = out.goals[0].sequent
    (y, ar) = s.psi[0]
    assert ar == arrow(o, o)
    assert s.goal.term == Atm(y, (Atm(n),))


def test_all_l_checks_witness(stlc):
    x = Var("x")
    f = All(x, o, Atom(CtxExpr.empty(), Atm(x), tm()))
    st = goal_state(stlc, TOP, hyps=[Hyp("H1", f)])
    out = apply_rule(st, "all-L", "H1", app("empty"))
    assert out.goals[0].sequent.hyps[-1].formula == atom_empty()
    bad = Lam(Var("y"), app("empty"))
    with pytest.raises(RuleError):
        apply_rule(st, "all-L", "H1", bad)


def test_ex_r_checks_witness(stlc):
    d = Var("d")
    goal = Ex(d, o, Atom(CtxExpr.empty(), Atm(d), tm()))
    st = goal_state(stlc, goal)
    out = apply_rule(st, "ex-R", app("empty"))
    assert out.goals[0].sequent.goal == atom_empty()
    with pytest.raises(RuleError):
        apply_rule(st, "ex-R", idlam())


def test_ctx_r_introduces_fresh_variable(stlc):
    f = uniqueness_formula()
    st = initial_state(stlc, f)
    out = apply_rule(st, "ctx-R")
    s = out.goals[0].sequent
    assert len(s.xi) == 1
    assert s.xi[0].cvt.blocks == ()


def test_ctx_l_checks_instance(stlc):
    schema = c_schema()
    g = CtxVar("G")
    body = Atom(CtxExpr.of_var(g), app("empty"), tm())
    f = CtxAll(g, schema, body)
    # a sequent owning a context variable of the same schema
    h = CtxVar("Gamma")
    xi = [CtxVarDecl(h, frozenset(), CtxVarType(schema))]
    st = goal_state(stlc, TOP, xi=xi, hyps=[Hyp("H1", f)])
    out = apply_rule(st, "ctx-L", "H1", CtxExpr.of_var(h))
    assert out.goals[0].sequent.hyps[-1].formula == \
        Atom(CtxExpr.of_var(h), app("empty"), tm())
    n = Nominal(o, 0)
    with pytest.raises(RuleError):
        apply_rule(st, "ctx-L", "H1", CtxExpr(None, ((n, tp()),)))


def test_atm_app_r(stlc):
    goal = Atom(CtxExpr.empty(), app("refl", app("unit")),
                eq(app("unit"), app("unit")))
    st = goal_state(stlc, goal)
    out = apply_rule(st, "atm-app-R")
    assert len(out.goals) == 1
    assert out.goals[0].sequent.goal == Atom(CtxExpr.empty(), app("unit"), tp())


def test_atm_app_r_rejects_type_mismatch(stlc):
    goal = Atom(CtxExpr.empty(), app("refl", app("unit")),
                eq(app("unit"), app("arr", app("unit"), app("unit"))))
    st = goal_state(stlc, goal)
    with pytest.raises(RuleError):
        apply_rule(st, "atm-app-R")


def test_atm_app_r_requires_certified_context(stlc):
    g = CtxVar("Gamma")
    xi = [CtxVarDecl(g, frozenset(), CtxVarType(c_schema()))]
    goal = Atom(CtxExpr.of_var(g), app("unit"), tp())
    st = goal_state(stlc, goal, xi=xi)
    with pytest.raises(RuleError):
        apply_rule(st, "atm-app-R")
    hyp = Atom(CtxExpr.of_var(g), app("empty"), tm())
    st2 = goal_state(stlc, goal, xi=xi, hyps=[Hyp("H1", hyp)])
    assert apply_rule(st2, "atm-app-R").done()


def test_atm_app_r_annotated(stlc):
    goal = Atom(CtxExpr.empty(), app("refl", app("unit")),
                eq(app("unit"), app("unit")), Annotation("@", 1))
    st = goal_state(stlc, goal)
    out = apply_rule(st, "atm-app-R")
    assert out.goals[0].sequent.goal.ann == Annotation("*", 1)
    st2 = goal_state(stlc, goal.with_ann(Annotation("*", 1)))
    with pytest.raises(RuleError):
        apply_rule(st2, "atm-app-R")


def test_atm_abs_r(stlc):
    x = Var("x")
    goal = Atom(CtxExpr.empty(), idlam(), PiTy_tm_tm())
    st = goal_state(stlc, goal)
    out = apply_rule(st, "atm-abs-R")
    s = out.goals[0].sequent
    assert len(s.support) == 1
    n = s.support[0]
    assert s.goal == Atom(CtxExpr(None, ((n, tm()),)), Atm(n), tm())


def PiTy_tm_tm():
    from lflogic.syntax import ty_arrows
    return ty_arrows(tm(), tm())


def test_atm_abs_l_updates_banned(stlc):
    g = CtxVar("Gamma")
    xi = [CtxVarDecl(g, frozenset(), CtxVarType(c_schema()))]
    f = Atom(CtxExpr.of_var(g), idlam(), PiTy_tm_tm())
    st = goal_state(stlc, TOP, xi=xi, hyps=[Hyp("H1", f)])
    out = apply_rule(st, "atm-abs-L", "H1")
    s = out.goals[0].sequent
    assert len(s.xi[0].banned) == 1


def test_atm_abs_rejects_atomic(stlc):
    st = goal_state(stlc, atom_empty())
    with pytest.raises(RuleError):
        apply_rule(st, "atm-abs-R")
    st2 = goal_state(stlc, TOP, hyps=[Hyp("H1", atom_empty())])
    with pytest.raises(RuleError):
        apply_rule(st2, "atm-abs-L", "H1")


def test_atm_app_l_rejects_non_atomic(stlc):
    f = Atom(CtxExpr.empty(), idlam(), PiTy_tm_tm())
    st = goal_state(stlc, TOP, hyps=[Hyp("H1", f)])
    with pytest.raises(RuleError):
        apply_rule(st, "atm-app-L", "H1")


def test_ind_shape(stlc):
    st = initial_state(stlc, uniqueness_formula())
    out = apply_rule(st, "ind", 4, 1)
    s = out.goals[0].sequent
    assert len(s.hyps) == 1
    assert s.ann_indices() == frozenset([1])


def test_ind_rejects_reuse(stlc):
    st = initial_state(stlc, uniqueness_formula())
    out = apply_rule(st, "ind", 4, 1)
    with pytest.raises(RuleError):
        apply_rule(out, "ind", 5, 1)


def test_ind_rejects_bad_position(stlc):
    st = initial_state(stlc, uniqueness_formula())
    with pytest.raises(RuleError):
        apply_rule(st, "ind", 9, 1)
    st2 = goal_state(stlc, Imp(TOP, TOP))
    with pytest.raises(RuleError):
        apply_rule(st2, "ind", 1, 1)


def test_wk_cont(stlc):
    st = goal_state(stlc, TOP, hyps=[Hyp("H1", atom_empty())])
    out = apply_rule(st, "wk", "H1")
    assert out.goals[0].sequent.hyps == ()
    out2 = apply_rule(st, "cont", "H1")
    assert out2.goals[0].sequent.hyps == st.focused().sequent.hyps
    with pytest.raises(RuleError):
        apply_rule(st, "wk", "H9")


def test_ctx_str_and_wk(stlc):
    n5 = Nominal(o, 5)
    x = Var("x")
    st = goal_state(stlc, TOP)
    out = apply_rule(st, "ctx-str", [n5], [(x, o)], [])
    s = out.goals[0].sequent
    assert n5 in s.support and (x, o) in s.psi
    # weakening removes them again when unused
    st2 = ProofState(stlc, out.goals, next_gid=out.next_gid)
    out2 = apply_rule(st2, "ctx-wk", [n5], [x], [])
    assert out2.goals[0].sequent.support == ()
    # removal fails when the name occurs in a formula
    n0 = Nominal(o, 0)
    f = Atom(CtxExpr(None, ((n0, tm()),)), Atm(n0), tm())
    st3 = goal_state(stlc, f, support=[n0])
    with pytest.raises(RuleError):
        apply_rule(st3, "ctx-wk", [n0], [], [])


def test_ctx_str_rejects_stale_name(stlc):
    n0 = Nominal(o, 0)
    f = Atom(CtxExpr(None, ((n0, tm()),)), Atm(n0), tm())
    st = goal_state(stlc, f, support=[n0])
    with pytest.raises(RuleError):
        apply_rule(st, "ctx-str", [n0], [], [])


def lf_str_goal(stlc, good=True):
    n0 = Nominal(o, 0)
    inner = atom_empty()
    bigger = Atom(CtxExpr(None, ((n0, tp()),)),
                  Atm(n0) if not good else app("empty"),
                  tp() if not good else tm())
    return goal_state(stlc, Imp(bigger, inner), support=[n0])


def test_lf_str(stlc):
    assert apply_rule(lf_str_goal(stlc, True), "lf-str").done()
    with pytest.raises(RuleError):
        apply_rule(lf_str_goal(stlc, False), "lf-str")


def test_lf_wk_zero_obligations(stlc):
    n0 = Nominal(o, 0)
    small = atom_empty()
    big = Atom(CtxExpr(None, ((n0, tp()),)), app("empty"), tm())
    st = goal_state(stlc, Imp(small, big), support=[n0])
    assert apply_rule(st, "lf-wk").done()


def test_lf_wk_obligations(stlc):
    n0, n1 = Nominal(o, 0), Nominal(o, 1)
    small = Atom(CtxExpr(None, ((n0, tm()),)), Atm(n0), tm())
    big = Atom(CtxExpr(None, ((n0, tm()), (n1, of(Atm(n0), app("unit"))))),
               Atm(n0), tm())
    st = goal_state(stlc, Imp(small, big), support=[n0, n1])
    out = apply_rule(st, "lf-wk")
    assert len(out.goals) == 2
    assert out.goals[0].sequent.goal == Atom(CtxExpr(None, ((n0, tm()),)),
                                             Atm(n0), tm())
    assert out.goals[1].sequent.goal == Atom(CtxExpr(None, ((n0, tm()),)),
                                             app("unit"), tp())


def test_lf_wk_rejects_stale_name(stlc):
    n0 = Nominal(o, 0)
    small = Atom(CtxExpr.empty(), Atm(n0), tm())
    big = Atom(CtxExpr(None, ((n0, tp()),)), Atm(n0), tm())
    st = goal_state(stlc, Imp(small, big), support=[n0])
    with pytest.raises(RuleError):
        apply_rule(st, "lf-wk")


def test_lf_wk_requires_prohibition(stlc):
    g = CtxVar("Gamma")
    n0 = Nominal(o, 0)
    xi = [CtxVarDecl(g, frozenset(), CtxVarType(c_schema()))]
    small = Atom(CtxExpr.of_var(g), app("empty"), tm())
    big = Atom(CtxExpr(g, ((n0, tp()),)), app("empty"), tm())
    st = goal_state(stlc, Imp(small, big), support=[n0], xi=xi)
    with pytest.raises(RuleError):
        apply_rule(st, "lf-wk")


def test_lf_perm(stlc):
    n0, n1 = Nominal(o, 0), Nominal(o, 1)
    g1 = CtxExpr(None, ((n0, tm()), (n1, tp())))
    g2 = CtxExpr(None, ((n1, tp()), (n0, tm())))
    a1 = Atom(g1, app("empty"), tm())
    a2 = Atom(g2, app("empty"), tm())
    st = goal_state(stlc, Imp(a1, a2), support=[n0, n1])
    assert apply_rule(st, "lf-perm").done()


def test_lf_perm_rejects_dependency(stlc):
    n0, n1 = Nominal(o, 0), Nominal(o, 1)
    g1 = CtxExpr(None, ((n0, tm()), (n1, of(Atm(n0), app("unit")))))
    g2 = CtxExpr(None, ((n1, of(Atm(n0), app("unit"))), (n0, tm())))
    a1 = Atom(g1, app("empty"), tm())
    a2 = Atom(g2, app("empty"), tm())
    st = goal_state(stlc, Imp(a1, a2), support=[n0, n1])
    with pytest.raises(RuleError):
        apply_rule(st, "lf-perm")


def test_lf_inst(stlc):
    n0, n1 = Nominal(o, 0), Nominal(o, 1)
    big = Atom(CtxExpr(None, ((n0, tm()), (n1, of(Atm(n0), app("unit"))))),
               Atm(n1), of(Atm(n0), app("unit")))
    mid = Atom(CtxExpr.empty(), app("empty"), tm())
    outf = Atom(CtxExpr(None, ((n1, of(app("empty"), app("unit"))),)),
                Atm(n1), of(app("empty"), app("unit")))
    st = goal_state(stlc, Imp(big, Imp(mid, outf)), support=[n0, n1])
    assert apply_rule(st, "lf-inst").done()


def test_lf_inst_rejects_wrong_consequent(stlc):
    n0, n1 = Nominal(o, 0), Nominal(o, 1)
    big = Atom(CtxExpr(None, ((n0, tm()), (n1, of(Atm(n0), app("unit"))))),
               Atm(n1), of(Atm(n0), app("unit")))
    mid = Atom(CtxExpr.empty(), app("empty"), tm())
    outf = Atom(CtxExpr(None, ((n1, of(app("empty"), app("unit"))),)),
                Atm(n1), of(app("unit"), app("unit")))
    st = goal_state(stlc, Imp(big, Imp(mid, outf)), support=[n0, n1])
    with pytest.raises(RuleError):
        apply_rule(st, "lf-inst")


def test_tactic_failure_leaves_state(stlc):
    st = goal_state(stlc, TOP, hyps=[Hyp("H1", atom_empty())])
    before = st.goals
    with pytest.raises(TacticError):
        tac_case(st, "H9")
    assert st.goals == before


def test_replay_determinism(stlc):
    from tests.test_formulas import uniqueness_formula
    from lflogic.printer import print_sequent

    def run():
        st = initial_state(stlc, uniqueness_formula())
        st = tac_ind(st, 4)
        st = tac_intros(st)
        st = tac_case(st, "H4")
        return st

    a, b = run(), run()
    assert len(a.goals) == len(b.goals)
    for ga, gb in zip(a.goals, b.goals):
        assert print_sequent(ga.sequent) == print_sequent(gb.sequent)
    assert a.log == b.log


def test_case_with_two_alternative_schema(stlc):
    # an assumption over a two-alternative schema picks up block heads
    # from both alternatives during analysis
    from lflogic.schemas import BlockSchema, ContextSchema
    from lflogic.cases import all_cases
    t, x, y, z, d = Var("T"), Var("x"), Var("y"), Var("z"), Var("d")
    two = ContextSchema((
        BlockSchema((), ((z, tp()),)),
        BlockSchema(((t, o),), ((x, tm()), (y, of(Atm(x), Atm(t))))),
    ), name="d2")
    g = CtxVar("Gamma")
    e, t1 = Var("e"), Var("t1")
    focus = Atom(CtxExpr.of_var(g), Atm(d), of(Atm(e), Atm(t1)))
    s = mk_sequent([], [(d, o), (e, o), (t1, o)],
                   [CtxVarDecl(g, frozenset(), CtxVarType(two))],
                   [Hyp("H1", focus)], TOP)
    wf_sequent(stlc, s)
    branches = all_cases(stlc, s, "H1")
    # of_empty, of_app, of_lam, plus the tm/of block's second binding;
    # the lone-tp alternative contributes no case (its binding has type
    # tp, never `of`)
    assert len(branches) == 4
    heads = {b.head for b in branches}
    assert any(isinstance(h, Nominal) for h in heads)


def test_case_on_absurd_equality_closes(stlc):
    # no head can inhabit eq at distinct rigid types: zero branches
    from lflogic.tactics import tac_case
    d = Var("d")
    f = Atom(CtxExpr.empty(), Atm(d),
             eq(app("unit"), app("arr", app("unit"), app("unit"))))
    st = goal_state(stlc, BOT_goal(), psi=[(d, o)], hyps=[Hyp("H1", f)])
    out = tac_case(st, "H1")
    assert out.done()


def BOT_goal():
    from lflogic.formulas import BOT
    return BOT
