import pytest

from lflogic.syntax import (Atm, AtomTy, Const, Lam, PiTy, Signature,
                            TermDecl, TypeDecl, KTYPE, PiKind, Var, ty_arrows)


def tm():
    return AtomTy("tm")


def tp():
    return AtomTy("tp")


def of(e, t):
    return AtomTy("of", (e, t))


def eq(t1, t2):
    return AtomTy("eq", (t1, t2))


def app(h, *args):
    return Atm(Const(h), tuple(args))


def idlam():
    x = Var("x")
    return Lam(x, Atm(x))


def stlc_signature() -> Signature:
    """Simply typed lambda calculus: terms, types, typing, type equality."""
    E1, E2, T1, T2, R, D, T, x, y = (Var(s) for s in
                                     ["E1", "E2", "T1", "T2", "R", "D", "T", "x", "y"])
    of_app_ty = PiTy(E1, tm(), PiTy(E2, tm(), PiTy(T1, tp(), PiTy(T2, tp(),
                 ty_arrows(of(Atm(E1), app("arr", Atm(T1), Atm(T2))),
                           of(Atm(E2), Atm(T1)),
                           of(app("app", Atm(E1), Atm(E2)), Atm(T2)))))))
    of_lam_ty = PiTy(R, ty_arrows(tm(), tm()), PiTy(T1, tp(), PiTy(T2, tp(),
                 ty_arrows(PiTy(x, tm(),
                                ty_arrows(of(Atm(x), Atm(T1)),
                                          of(Atm(R, (Atm(x),)), Atm(T2)))),
                           of(app("lam", Atm(T1), Lam(x, Atm(R, (Atm(x),)))),
                              app("arr", Atm(T1), Atm(T2)))))))
    refl_ty = PiTy(T, tp(), eq(Atm(T), Atm(T)))
    return Signature([
        TypeDecl("tp", KTYPE),
        TermDecl("unit", tp()),
        TermDecl("arr", ty_arrows(tp(), tp(), tp())),
        TypeDecl("tm", KTYPE),
        TermDecl("empty", tm()),
        TermDecl("app", ty_arrows(tm(), tm(), tm())),
        TermDecl("lam", ty_arrows(tp(), ty_arrows(tm(), tm()), tm())),
        TypeDecl("of", PiKind(Var("E"), tm(), PiKind(Var("T"), tp(), KTYPE))),
        TypeDecl("eq", PiKind(Var("T1"), tp(), PiKind(Var("T2"), tp(), KTYPE))),
        TermDecl("of_empty", of(app("empty"), app("unit"))),
        TermDecl("of_app", of_app_ty),
        TermDecl("of_lam", of_lam_ty),
        TermDecl("refl", refl_ty),
    ])


@pytest.fixture(scope="session")
def stlc():
    return stlc_signature()


@pytest.fixture(scope="session")
def stlc_kernel(stlc):
    from lflogic.kernel import Kernel
    return Kernel(stlc)
