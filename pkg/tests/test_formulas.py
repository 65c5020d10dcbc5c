import time

import pytest

from srkernel.formulas import (
    DerivedSymbol,
    HatAtom,
    apply_fo_formula,
    eval_formula,
    formula_params,
    is_pl0,
    unfold,
    unfold_kind,
    validate_psi,
)
from srkernel.substitution import C1, C2, C3, State, ap, eval_subst
from srkernel.syntax import show
from conftest import fixture, formula

P3 = r"Q(f(f(X[2])), Y[2]) \/ Q(f(X[1]), Y[1]) \/ Q(X[0], Y[0]) \/ ~P(X[0])"


def test_omegaiotao_normal_form():
    ws = fixture("omegaiotao")
    out = eval_formula(ws.get("p3"), {}, ws.psi)
    assert show(out) == P3
    assert is_pl0(out)


def test_omegaiotao_parameter_form():
    ws = fixture("omegaiotao")
    f = formula(ws, "^p(X; n)")
    assert show(eval_formula(f, {"n": 3}, ws.psi)) == P3
    assert show(eval_formula(f, {"n": 0}, ws.psi)) == "~P(X[0])"


def test_eval_is_fast():
    ws = fixture("omegaiotao")
    f = ws.get("p3")
    eval_formula(f, {}, ws.psi)
    t0 = time.perf_counter()
    for _ in range(10):
        eval_formula(f, {}, ws.psi)
    assert (time.perf_counter() - t0) / 10 < 0.01


def test_unfold_kinds():
    ws = fixture("omegaiotao")
    assert unfold_kind(formula(ws, "^p(X; 0)"), ws.psi) == "B"
    assert unfold_kind(formula(ws, "^p(X; s(n))"), ws.psi) == "S"
    assert unfold_kind(formula(ws, "^p(X; n)"), ws.psi) is None
    step = unfold(formula(ws, "^p(X; s(n))"), ws.psi)
    assert show(step) == r"Q(^f(X[n]; n), Y[n]) \/ ^p(X; n)"


def test_psi_valid():
    for name in ("omegaiotao", "ssub_form_schema2", "ex_proofschema"):
        assert validate_psi(fixture(name).psi) == []


def test_derived_predicate_unfolds_as_expected():
    ws = fixture("ssub_form_schema2")
    p = State((("n", C3),))
    cm = ap(ws.get("Theta"), ws.get("F"), params=["n"], theory=ws.psi.iota, psi=ws.psi)
    a = cm.at(p)
    assert isinstance(a, HatAtom) and isinstance(a.pred, DerivedSymbol)
    assert a.pred.root == "q"
    body = unfold(a, ws.psi)
    assert show(body).endswith(r" \/ Q(^t(^t(X[n]; n); s(n)))")
    assert body.left == HatAtom(a.pred, a.classes, (formula(ws, "^q(X; n)").nargs[0],))


@pytest.mark.parametrize("n", range(0, 7))
def test_derived_predicate_sound(n):
    ws = fixture("ssub_form_schema2")
    F, theta = ws.get("F"), ws.get("Theta")
    cm = ap(theta, F, params=["n"], theory=ws.psi.iota, psi=ws.psi)
    sigma = {"n": n}
    lhs = eval_formula(cm.at_sigma(sigma), sigma, ws.psi)
    rhs = apply_fo_formula(eval_subst(theta, sigma, ws.psi.iota), eval_formula(F, sigma, ws.psi))
    assert lhs == rhs


def test_formula_params_include_derived_bindings():
    ws = fixture("ex_proofschema")
    cm = ap(ws.get("Theta"), ws.goal, params=["n", "m"], theory=ws.psi.iota, psi=ws.psi)
    a = cm.at(State((("n", C3), ("m", C3))))
    assert set(formula_params(a)) == {"n", "m"}
