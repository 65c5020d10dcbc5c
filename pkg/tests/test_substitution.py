import pytest

from srkernel.substitution import (
    C1,
    C2,
    C3,
    DomainCollision,
    State,
    ap,
    apply_syntactic,
    compose,
    eval_subst,
    parameter_unifiable,
    psi_subst,
    psi_term,
    state_of,
    states_over,
)
from srkernel.syntax import show, show_state
from conftest import fixture, subst, term


def st(**cases):
    return State(tuple(cases.items()))


def test_eval_subst_example():
    ws = fixture("s_substitution")
    out = eval_subst(ws.get("Theta"), {"n1": 2, "n2": 1}, ws.psi.iota)
    assert show(out) == "{u <- h(g(x2, h(h(x1)))), v <- h(h(g(x1, x2)))}"


def test_eval_subst_extended():
    ws = fixture("psi_examples")
    out = eval_subst(ws.get("Ext"), {"n": 0, "m": 1})
    assert show(out) == "{W[0, 0] <- g(W[0, 0]), W[1, 1] <- h(W[1, 1]), V[1] <- a}"


def test_eval_subst_domain_collision():
    ws = fixture("psi_examples")
    # W[n, n] and W[m, m] evaluate to the same variable when n = m
    theta = subst(ws, "{W[n, n] <- a, W[m, m] <- b}")
    with pytest.raises(DomainCollision):
        eval_subst(theta, {"n": 2, "m": 2})


def test_apply_syntactic_example():
    ws = fixture("s_substitution")
    out = apply_syntactic(ws.get("Theta2"), ws.get("t"))
    assert show(out) == "h(^t(^t(^s(u; k), g(u, v); n, m), ^s(^s(u; k); n); n, m))"


def test_psi_term_example():
    ws = fixture("psi_examples")
    p = st(n1=C3, n2=C1)
    assert show(psi_term(p, ws.get("t"))) == "h(X[n1, 0], Y[0, 1])"


def test_psi_subst_example():
    ws = fixture("psi_examples")
    p = st(n1=C2, n2=C3)
    assert show(psi_subst(p, ws.get("Theta"))) == "{X1[0] <- Z[1], X1[2] <- g(Z[1]), Y1[1, n2] <- h(Y2[1, n2])}"


def test_states_partition_small():
    sts = states_over(["n", "m"])
    assert len(sts) == 9
    for n in range(5):
        for m in range(5):
            assert sum(s.contains({"n": n, "m": m}) for s in sts) == 1


def test_one_parameter_states():
    assert [show_state(s) for s in states_over(["n"])] == ["n=0", "n!=0 & p(n)=0", "n!=0 & p(n)!=0"]


APPL_VIOTA_2 = {
    (C1, C1): "g(Y[0])",
    (C1, C2): "g(Y[0])",
    (C1, C3): "g(Y[0])",
    (C3, C1): "X[n, 0]",
    (C2, C1): "X[1, 0]",
    (C2, C2): "X[1, 1]",
    (C2, C3): "X[1, m]",
    (C3, C2): "X[n, 1]",
    (C3, C3): "X[n, m]",
}


def test_ap_nine_states():
    ws = fixture("appl_viota2")
    cm = ap(ws.get("Theta1"), ws.get("x_nm"), params=["n", "m"])
    assert len(cm) == 9
    for (cn, cmm), want in APPL_VIOTA_2.items():
        assert show(cm.at(st(n=cn, m=cmm))) == want


def test_ap_constant_on_successors():
    ws = fixture("appl_viota2")
    cm = ap(ws.get("Theta1"), ws.get("x_snsm"), params=["n", "m"])
    assert cm.is_constant()
    assert show(cm.values()[0]) == "X[s(n), s(m)]"


def test_ap_on_compound_term():
    ws = fixture("appl_viota2")
    cm = ap(ws.get("Theta1"), ws.get("t"), params=["n", "m"])
    assert show(cm.at(st(n=C1, m=C1))) == "r(g(Y[0]), Y[0], Y[0])"
    assert show(cm.at(st(n=C3, m=C3))) == "r(X[n, m], X[s(n), 0], Y[n])"


def test_compose_three_states():
    ws = fixture("appl_viota2")
    iota = ws.psi.iota
    cm = compose(ws.get("Theta1"), ws.get("Theta2"), params=["n", "m", "k"], theory=iota)
    assert len(cm) == 27
    p1 = cm.at(st(n=C1, m=C1, k=C1))
    p2 = cm.at(st(n=C2, m=C1, k=C3))
    p3 = cm.at(st(n=C3, m=C3, k=C3))
    assert p1 == subst(ws, "{X[0, 0] <- g(Z[0]), X[1, 0] <- Z[0], Y[0] <- Z[0], Y1[0, 0, 0] <- a}")
    assert p2 == subst(ws, "{X[0, 0] <- g(f(Z[1])), X[2, 0] <- f(Z[1]), Y[1] <- f(Z[1]), Y1[0, 0, k] <- a}")
    assert p3 == subst(
        ws, "{X[0, m] <- g(^f(Z[n]; n)), X[s(n), m] <- ^f(Z[n]; n), Y[n] <- ^f(Z[n]; n), Y1[0, 0, k] <- a}"
    )


def test_compose_p1_against_evaluation():
    # the σ-evaluated composition at n=m=k=0 is the oracle for p1
    ws = fixture("appl_viota2")
    iota = ws.psi.iota
    sigma = {"n": 0, "m": 0, "k": 0}
    a = eval_subst(ws.get("Theta1"), sigma, iota)
    b = eval_subst(ws.get("Theta2"), sigma, iota)
    cm = compose(ws.get("Theta1"), ws.get("Theta2"), params=["n", "m", "k"], theory=iota)
    assert eval_subst(cm.at_sigma(sigma), sigma, iota) == a.then(b)


@pytest.mark.parametrize(
    "a, b, want",
    [
        ("Y[n1, n2]", "Y[0, 0]", True),
        ("X[n1, 0]", "X[s(n1), 0]", False),
        ("X[n1, n2]", "X[p(n1), n2]", True),  # both X[0, n2] at n1=0
        ("X[s(n1), n2]", "X[p(n1), n2]", False),
        ("X[0, n2]", "X[p(n1), n2]", True),
        ("X[n1, 0]", "Y[n1, 0]", False),
    ],
)
def test_parameter_unifiable(a, b, want):
    ws = fixture("standard_unification")
    assert parameter_unifiable(term(ws, a), term(ws, b)) is want


def test_state_of_matches_contains():
    sts = states_over(["n"])
    for v in range(6):
        s = state_of({"n": v}, ["n"])
        assert s in sts and s.contains({"n": v})
