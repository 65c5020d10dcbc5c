"""Acceptance criteria 1 to 9, one check each.

Run under pytest for a summary line per criterion, or directly with
``python3 tests/test_acceptance.py``.
"""
import itertools
import os
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from srkernel.calculus import check_derivation, count_rule, nodes, Inference, regularize, to_cut_derivation, total_mgu
from srkernel.formulas import eval_formula
from srkernel.herbrand import extract, holds, instance_formulas, instantiate_hs, verify_unsat
from srkernel.schemata import instantiate
from srkernel.substitution import C1, C2, C3, FOSubstitution, State, ap, compose, eval_subst
from srkernel.syntax import show, show_sequent
from srkernel.terms import App, Const, eval_iota, var
from srkernel.unification import BOTTOM, unify_standard
from conftest import fixture, subst, term

RESULTS: dict = {}


def st(**cases):
    return State(tuple(cases.items()))


def check_1():
    ws = fixture("omegaiotao")
    f = ws.get("p3")
    want = r"Q(f(f(X[2])), Y[2]) \/ Q(f(X[1]), Y[1]) \/ Q(X[0], Y[0]) \/ ~P(X[0])"
    eval_formula(f, {}, ws.psi)
    t0 = time.perf_counter()
    out = show(eval_formula(f, {}, ws.psi))
    ms = (time.perf_counter() - t0) * 1000
    return out == want and ms < 10, f"{out} in {ms:.2f} ms"


def check_2():
    ws = fixture("s_substitution")
    out = show(eval_subst(ws.get("Theta"), {"n1": 2, "n2": 1}, ws.psi.iota))
    return out == "{u <- h(g(x2, h(h(x1)))), v <- h(h(g(x1, x2)))}", out


def check_3():
    ws = fixture("appl_viota2")
    iota = ws.psi.iota
    want = {
        (C1, C1): "g(Y[0])", (C1, C2): "g(Y[0])", (C1, C3): "g(Y[0])",
        (C2, C1): "X[1, 0]", (C2, C2): "X[1, 1]", (C2, C3): "X[1, m]",
        (C3, C1): "X[n, 0]", (C3, C2): "X[n, 1]", (C3, C3): "X[n, m]",
    }
    cm = ap(ws.get("Theta1"), ws.get("x_nm"), params=["n", "m"])
    nine = all(show(cm.at(st(n=a, m=b))) == w for (a, b), w in want.items())
    const = ap(ws.get("Theta1"), ws.get("x_snsm"), params=["n", "m"]).is_constant()
    comp = compose(ws.get("Theta1"), ws.get("Theta2"), params=["n", "m", "k"], theory=iota)
    p1 = comp.at(st(n=C1, m=C1, k=C1))
    p2 = comp.at(st(n=C2, m=C1, k=C3))
    p3 = comp.at(st(n=C3, m=C3, k=C3))
    lines = (
        p1 == subst(ws, "{X[0, 0] <- g(Z[0]), X[1, 0] <- Z[0], Y[0] <- Z[0], Y1[0, 0, 0] <- a}")
        and p2 == subst(ws, "{X[0, 0] <- g(f(Z[1])), X[2, 0] <- f(Z[1]), Y[1] <- f(Z[1]), Y1[0, 0, k] <- a}")
        and p3 == subst(ws, "{X[0, m] <- g(^f(Z[n]; n)), X[s(n), m] <- ^f(Z[n]; n), Y[n] <- ^f(Z[n]; n), Y1[0, 0, k] <- a}")
    )
    sigma = {"n": 0, "m": 0, "k": 0}
    oracle = eval_subst(ws.get("Theta1"), sigma, iota).then(eval_subst(ws.get("Theta2"), sigma, iota))
    p1_oracle = eval_subst(p1, sigma, iota) == oracle
    ok = nine and const and lines and p1_oracle
    return ok, f"nine={nine} constant={const} p1/p2/p3={lines} p1-oracle={p1_oracle}"


def check_4():
    ws = fixture("ual_example")
    r = unify_standard(ws.get("T"))
    ual_ok = r.single == subst(ws, "{u <- ^f(x, y; n, m), z <- ^g(v; n)}")
    ws = fixture("uniform")
    u = unify_standard(ws.get("T"), params=["n"])
    uni_ok = (
        u.at(st(n=C1)) == subst(ws, "{X1[0] <- X2[0]}")
        and u.at(st(n=C2)) == subst(ws, "{X1[1] <- X2[0], X1[0] <- X2[0]}")
        and u.at(st(n=C3)) == subst(ws, "{X1[n] <- X2[0], X1[0] <- X2[p(n)]}")
    )
    ws = fixture("standard_unification")
    occ = unify_standard(ws.get("Tocc"), params=["n1", "n2"]).at(st(n1=C1, n2=C1)) is BOTTOM
    return ual_ok and uni_ok and occ, f"ual={ual_ok} uniform={uni_ok} occurs-bottom-on-p1={occ}"


def check_5():
    ws = fixture("running_refutation")
    d = ws.derivations["rho"]
    r = regularize(d, ["β", "γ", "δ"], ws.psi)
    a = Const("a")
    f2a = App("f", (App("f", (a,)),))
    mgu = total_mgu(r, ws.psi)
    mgu_ok = mgu == FOSubstitution([(var("β"), a), (var("γ"), f2a)])
    c = to_cut_derivation(d, ws.psi)
    cuts = [show_sequent(n.conclusion) for _, n in nodes(c.root) if isinstance(n, Inference) and n.rule == "cut"]
    shape = cuts == ["|-", "P(a) |-", "P(f(f(a))) |-"] and count_rule(c.root, "res") == 0
    checks = check_derivation(c, ws.psi) == []
    return mgu_ok and shape and checks, f"total_mgu={show(mgu)} cuts={cuts}"


def check_6():
    ws = fixture("ex_proofschema")
    s = ws.schema()
    t0 = time.perf_counter()
    bad = []
    for n, m in itertools.product(range(9), range(5)):
        root = instantiate(s, {"n": n, "m": m})
        if check_derivation(root, ws.psi) or show_sequent(root.conclusion) != "|-" or count_rule(root, "res") != n + 1:
            bad.append((n, m))
    dt = time.perf_counter() - t0
    return not bad and dt < 5, f"45 points, failures={bad}, {dt:.2f} s"


def check_7():
    ws = fixture("ex_proofschema")
    h = extract(ws.schema())
    sigma = {"n": 1, "m": 0}
    hs = instantiate_hs(h, sigma, ws.psi)
    want = frozenset({
        subst(ws, "{X[1] <- Y[0], Z[0] <- f(a), X[0] <- Y[0]}"),
        subst(ws, "{X[0] <- Y[0], Z[0] <- a}"),
    })
    set_ok = hs == want
    grid_ok = all(
        verify_unsat(ws.goal, h, {"n": n, "m": m}, ws.psi).unsat for n, m in itertools.product(range(9), range(5))
    )
    flips = True
    for drop in hs:
        rest = hs - {drop}
        res = verify_unsat(ws.goal, h, sigma, ws.psi, subs=rest)
        model_ok = res.model is not None and all(holds(f, res.model) for f in instance_formulas(ws.goal, rest, sigma, ws.psi))
        flips = flips and not res.unsat and model_ok
    return set_ok and grid_ok and flips, f"set={set_ok} grid-unsat={grid_ok} single-deletion-sat={flips}"


def check_8():
    import test_properties as tp

    suites = [
        tp.test_ap_sound,
        tp.test_compose_sound,
        tp.test_psi_sound,
        tp.test_unify_standard_sound,
        tp.test_states_partition,
        tp.test_fo_unify_against_brute_force,
        tp.test_parameter_unifiable_against_enumeration,
    ]
    t0 = time.perf_counter()
    failed = []
    for fn in suites:
        try:
            fn()
        except Exception as e:  # report, do not abort the remaining suites
            failed.append(f"{fn.__name__}: {type(e).__name__}")
    dt = time.perf_counter() - t0
    return not failed and dt < 60, f"{len(suites)} suites x 200 cases, failures={failed}, {dt:.1f} s"


def check_9():
    ws = fixture("prl_iota")
    iota = ws.psi.iota

    def count(t):
        c = 0
        while isinstance(t, App) and t.fn == "suc":
            t, c = t.args[0], c + 1
        return c if t == Const("zero") else -1

    num, s, t = term(ws, "^num(x; n)"), term(ws, "^s(x; n)"), term(ws, "^t(x; n)")
    plus = term(ws, "^plus(^num(x; m); n)")
    bad = []
    for k in range(21):
        got = (count(eval_iota(num, {"n": k}, iota)), count(eval_iota(s, {"n": k}, iota)), count(eval_iota(t, {"n": k}, iota)))
        if got != (k, k + 1, max(k - 1, 0)):
            bad.append(("unary", k))
        for j in range(21):
            if count(eval_iota(plus, {"n": k, "m": j}, iota)) != k + j:
                bad.append(("plus", k, j))
    return not bad, f"arguments 0..20, mismatches={bad[:5]}"


CHECKS = {i: globals()[f"check_{i}"] for i in range(1, 10)}


def run_check(i):
    t0 = time.perf_counter()
    try:
        ok, detail = CHECKS[i]()
    except Exception as e:
        ok, detail = False, f"{type(e).__name__}: {e}"
    line = f"criterion {i}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - t0:.2f} s) {detail}"
    RESULTS[i] = line
    print(line)
    return ok, line


@pytest.mark.parametrize("i", range(1, 10))
def test_criterion(i):
    ok, line = run_check(i)
    assert ok, line


if __name__ == "__main__":
    results = [run_check(i)[0] for i in range(1, 10)]
    sys.exit(0 if all(results) else 1)
