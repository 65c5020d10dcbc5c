from srkernel.calculus import (
    Axiom,
    Inference,
    check_derivation,
    count_rule,
    is_regular,
    leaves,
    nodes,
    regularize,
    to_cut_derivation,
    total_mgu,
)
from srkernel.syntax import show, show_sequent
from srkernel.workspace import loads
from srkernel.formulas import apply_fo_formula
from srkernel.substitution import FOSubstitution
from srkernel.terms import App, Const, var
from conftest import fixture

a = Const("a")
f2a = App("f", (App("f", (a,)),))

HEADER = """var x, y;
"""


def _one(text):
    ws = loads(HEADER + text)
    (d,) = ws.derivations.values()
    return ws, d


def test_running_refutation_checks():
    ws = fixture("running_refutation")
    assert check_derivation(ws.derivations["rho"], ws.psi) == []


def test_regularize_and_total_mgu():
    ws = fixture("running_refutation")
    d = ws.derivations["rho"]
    assert not is_regular(d)
    r = regularize(d, ["β", "γ", "δ"], ws.psi)
    assert is_regular(r)
    assert check_derivation(r, ws.psi) == []
    assert total_mgu(r, ws.psi) == FOSubstitution([(var("β"), a), (var("γ"), f2a)])


def test_cut_derivation_shape():
    ws = fixture("running_refutation")
    c = to_cut_derivation(ws.derivations["rho"], ws.psi)
    cuts = [n for _, n in nodes(c.root) if isinstance(n, Inference) and n.rule == "cut"]
    assert [show_sequent(n.conclusion) for n in cuts] == ["|-", "P(a) |-", "P(f(f(a))) |-"]
    assert count_rule(c.root, "res") == 0
    F = ws.get("F")
    fa = apply_fo_formula(FOSubstitution([(var("α"), a)]), F)
    ff = apply_fo_formula(FOSubstitution([(var("α"), f2a)]), F)
    # the cut pushes {α <- f²a} into both premises, so the leftmost leaf is instantiated too
    assert [lf.sequent.succ[0] for lf in leaves(c.root)] == [ff, ff, fa, F]


def test_cut_derivation_of_regularized_checks():
    ws = fixture("running_refutation")
    r = regularize(ws.derivations["rho"], ["β", "γ", "δ"], ws.psi)
    c = to_cut_derivation(r, ws.psi)
    assert check_derivation(c, ws.psi) == []


def test_connective_rules_accept():
    ws, d = _one(
        r"""derivation d:
  orr ; |- P(x), Q(y)
    axiom ; |- P(x) \/ Q(y)
end
"""
    )
    assert check_derivation(d, ws.psi) == []


def test_wrong_rule_rejected():
    ws, d = _one(
        r"""derivation d:
  andr1 ; |- Q(y)
    axiom ; |- P(x) /\ Q(y)
end
"""
    )
    vs = check_derivation(d, ws.psi)
    assert vs and vs[0].path == ()


def test_res_requires_unifier():
    ws, d = _one(
        r"""derivation d:
  res {x <- b} ; |-
    negr ; P(a) |-
      axiom ; |- ~P(a)
    axiom ; |- P(x)
end
"""
    )
    assert check_derivation(d, ws.psi)


def test_res_with_mgu_accepted():
    ws, d = _one(
        r"""derivation d:
  res {x <- a} ; |-
    negr ; P(a) |-
      axiom ; |- ~P(a)
    axiom ; |- P(x)
end
"""
    )
    assert check_derivation(d, ws.psi) == []


def test_res_non_mgu_rejected():
    ws, d = _one(
        r"""derivation d:
  res {x <- f(a), y <- f(a)} ; |-
    negr ; P(x) |-
      axiom ; |- ~P(x)
    axiom ; |- P(y)
end
"""
    )
    assert any(v.kind == "NotMGU" for v in check_derivation(d, ws.psi))


def test_axioms_restricted():
    ws, d = _one(
        r"""derivation d:
  negr ; P(a) |-
    axiom ; |- ~P(a)
end
"""
    )
    from srkernel.syntax import parse_sequent

    assert check_derivation(d, ws.psi, axioms=[parse_sequent("|- ~P(a)")]) == []
    assert check_derivation(d, ws.psi, axioms=[parse_sequent("|- P(a)")])
