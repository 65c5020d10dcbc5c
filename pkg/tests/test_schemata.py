import itertools

import pytest

from srkernel.calculus import VarLeaf, check_derivation, count_rule, leaves
from srkernel.schemata import (
    NotComposable,
    SCompose,
    check_instances,
    compose_proofs,
    instantiate,
    is_refutation_schema,
    is_v_regular,
)
from srkernel.syntax import show_sequent
from srkernel.terms import DepthExceeded
from srkernel.workspace import fixture_path, loads
from conftest import fixture


def _variant(schema_line):
    text = fixture_path("ex_proofschema").read_text()
    head, _ = text.split("schema rho0 =")
    return loads(head + schema_line + "\n")


def test_rho0_is_refutation_schema():
    ws = fixture("ex_proofschema")
    assert is_refutation_schema(ws.schema(), ws.goal, ws.psi) == []


@pytest.mark.parametrize("n,m", list(itertools.product(range(9), range(5))))
def test_instances_refute(n, m):
    ws = fixture("ex_proofschema")
    r = instantiate(ws.schema(), {"n": n, "m": m})
    assert check_derivation(r, ws.psi) == []
    assert show_sequent(r.conclusion) == "|-"
    assert count_rule(r, "res") == n + 1
    assert not any(isinstance(lf, VarLeaf) for lf in leaves(r))


def test_check_instances_uses_only_goal_axioms():
    ws = fixture("ex_proofschema")
    grid = [{"n": n, "m": m} for n in range(4) for m in range(3)]
    assert check_instances(ws.schema(), ws.goal, ws.psi, grid) == []


def test_instances_are_v_regular():
    ws = fixture("ex_proofschema")
    assert is_v_regular(instantiate(ws.schema(), {"n": 3, "m": 2}))


def test_closure_depth_bound():
    ws = fixture("ex_proofschema")
    with pytest.raises(DepthExceeded):
        instantiate(ws.schema(), {"n": 5, "m": 0}, bound=3)


def test_missing_base_case_left_open():
    ws = _variant("schema bad = compose(rho_main, closure(rho_step; n; V));")
    kinds = {v.kind for v in is_refutation_schema(ws.schema("bad"), ws.goal, ws.psi)}
    assert kinds & {"NotRefutation", "UndischargedLeaf"}


def test_skipping_the_closure_is_not_composable():
    ws = _variant("schema bad = compose(rho_main, rho_base);")
    kinds = {v.kind for v in is_refutation_schema(ws.schema("bad"), ws.goal, ws.psi)}
    assert "NotComposable" in kinds


def test_wrong_goal_rejected():
    ws = fixture("ex_proofschema")
    from conftest import formula

    other = formula(ws, "^p(X; n)")
    assert is_refutation_schema(ws.schema(), other, ws.psi)


def test_compose_proofs_requires_vi():
    ws = fixture("ex_proofschema")
    base = instantiate(ws.schema("rho_base"), {"n": 0, "m": 0})
    with pytest.raises(NotComposable):
        compose_proofs(base, base)


def test_schema_expression_shape():
    ws = fixture("ex_proofschema")
    s = ws.schema()
    assert isinstance(s, SCompose) and isinstance(s.first, SCompose)
