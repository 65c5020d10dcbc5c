import itertools

import pytest

from srkernel.herbrand import (
    ground_unsat,
    extract,
    holds,
    instance_formulas,
    instantiate_hs,
    substitutions,
    verify_unsat,
)
from srkernel.syntax import show
from conftest import fixture, formula, subst

GRID = list(itertools.product(range(9), range(5)))


def _setup():
    ws = fixture("ex_proofschema")
    return ws, extract(ws.schema())


def test_herbrand_set_at_1_0():
    ws, h = _setup()
    got = instantiate_hs(h, {"n": 1, "m": 0}, ws.psi)
    want = {
        subst(ws, "{X[1] <- Y[0], Z[0] <- f(a), X[0] <- Y[0]}"),
        subst(ws, "{X[0] <- Y[0], Z[0] <- a}"),
    }
    assert got == frozenset(want)


@pytest.mark.parametrize("n", range(6))
def test_herbrand_set_size(n):
    ws, h = _setup()
    assert len(instantiate_hs(h, {"n": n, "m": 1}, ws.psi)) == n + 1


@pytest.mark.parametrize("n,m", GRID)
def test_verify_unsat_grid(n, m):
    ws, h = _setup()
    assert verify_unsat(ws.goal, h, {"n": n, "m": m}, ws.psi).unsat


@pytest.mark.parametrize("n,m", [(0, 0), (2, 1), (3, 3)])
def test_literal_reading_also_unsat(n, m):
    ws, h = _setup()
    assert verify_unsat(ws.goal, h, {"n": n, "m": m}, ws.psi, literal=True).unsat


def test_each_substitution_is_needed():
    ws, h = _setup()
    sigma = {"n": 1, "m": 0}
    full = instantiate_hs(h, sigma, ws.psi)
    for drop in full:
        rest = full - {drop}
        res = verify_unsat(ws.goal, h, sigma, ws.psi, subs=rest)
        assert not res.unsat
        assert all(holds(f, res.model) for f in instance_formulas(ws.goal, rest, sigma, ws.psi))


def test_schematic_substitutions_listed():
    ws, h = _setup()
    shown = {show(t) for t in substitutions(h)}
    assert "{X[n] <- ^f(Y[0]; m), Z[0] <- ^f(a; n)}" in shown


def test_ground_unsat_basic():
    ws = fixture("ex_proofschema")
    p = formula(ws, "P(a, a)")
    assert not ground_unsat([p]).unsat
    assert ground_unsat([p, formula(ws, "~P(a, a)")]).unsat
    assert not ground_unsat([]).unsat


@pytest.mark.parametrize("n,m", [(0, 0), (1, 0), (2, 1), (3, 2), (4, 0)])
def test_cut_derivation_cross_oracle(n, m):
    # each cut-derivation leaf is its axiom under some Herbrand substitution, and all are used
    from srkernel.calculus import Axiom, check_derivation, leaves, to_cut_derivation
    from srkernel.formulas import apply_fo_formula, eval_formula
    from srkernel.schemata import instantiate

    ws, h = _setup()
    sigma = {"n": n, "m": m}
    inst = instantiate(ws.schema(), sigma)
    cut = to_cut_derivation(inst, ws.psi)
    assert check_derivation(cut, ws.psi) == []
    hs = instantiate_hs(h, sigma, ws.psi)
    axioms = [lf.sequent.succ[0] for lf in leaves(inst) if isinstance(lf, Axiom)]
    got = [lf.sequent.succ[0] for lf in leaves(cut) if isinstance(lf, Axiom)]
    assert len(axioms) == len(got)
    used = set()
    for a, g in zip(axioms, got):
        target = eval_formula(g, sigma, ws.psi)
        hits = {th for th in hs if eval_formula(apply_fo_formula(th, a, ws.psi), sigma, ws.psi) == target}
        assert hits, show(target)
        used |= hits
    assert used == set(hs)
