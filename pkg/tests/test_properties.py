import itertools

from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from srkernel.substitution import (
    DomainCollision,
    SSubstitution,
    apply_syntactic,
    ap,
    compose,
    eval_subst,
    parameter_unifiable,
    parameter_unifiable_in,
    psi_subst,
    psi_term,
    state_of,
    states_over,
)
from srkernel.syntax import parse_term
from srkernel.terms import App, Const, eval_iota, eval_num, var
from srkernel.unification import BOTTOM, fo_unify, unify_standard
from srkernel.workspace import loads

THEORY = loads(
    """params n, m;
class X(n, m), Y(n);
var x, y;
def ^h(x; 0) = x;
def ^h(x; s(n)) = g(^h(x; n));
"""
)
IOTA = THEORY.psi.iota
PARAMS = ["n", "m"]
SIGMAS = [dict(zip(PARAMS, v)) for v in itertools.product(range(7), repeat=2)]

PROPS = settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow])


def T(text):
    return parse_term(text, THEORY.scope.copy())


# ---------------------------------------------------------------- strategies

N_IDX = st.sampled_from(["0", "n", "p(n)", "s(n)"])
M_IDX = st.sampled_from(["0", "m", "p(m)", "s(m)"])

varexpr_src = st.one_of(
    st.sampled_from(["x", "y"]),
    st.builds(lambda i, j: f"X[{i}, {j}]", N_IDX, M_IDX),
    st.builds(lambda i: f"Y[{i}]", N_IDX),
)


def _term_src(depth):
    leaf = st.one_of(st.just("a"), varexpr_src)
    if depth == 0:
        return leaf
    sub = _term_src(depth - 1)
    return st.one_of(
        leaf,
        st.builds(lambda a, b: f"f({a}, {b})", sub, sub),
        st.builds(lambda a: f"g({a})", sub),
        st.builds(lambda a, r: f"^h({a}; {r})", sub, N_IDX),
    )


term_src = _term_src(3)


@st.composite
def ssubst(draw):
    dom = draw(st.lists(varexpr_src, min_size=1, max_size=3, unique=True))
    vs = [T(d) for d in dom]
    assume(not any(parameter_unifiable(a, b) for a, b in itertools.combinations(vs, 2)))
    rng = [T(draw(term_src)) for _ in vs]
    return SSubstitution(list(zip(vs, rng)))


def ev(t, sigma):
    return eval_iota(t, sigma, IOTA)


def same_action(s1, s2, probes):
    return all(apply_syntactic(s1, p) == apply_syntactic(s2, p) for p in probes)


# ---------------------------------------------------------------- soundness against σ-instances


@PROPS
@given(ssubst(), term_src)
def test_ap_sound(theta, t_src):
    t = T(t_src)
    cm = ap(theta, t, params=PARAMS)
    for sigma in SIGMAS:
        want = apply_syntactic(eval_subst(theta, sigma, IOTA), ev(t, sigma))
        assert ev(cm.at_sigma(sigma), sigma) == want


@PROPS
@given(ssubst(), ssubst())
def test_compose_sound(t1, t2):
    cm = compose(t1, t2, params=PARAMS)
    for sigma in SIGMAS:
        a = eval_subst(t1, sigma, IOTA)
        b = eval_subst(t2, sigma, IOTA)
        got = eval_subst(cm.at_sigma(sigma), sigma, IOTA)
        probes = a.domain() + b.domain()
        assert same_action(got, a.then(b), probes)


@PROPS
@given(ssubst(), term_src)
def test_psi_sound(theta, t_src):
    t = T(t_src)
    for sigma in SIGMAS:
        p = state_of(sigma, PARAMS)
        assert ev(psi_term(p, t), sigma) == ev(t, sigma)
        assert eval_subst(psi_subst(p, theta), sigma, IOTA) == eval_subst(theta, sigma, IOTA)


@PROPS
@given(term_src, term_src)
def test_unify_standard_sound(a_src, b_src):
    a, b = T(a_src), T(b_src)
    res = unify_standard([a, b], params=PARAMS)
    for sigma in SIGMAS:
        th = res.at(state_of(sigma, PARAMS)) if res.cases is not None else res.single
        if th is BOTTOM:
            continue
        try:
            e = eval_subst(th, sigma, IOTA)
        except DomainCollision:
            raise AssertionError(f"unifier collapses at {sigma}")
        assert apply_syntactic(e, ev(a, sigma)) == apply_syntactic(e, ev(b, sigma)), sigma


# ---------------------------------------------------------------- states


@PROPS
@given(
    st.lists(st.sampled_from(["n", "m", "k"]), min_size=1, max_size=3, unique=True),
    st.lists(st.integers(0, 6), min_size=3, max_size=3),
)
def test_states_partition(params, values):
    sigma = dict(zip(["n", "m", "k"], values))
    hits = [p for p in states_over(params) if p.contains(sigma)]
    assert hits == [state_of(sigma, params)]
    assert len(states_over(params)) == 3 ** len(params)


# ---------------------------------------------------------------- first-order unification

FO_VARS = [var("x"), var("y")]
A = Const("a")


def _fo_src(depth):
    leaf = st.sampled_from([A] + FO_VARS)
    if depth == 0:
        return leaf
    sub = _fo_src(depth - 1)
    return st.one_of(
        leaf,
        st.builds(lambda u: App("g", (u,)), sub),
        st.builds(lambda u, v: App("f", (u, v)), sub, sub),
    )


def _ground(depth):
    out = [A]
    for _ in range(depth):
        out = [A] + [App("g", (u,)) for u in out] + [App("f", (u, v)) for u in out for v in out]
    return out


GROUND2 = _ground(2)


def _brute_unifiers(s, t):
    for vals in itertools.product(GROUND2, repeat=len(FO_VARS)):
        g = SSubstitution(list(zip(FO_VARS, vals)))
        if apply_syntactic(g, s) == apply_syntactic(g, t):
            yield g


@PROPS
@given(_fo_src(3), _fo_src(3))
def test_fo_unify_against_brute_force(s, t):
    mgu = fo_unify([s, t])
    found = list(_brute_unifiers(s, t))
    if mgu is BOTTOM:
        assert not found
        return
    assert apply_syntactic(mgu, s) == apply_syntactic(mgu, t)
    # idempotent
    assert all(apply_syntactic(mgu, r) == r for _, r in mgu.bindings)
    # every ground unifier factors through the mgu
    for g in found:
        assert all(apply_syntactic(g, apply_syntactic(mgu, v)) == apply_syntactic(g, v) for v in FO_VARS)
    # the mgu grounded by a is a unifier, so it is found whenever it is small enough
    ga = SSubstitution([(v, A) for v in FO_VARS])
    inst = [apply_syntactic(ga, apply_syntactic(mgu, v)) for v in FO_VARS]
    if all(u in GROUND2 for u in inst):
        assert found


# ---------------------------------------------------------------- parameter unifiability

ANY_IDX = st.sampled_from(["0", "1", "2", "n", "p(n)", "s(n)", "s(s(n))", "m", "p(m)", "s(m)"])


def _indices(v):
    return v.indices


def _enum(v1, v2, sigmas):
    return any(
        all(eval_num(a, s, None) == eval_num(b, s, None) for a, b in zip(_indices(v1), _indices(v2)))
        for s in sigmas
    )


BOX = [dict(zip(PARAMS, v)) for v in itertools.product(range(12), repeat=2)]


@PROPS
@given(ANY_IDX, ANY_IDX, ANY_IDX, ANY_IDX)
def test_parameter_unifiable_against_enumeration(i1, j1, i2, j2):
    v1, v2 = T(f"X[{i1}, {j1}]"), T(f"X[{i2}, {j2}]")
    assert parameter_unifiable(v1, v2) == _enum(v1, v2, BOX)
    for p in states_over(PARAMS):
        inside = [s for s in BOX if p.contains(s)]
        assert parameter_unifiable_in(v1, v2, p) == _enum(v1, v2, inside)
