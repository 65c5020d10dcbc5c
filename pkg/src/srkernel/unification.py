"""Equation classification, the reduction system, UAL, per-state unification and first-order mgus."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .substitution import (
    EPSILON,
    FO_EPSILON,
    CaseMap,
    FOSubstitution,
    SSubstitution,
    State,
    apply_syntactic,
    parameter_unifiable,
    psi_term,
    states_over,
)
from .terms import App, Const, HatApp, KernelError, VarExpr, term_params, varexprs


class _Bottom:
    """The failure value ⊥."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "BOT"

    def __reduce__(self):
        return (_Bottom, ())


BOTTOM = _Bottom()

IDENTITY = "identity"
OCCURS = "occurs"
ADMISSIBLE = "admissible"
COMPLEX = "complex"
CLASH = "clash"
DECOMPOSABLE = "decomposable"
FAILURE = "failure"


@dataclass(frozen=True)
class Equation:
    lhs: object
    rhs: object

    @property
    def kind(self) -> str:
        return classify(self)


FAILED = frozenset({Equation(Const("r"), BOTTOM)})


def _proper_occurrence(v: VarExpr, t) -> bool:
    stack = [t]
    while stack:
        x = stack.pop()
        if x == v:
            return True
        if isinstance(x, App):
            stack.extend(x.args)
        elif isinstance(x, HatApp):
            stack.extend(x.iargs)
    return False


def _head(t):
    if isinstance(t, Const):
        return (t.name, 0)
    return (t.fn, len(t.args))


def classify(e: Equation) -> str:
    s, t = e.lhs, e.rhs
    if s is BOTTOM or t is BOTTOM:
        return FAILURE
    if s == t:
        return IDENTITY
    if isinstance(s, VarExpr) or isinstance(t, VarExpr):
        v, other = (s, t) if isinstance(s, VarExpr) else (t, s)
        if not isinstance(other, VarExpr) and _proper_occurrence(v, other):
            return OCCURS
        return ADMISSIBLE
    if isinstance(s, HatApp) or isinstance(t, HatApp):
        return COMPLEX
    if _head(s) != _head(t):
        return CLASH
    return DECOMPOSABLE


def reduce(U: frozenset) -> frozenset:
    """One reduction step: failure, then identity removal, then decomposition."""
    if U == FAILED:
        return U
    kinds = {e: classify(e) for e in U}
    if any(k in (CLASH, OCCURS, FAILURE) for k in kinds.values()):
        return FAILED
    for e, k in kinds.items():
        if k == IDENTITY:
            return U - {e}
    for e, k in kinds.items():
        if k == DECOMPOSABLE:
            if isinstance(e.lhs, Const):
                return U - {e}
            return (U - {e}) | {Equation(a, b) for a, b in zip(e.lhs.args, e.rhs.args)}
    return U


def normalize(U: Iterable[Equation]) -> frozenset:
    """Normal form under the reduction system: empty, failed, or containing no reducible equation."""
    U = frozenset(U)
    while True:
        V = reduce(U)
        if V == U:
            return U
        U = V


def _show_key(v: VarExpr):
    from .syntax import show_term

    return (v.cls.name, show_term(v))


def _orient(e: Equation):
    if isinstance(e.lhs, VarExpr):
        return e.lhs, e.rhs
    return e.rhs, e.lhs


def _extend(theta: SSubstitution, v: VarExpr, t) -> SSubstitution:
    b = SSubstitution([(v, t)])
    return SSubstitution([(l, apply_syntactic(b, r)) for l, r in theta.bindings] + [(v, t)])


def ual(T: Sequence, theta: SSubstitution = EPSILON):
    """The unification algorithm UAL; ⊥ means no unifier was found."""
    T = list(dict.fromkeys(T))
    bound = 1 + sum(len(varexprs(t)) for t in T)
    for _ in range(bound + 1):
        if len(T) <= 1:
            return theta
        U = normalize(Equation(T[0], t) for t in T[1:])
        if U == FAILED:
            return BOTTOM
        if not U:
            return theta
        adm = [e for e in U if classify(e) == ADMISSIBLE]
        if not adm:
            return BOTTOM
        v, t = min((_orient(e) for e in adm), key=lambda vt: _show_key(vt[0]))
        b = SSubstitution([(v, t)])
        T = list(dict.fromkeys(apply_syntactic(b, x) for x in T))
        theta = _extend(theta, v, t)
    raise KernelError("UAL exceeded its iteration bound")


@dataclass(frozen=True)
class UnifResult:
    """Either one substitution (no split needed) or a per-state case map."""

    single: object = None
    cases: Optional[CaseMap] = None

    @property
    def unifiable(self) -> bool:
        if self.cases is None:
            return self.single is not BOTTOM
        return all(v is not BOTTOM for v in self.cases.values())

    def at(self, state: State):
        if self.cases is None:
            return self.single
        return self.cases.at(state)


def needs_split(T: Sequence) -> bool:
    vs = list(dict.fromkeys(v for t in T for v in varexprs(t)))
    return any(parameter_unifiable(a, b) for a, b in itertools.combinations(vs, 2))


def unify_standard(T: Sequence, params: Optional[Sequence[str]] = None) -> UnifResult:
    """Schematic unification with the per-state split when needed."""
    T = list(T)
    if not needs_split(T):
        return UnifResult(single=ual(T))
    if params is None:
        params = list(dict.fromkeys(p for t in T for p in term_params(t)))
    entries = []
    for st in states_over(params):
        entries.append((st, ual([psi_term(st, t) for t in T])))
    return UnifResult(cases=CaseMap(tuple(params), tuple(entries)))


# ---------------------------------------------------------------- first-order unification


def encode_atom(a):
    """Atoms as terms with a reserved head, so term unifiers apply to them."""
    from .formulas import Atom

    if isinstance(a, Atom):
        return App("@" + a.pred, a.args)
    return a


def _is_var(t) -> bool:
    return isinstance(t, VarExpr)


def _apply_fo(m: dict, t):
    if not m:
        return t
    if isinstance(t, VarExpr):
        return m.get(t, t)
    if isinstance(t, App):
        return App(t.fn, tuple(_apply_fo(m, a) for a in t.args))
    return t


def _occurs(v, t) -> bool:
    stack = [t]
    while stack:
        x = stack.pop()
        if x == v:
            return True
        if isinstance(x, App):
            stack.extend(x.args)
    return False


def fo_unify(items: Iterable):
    """Most general unifier of first-order terms or atoms, or ⊥."""
    items = [encode_atom(x) for x in items]
    for t in items:
        if term_params(t) or any(isinstance(x, HatApp) for x in _fo_nodes(t)):
            raise KernelError("fo_unify expects first-order input")
    if len(items) <= 1:
        return FO_EPSILON
    eqs = [(items[0], t) for t in items[1:]]
    sub: dict = {}
    while eqs:
        s, t = eqs.pop()
        s, t = _apply_fo(sub, s), _apply_fo(sub, t)
        if s == t:
            continue
        if not _is_var(s) and _is_var(t):
            s, t = t, s
        if _is_var(s):
            if _occurs(s, t):
                return BOTTOM
            one = {s: t}
            sub = {k: _apply_fo(one, v) for k, v in sub.items()}
            sub[s] = t
            continue
        if _head(s) != _head(t):
            return BOTTOM
        if isinstance(s, App):
            eqs.extend(zip(s.args, t.args))
    return FOSubstitution(sub.items())


def _fo_nodes(t):
    stack = [t]
    while stack:
        x = stack.pop()
        yield x
        if isinstance(x, App):
            stack.extend(x.args)
        elif isinstance(x, HatApp):
            stack.extend(x.iargs)


def simultaneous_mgu(W: Sequence[Iterable]):
    """Most general substitution unifying every set in W at once, or ⊥."""
    sigma = FO_EPSILON
    for group in W:
        group = [_apply_fo(sigma._map, encode_atom(a)) for a in group]
        tau = fo_unify(group)
        if tau is BOTTOM:
            return BOTTOM
        sigma = sigma.then(tau)
    return sigma


def is_variant(s1: SSubstitution, s2: SSubstitution, terms: Sequence) -> bool:
    """Whether two unifiers of the same terms are equal up to variable renaming."""
    a = [_apply_fo(s1._map, encode_atom(t)) for t in terms]
    b = [_apply_fo(s2._map, encode_atom(t)) for t in terms]
    ren: dict = {}
    back: dict = {}
    stack = list(zip(a, b))
    while stack:
        x, y = stack.pop()
        if _is_var(x) and _is_var(y):
            if ren.setdefault(x, y) != y or back.setdefault(y, x) != x:
                return False
            continue
        if _is_var(x) or _is_var(y) or _head(x) != _head(y):
            return False
        if isinstance(x, App):
            stack.extend(zip(x.args, y.args))
    return True
