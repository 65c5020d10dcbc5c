"""Schematic substitutions, states, the partial evaluator ψ_p, application and composition."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Generic, Iterable, Iterator, Mapping, Optional, Sequence, TypeVar

from .terms import (
    App,
    Const,
    HatApp,
    IotaTerm,
    KernelError,
    Num,
    NumApp,
    NumTerm,
    NotStandard,
    Param,
    Pred,
    Succ,
    VarExpr,
    eval_iota,
    is_first_order,
    is_standard_varexpr,
    map_num_term,
    normalize_ground_hats,
    num_params,
    simplify_num,
    subst_num,
    subterms,
    term_params,
)


class DomainCollision(KernelError):
    pass


# ---------------------------------------------------------------- states and conditions

C1, C2, C3 = 1, 2, 3
_CASE_BOUNDS = {C1: (0, 0), C2: (1, 1), C3: (2, None)}


def _meet(a: tuple, b: tuple) -> tuple:
    lo = max(a[0], b[0])
    if a[1] is None:
        hi = b[1]
    elif b[1] is None:
        hi = a[1]
    else:
        hi = min(a[1], b[1])
    return lo, hi


def _nonempty(b: tuple) -> bool:
    return b[1] is None or b[0] <= b[1]


@dataclass(frozen=True)
class State:
    """One of C1 (n=0), C2 (n!=0 & p(n)=0), C3 (n!=0 & p(n)!=0) per parameter."""

    cases: tuple  # ((param, case), ...)

    def __post_init__(self):
        object.__setattr__(self, "cases", tuple(self.cases))

    @property
    def params(self) -> tuple:
        return tuple(n for n, _ in self.cases)

    def case(self, n: str) -> Optional[int]:
        for m, c in self.cases:
            if m == n:
                return c
        return None

    def bounds(self) -> dict:
        return {n: _CASE_BOUNDS[c] for n, c in self.cases}

    def fixed(self) -> dict:
        """Parameters whose value the state determines."""
        return {n: Num(c - 1) for n, c in self.cases if c != C3}

    def contains(self, sigma: Mapping[str, int]) -> bool:
        return all(_case_of(sigma[n]) == c for n, c in self.cases)

    def as_condition(self) -> "Condition":
        atoms = []
        for n, c in self.cases:
            if c == C1:
                atoms.append((n, False, True))
            else:
                atoms.append((n, False, False))
                atoms.append((n, True, c == C2))
        return Condition(tuple(atoms))


def _case_of(v: int) -> int:
    return C1 if v == 0 else C2 if v == 1 else C3


def states_over(params: Sequence[str]) -> list[State]:
    """All 3^k states over the parameters, in product order (C1 < C2 < C3)."""
    params = list(dict.fromkeys(params))
    return [State(tuple(zip(params, combo))) for combo in itertools.product((C1, C2, C3), repeat=len(params))]


def state_of(sigma: Mapping[str, int], params: Sequence[str]) -> State:
    """The unique state over params containing σ."""
    return State(tuple((n, _case_of(sigma[n])) for n in dict.fromkeys(params)))


@dataclass(frozen=True)
class Condition:
    """A conjunction of atoms t = 0 / t != 0 with t a parameter n or p(n).

    Each atom is (param, on_predecessor, equals_zero).
    """

    atoms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))

    @property
    def params(self) -> list[str]:
        return list(dict.fromkeys(a[0] for a in self.atoms))

    def bounds(self) -> dict:
        out: dict = {}
        for n, on_pred, zero in self.atoms:
            if on_pred:
                b = (0, 1) if zero else (2, None)
            else:
                b = (0, 0) if zero else (1, None)
            out[n] = _meet(out.get(n, (0, None)), b)
        return out

    def satisfiable(self) -> bool:
        return all(_nonempty(b) for b in self.bounds().values())

    def holds(self, sigma: Mapping[str, int]) -> bool:
        for n, on_pred, zero in self.atoms:
            v = sigma[n]
            if on_pred:
                v = max(v - 1, 0)
            if (v == 0) != zero:
                return False
        return True

    def conj(self, other: Optional["Condition"]) -> "Condition":
        if other is None:
            return self
        return Condition(self.atoms + tuple(a for a in other.atoms if a not in self.atoms))

    def consistent_states(self, params: Sequence[str]) -> list[State]:
        b = self.bounds()
        out = []
        for st in states_over(params):
            if all(_nonempty(_meet(b.get(n, (0, None)), sb)) for n, sb in st.bounds().items()):
                out.append(st)
        return out


TRUE = Condition(())


def merge_bounds(*parts) -> dict:
    out: dict = {}
    for part in parts:
        if not part:
            continue
        for n, b in part.items():
            out[n] = _meet(out.get(n, (0, None)), b)
    return out


def sample_assignments(params: Sequence[str], bounds: Optional[Mapping] = None, limit: int = 6):
    """All assignments with values in [0, limit] consistent with bounds."""
    ranges = []
    for n in params:
        lo, hi = (bounds or {}).get(n, (0, None))
        top = limit if hi is None else min(hi, limit)
        ranges.append(range(lo, top + 1))
    for combo in itertools.product(*ranges):
        yield dict(zip(params, combo))


# ---------------------------------------------------------------- substitutions


class SSubstitution:
    """A finite map from variable expressions to term schemata.

    Equality is set equality of bindings; iteration keeps insertion order.
    """

    __slots__ = ("bindings", "_map")

    def __init__(self, bindings: Iterable = ()):
        out = []
        seen: dict = {}
        for lhs, rhs in bindings:
            if not isinstance(lhs, VarExpr):
                raise KernelError(f"substitution domain must consist of variable expressions, got {lhs!r}")
            if lhs in seen:
                if seen[lhs] != rhs:
                    raise DomainCollision(f"two bindings for the same variable expression {lhs!r}")
                continue
            seen[lhs] = rhs
            out.append((lhs, rhs))
        self.bindings = tuple(out)
        self._map = seen

    def __iter__(self):
        return iter(self.bindings)

    def __len__(self):
        return len(self.bindings)

    def __bool__(self):
        return bool(self.bindings)

    def __eq__(self, other):
        if not isinstance(other, SSubstitution):
            return NotImplemented
        return self._map == other._map

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __repr__(self):
        return f"{type(self).__name__}({list(self.bindings)!r})"

    def get(self, v: VarExpr):
        return self._map.get(v)

    def domain(self) -> list[VarExpr]:
        return [l for l, _ in self.bindings]

    def classes(self) -> set[str]:
        return {l.cls.name for l, _ in self.bindings}

    def params(self) -> list[str]:
        out: list[str] = []
        for l, r in self.bindings:
            for p in term_params(l) + term_params(r):
                if p not in out:
                    out.append(p)
        return out

    def map(self, f) -> "SSubstitution":
        return SSubstitution((f(l), f(r)) for l, r in self.bindings)

    def is_standard(self) -> bool:
        for l, r in self.bindings:
            if not is_standard_varexpr(l):
                return False
            if not all(is_standard_varexpr(v) for v in subterms(r) if isinstance(v, VarExpr)):
                return False
        for (a, _), (b, _) in itertools.combinations(self.bindings, 2):
            if parameter_unifiable(a, b):
                return False
        return True


EPSILON = SSubstitution()


class FOSubstitution(SSubstitution):
    """A first-order substitution: variables with numeral indices, parameter-free terms."""

    __slots__ = ()

    def __init__(self, bindings: Iterable = ()):
        bindings = [(l, r) for l, r in bindings if l != r]
        super().__init__(bindings)
        for l, r in self.bindings:
            if not l.is_variable or not is_first_order(r):
                raise KernelError("first-order substitutions must be parameter free")

    def then(self, other: "FOSubstitution") -> "FOSubstitution":
        """Composition: apply self, then other."""
        out = [(l, apply_syntactic(other, r)) for l, r in self.bindings]
        dom = set(self.domain())
        out += [(l, r) for l, r in other.bindings if l not in dom]
        return FOSubstitution(out)


FO_EPSILON = FOSubstitution()


def apply_syntactic(theta: SSubstitution, t: IotaTerm) -> IotaTerm:
    """Homomorphic replacement of syntactically matching variable expressions."""
    if not theta:
        return t
    m = theta._map
    if isinstance(t, VarExpr):
        r = m.get(t)
        return t if r is None else r
    if isinstance(t, Const):
        return t
    if isinstance(t, App):
        return App(t.fn, tuple(apply_syntactic(theta, a) for a in t.args))
    return HatApp(t.fn, tuple(apply_syntactic(theta, a) for a in t.iargs), t.nargs)


def eval_subst(theta: SSubstitution, sigma: Mapping[str, int], theory=None) -> FOSubstitution:
    """The σ-evaluation Θ[σ]."""
    out = []
    seen = set()
    for l, r in theta.bindings:
        lv = eval_iota(l, sigma, theory)
        if lv in seen:
            raise DomainCollision(f"two domain expressions evaluate to the same variable {lv!r}")
        seen.add(lv)
        out.append((lv, eval_iota(r, sigma, theory)))
    return FOSubstitution(out)


# ---------------------------------------------------------------- parameter unifiability


def _basic(r: NumTerm) -> bool:
    return not any(isinstance(x, NumApp) for x in _num_nodes(r))


def _num_nodes(r: NumTerm):
    stack = [r]
    while stack:
        x = stack.pop()
        yield x
        if isinstance(x, (Succ, Pred)):
            stack.append(x.arg)
        elif isinstance(x, NumApp):
            stack.extend(x.args)


def _depth_weight(r: NumTerm) -> int:
    w = 0
    for x in _num_nodes(r):
        if isinstance(x, Num):
            w += x.value
        elif isinstance(x, (Succ, Pred)):
            w += 1
    return w


def _value(r: NumTerm, env: Mapping[str, int]) -> int:
    if isinstance(r, Num):
        return r.value
    if isinstance(r, Param):
        return env[r.name]
    if isinstance(r, Succ):
        return _value(r.arg, env) + 1
    return max(_value(r.arg, env) - 1, 0)


def _search(pairs: list, domains: Mapping[str, Iterable[int]]) -> bool:
    params = list(domains)
    for combo in itertools.product(*(domains[n] for n in params)):
        env = dict(zip(params, combo))
        if all(_value(a, env) == _value(b, env) for a, b in pairs):
            return True
    return False


def _box(pairs) -> int:
    return 3 + sum(_depth_weight(a) + _depth_weight(b) for a, b in pairs)


@lru_cache(maxsize=65536)
def _unifiable_cached(v1: VarExpr, v2: VarExpr, state: Optional[State]) -> bool:
    if v1.cls != v2.cls:
        return False
    pairs = [(a, b) for a, b in zip(v1.indices, v2.indices) if a != b]
    if not pairs:
        return True
    for a, b in pairs:
        if not (_basic(a) and _basic(b)):
            raise NotStandard("indices with defined numeric symbols are not supported")
    k = _box(pairs)
    params = list(dict.fromkeys(p for a, b in pairs for p in num_params(a) + num_params(b)))
    domains = {}
    for n in params:
        c = state.case(n) if state is not None else None
        if c == C1:
            domains[n] = (0,)
        elif c == C2:
            domains[n] = (1,)
        elif c == C3:
            domains[n] = range(2, k + 2)
        else:
            domains[n] = range(0, k + 1)
    return _search(pairs, domains)


def _standard_table(v1: VarExpr, v2: VarExpr) -> bool:
    allowed: dict = {}
    for a, b, n in zip(v1.indices, v2.indices, v1.cls.params):
        if a == b:
            continue
        hi = 2 + max((x.value for x in (a, b) if isinstance(x, Num)), default=0)
        vals = {v for v in range(hi + 1) if _value(a, {n: v}) == _value(b, {n: v})}
        allowed[n] = allowed[n] & vals if n in allowed else vals
        if not allowed[n]:
            return False
    return True


def parameter_unifiable(v1: VarExpr, v2: VarExpr) -> bool:
    """Whether some σ evaluates both expressions to the same variable.

    Standard expressions are decided position by position; other basic index
    forms by exhaustive search over a box large enough to contain a witness.
    """
    if v1.cls != v2.cls:
        return False
    if is_standard_varexpr(v1, extended=True) and is_standard_varexpr(v2, extended=True):
        return _standard_table(v1, v2)
    return _unifiable_cached(v1, v2, None)


def parameter_unifiable_in(v1: VarExpr, v2: VarExpr, state: State) -> bool:
    """Parameter unifiability restricted to the assignments of a state."""
    return _unifiable_cached(v1, v2, state)


# ---------------------------------------------------------------- psi_p


def psi_num(p: State, r: NumTerm) -> NumTerm:
    fixed = p.fixed()
    if not fixed:
        return r
    return simplify_num(subst_num(r, fixed))


def psi_term(p: State, t: IotaTerm) -> IotaTerm:
    """Partial evaluation of t under the state p."""
    if not p.fixed():
        return t
    return map_num_term(t, lambda r: psi_num(p, r))


def psi_subst(p: State, theta: SSubstitution) -> SSubstitution:
    if not p.fixed():
        return theta
    return SSubstitution((psi_term(p, l), psi_term(p, r)) for l, r in theta.bindings)


# ---------------------------------------------------------------- case maps

V = TypeVar("V")


@dataclass(frozen=True)
class CaseMap(Generic[V]):
    """A value per state over a parameter list."""

    params: tuple
    entries: tuple  # ((State, value), ...)

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "entries", tuple(self.entries))

    @classmethod
    def constant(cls, params: Sequence[str], value) -> "CaseMap":
        return cls(tuple(params), tuple((st, value) for st in states_over(params)))

    def at(self, state: State):
        for st, v in self.entries:
            if st == state:
                return v
        # allow lookup by a state over a superset of params
        want = {n: state.case(n) for n in self.params}
        for st, v in self.entries:
            if all(st.case(n) == want[n] for n in self.params):
                return v
        raise KeyError(state)

    __getitem__ = at

    def at_sigma(self, sigma: Mapping[str, int]):
        return self.at(state_of(sigma, self.params))

    def values(self) -> list:
        return [v for _, v in self.entries]

    def is_constant(self) -> bool:
        vals = self.values()
        return all(v == vals[0] for v in vals)

    def merged(self) -> list:
        """Groups of states sharing a syntactically equal value."""
        groups: list = []
        for st, v in self.entries:
            for g in groups:
                if g[1] == v:
                    g[0].append(st)
                    break
            else:
                groups.append(([st], v))
        return [(tuple(sts), v) for sts, v in groups]

    def __iter__(self) -> Iterator:
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def _ordered_params(*groups: Iterable[str]) -> list[str]:
    out: list[str] = []
    for g in groups:
        for p in g:
            if p not in out:
                out.append(p)
    return out


def subst_params_list(theta: SSubstitution) -> list[str]:
    out: list[str] = []
    for l, _ in theta.bindings:
        out = _ordered_params(out, term_params(l))
    for _, r in theta.bindings:
        out = _ordered_params(out, term_params(r))
    return out


def ap_term_at(theta: SSubstitution, t: IotaTerm, p: State, theory=None) -> IotaTerm:
    out = apply_syntactic(psi_subst(p, theta), psi_term(p, t))
    if theory is not None:
        out = normalize_ground_hats(out, theory)
    return out


def ap(theta: SSubstitution, t, params: Optional[Sequence[str]] = None, theory=None, psi=None) -> CaseMap:
    """State-indexed application Ap(Θ, t).

    When no binding of Θ applies in any state the result is the constant map t.
    """
    from .formulas import Formula, ap_formula_at, formula_params, psi_formula

    is_formula = isinstance(t, Formula)
    tparams = formula_params(t) if is_formula else term_params(t)
    if params is None:
        params = _ordered_params(subst_params_list(theta), tparams)
    entries = []
    untouched = True
    for st in states_over(params):
        if is_formula:
            pt = psi_formula(st, t)
            v = ap_formula_at(theta, t, st, psi, theory=theory)
        else:
            pt = psi_term(st, t)
            v = apply_syntactic(psi_subst(st, theta), pt)
            if theory is not None:
                v = normalize_ground_hats(v, theory)
        if v != pt:
            untouched = False
        entries.append((st, v))
    if untouched:
        return CaseMap.constant(params, t)
    return CaseMap(tuple(params), tuple(entries))


def compose_at(theta1: SSubstitution, theta2: SSubstitution, p: State, theory=None) -> SSubstitution:
    """(Θ1 ∘ Θ2)|_p as the syntactic composition of the ψ-images."""
    a = psi_subst(p, theta1)
    b = psi_subst(p, theta2)
    out = []
    for l, r in a.bindings:
        r2 = apply_syntactic(b, r)
        if theory is not None:
            r2 = normalize_ground_hats(r2, theory)
        out.append((l, r2))
    for l, r in b.bindings:
        clash = [l1 for l1, _ in a.bindings if parameter_unifiable_in(l1, l, p)]
        if not clash:
            if theory is not None:
                r = normalize_ground_hats(r, theory)
            out.append((l, r))
        elif any(l1 != l for l1 in clash):
            raise KernelError("composition of non-standard substitutions within one state")
    return SSubstitution(out)


def compose(theta1: SSubstitution, theta2: SSubstitution, params: Optional[Sequence[str]] = None, theory=None) -> CaseMap:
    """State-indexed composition Θ1 ∘ Θ2."""
    if params is None:
        params = _ordered_params(subst_params_list(theta1), subst_params_list(theta2))
    if not theta2:
        return CaseMap.constant(params, theta1)
    if not theta1:
        return CaseMap.constant(params, theta2)
    return CaseMap(tuple(params), tuple((st, compose_at(theta1, theta2, st, theory)) for st in states_over(params)))
