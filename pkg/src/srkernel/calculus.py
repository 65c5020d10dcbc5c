"""Sequents, the resolution calculus with defined-symbol and proof-variable rules, and derivation checking."""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .formulas import (
    And,
    Atom,
    Formula,
    HatAtom,
    Not,
    NotUnfoldable,
    Or,
    ap_formula_at,
    apply_fo_formula,
    eval_formula,
    formula_params,
    formula_varexprs,
    hat_atoms,
    is_pl0,
    normalize_formula,
    psi_formula,
    rename_classes_formula,
    unfold,
    unfold_kind,
)
from .substitution import (
    FO_EPSILON,
    Condition,
    FOSubstitution,
    SSubstitution,
    State,
    eval_subst,
    merge_bounds,
    parameter_unifiable,
    parameter_unifiable_in,
    sample_assignments,
    states_over,
)
from .terms import App, Const, KernelError, VarExpr, VariableClass
from .unification import BOTTOM, fo_unify, is_variant, simultaneous_mgu

SEMANTIC_LIMIT = 5

CONNECTIVE_RULES = ("andr1", "andr2", "andl", "orr", "orl1", "orl2", "negr", "negl")
DEFINITION_RULES = ("Br", "Sr", "Bl", "Sl", "Br+", "Sr+", "Bl+", "Sl+", "Dr", "Dl", "Dr+", "Dl+")
RULES = CONNECTIVE_RULES + DEFINITION_RULES + ("res", "cut", "VI", "VE")


# ---------------------------------------------------------------- objects


@dataclass(frozen=True)
class Sequent:
    ante: tuple = ()
    succ: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "ante", tuple(self.ante))
        object.__setattr__(self, "succ", tuple(self.succ))

    @property
    def is_empty(self) -> bool:
        return not self.ante and not self.succ

    def map(self, fn) -> "Sequent":
        return Sequent(tuple(fn(f) for f in self.ante), tuple(fn(f) for f in self.succ))

    def formulas(self) -> Iterator[Formula]:
        yield from self.ante
        yield from self.succ


@dataclass(frozen=True)
class ProofVariable:
    name: str
    type: Formula


@dataclass(frozen=True)
class Axiom:
    sequent: Sequent

    @property
    def conclusion(self):
        return self.sequent

    premises = ()


@dataclass(frozen=True)
class VarLeaf:
    var: ProofVariable

    @property
    def conclusion(self):
        return self.var

    premises = ()


@dataclass(frozen=True)
class Inference:
    rule: str
    premises: tuple
    conclusion: object
    subst: Optional[SSubstitution] = None

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))


Node = object


@dataclass(frozen=True)
class Derivation:
    root: Node
    context: Optional[Condition] = None
    name: Optional[str] = None


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    path: tuple = ()

    def __str__(self):
        where = "/".join(map(str, self.path)) or "root"
        return f"{self.kind} at {where}: {self.message}"


SHAPE = "ShapeMismatch"
NOT_UNIFIER = "NotUnifier"
NOT_MGU = "NotMGU"
NOT_DISJOINT = "NotDisjoint"
BAD_AXIOM = "BadAxiom"
UNKNOWN_RULE = "UnknownRule"
ARITY = "WrongPremiseCount"


class DerivationError(KernelError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(map(str, self.violations)))


# ---------------------------------------------------------------- traversal


def nodes(root) -> Iterator[tuple]:
    """Pre-order (path, node) pairs, iteratively."""
    stack = [((), root)]
    while stack:
        path, n = stack.pop()
        yield path, n
        for i in range(len(n.premises) - 1, -1, -1):
            stack.append((path + (i,), n.premises[i]))


def postorder(root) -> list:
    out = []
    stack = [(root, False)]
    while stack:
        n, done = stack.pop()
        if done:
            out.append(n)
            continue
        stack.append((n, True))
        for p in reversed(n.premises):
            stack.append((p, False))
    return out


def leaves(root) -> list:
    return [n for _, n in nodes(root) if not n.premises]


def rebuild(root, fn):
    """Bottom-up reconstruction: fn(old_node, new_premises) -> new node."""
    memo: dict = {}
    for n in postorder(root):
        memo[id(n)] = fn(n, tuple(memo[id(p)] for p in n.premises))
    return memo[id(root)]


def count_rule(root, rule: str) -> int:
    return sum(1 for _, n in nodes(root) if isinstance(n, Inference) and n.rule == rule)


def end_sequent(root):
    return root.conclusion


# ---------------------------------------------------------------- comparison


class Env:
    """Checking environment: theory, context condition and parameter bounds."""

    def __init__(self, psi=None, context: Optional[Condition] = None):
        self.psi = psi
        self.context = context
        self.bounds = context.bounds() if context is not None else {}

    def iota(self):
        return self.psi.iota if self.psi is not None else None


def _norm(f: Formula, bounds) -> Formula:
    return normalize_formula(f, bounds or None)


def _counter(fs: Iterable[Formula], bounds) -> Counter:
    return Counter(_norm(f, bounds) for f in fs)


def _semantic_equal(a: Sequence[Formula], b: Sequence[Formula], env: Env, bounds) -> bool:
    if len(a) != len(b):
        return False
    params = list(dict.fromkeys(p for f in list(a) + list(b) for p in formula_params(f)))
    try:
        for sigma in sample_assignments(params, bounds, SEMANTIC_LIMIT):
            ea = Counter(eval_formula(f, sigma, env.psi) for f in a)
            eb = Counter(eval_formula(f, sigma, env.psi) for f in b)
            if ea != eb:
                return False
    except KernelError:
        return False
    return True


def formulas_equal(a: Sequence[Formula], b: Sequence[Formula], env: Env, bounds=None) -> bool:
    """Multiset equality: syntactic after normalization, else bounded semantic equality."""
    bounds = merge_bounds(env.bounds, bounds)
    if _counter(a, bounds) == _counter(b, bounds):
        return True
    return _semantic_equal(a, b, env, bounds)


def sequents_equal(s1: Sequent, s2: Sequent, env: Env, bounds=None) -> bool:
    bounds = merge_bounds(env.bounds, bounds)
    if _counter(s1.ante, bounds) == _counter(s2.ante, bounds) and _counter(s1.succ, bounds) == _counter(s2.succ, bounds):
        return True
    return _semantic_equal(s1.ante, s2.ante, env, bounds) and _semantic_equal(s1.succ, s2.succ, env, bounds)


# ---------------------------------------------------------------- connective rules


def _without(xs: tuple, i: int) -> tuple:
    return xs[:i] + xs[i + 1 :]


def _connective_image(rule: str, s: Sequent, side: str, i: int) -> Optional[Sequent]:
    f = (s.succ if side == "r" else s.ante)[i]
    if rule in ("andr1", "andr2") and side == "r" and isinstance(f, And):
        return Sequent(s.ante, _without(s.succ, i) + ((f.left if rule == "andr1" else f.right),))
    if rule == "andl" and side == "l" and isinstance(f, And):
        return Sequent((f.left, f.right) + _without(s.ante, i), s.succ)
    if rule == "orr" and side == "r" and isinstance(f, Or):
        return Sequent(s.ante, _without(s.succ, i) + (f.left, f.right))
    if rule in ("orl1", "orl2") and side == "l" and isinstance(f, Or):
        return Sequent(((f.left if rule == "orl1" else f.right),) + _without(s.ante, i), s.succ)
    if rule == "negr" and side == "r" and isinstance(f, Not):
        return Sequent((f.arg,) + s.ante, _without(s.succ, i))
    if rule == "negl" and side == "l" and isinstance(f, Not):
        return Sequent(_without(s.ante, i), s.succ + (f.arg,))
    return None


def _definition_image(rule: str, s: Sequent, i: int, env: Env) -> Optional[Sequent]:
    """Elimination rules unfold the principal atom; introduction rules are checked backwards."""
    side = "r" if rule.rstrip("+").endswith("r") else "l"
    f = (s.succ if side == "r" else s.ante)[i]
    if not isinstance(f, HatAtom) or env.psi is None:
        return None
    try:
        kind = unfold_kind(f, env.psi, env.bounds or None)
    except KernelError:
        return None
    if kind != rule[0]:
        return None
    try:
        body = unfold(f, env.psi, env.bounds or None)
    except (NotUnfoldable, KernelError):
        return None
    if side == "r":
        return Sequent(s.ante, s.succ[:i] + (body,) + s.succ[i + 1 :])
    return Sequent(s.ante[:i] + (body,) + s.ante[i + 1 :], s.succ)


def _unary_witnesses(rule: str, prem: Sequent, concl: Sequent):
    """Candidate (side, index, direction) choices for a unary rule."""
    if rule in CONNECTIVE_RULES:
        side = "r" if rule in ("andr1", "andr2", "orr", "negr") else "l"
        n = len(prem.succ if side == "r" else prem.ante)
        return [(side, i, "down") for i in range(n)]
    side = "r" if rule.rstrip("+").endswith("r") else "l"
    if rule.endswith("+"):
        n = len(concl.succ if side == "r" else concl.ante)
        return [(side, i, "up") for i in range(n)]
    n = len(prem.succ if side == "r" else prem.ante)
    return [(side, i, "down") for i in range(n)]


def unary_image(rule: str, prem: Sequent, witness, env: Env) -> Optional[Sequent]:
    side, i, direction = witness
    if rule in CONNECTIVE_RULES:
        return _connective_image(rule, prem, side, i)
    base = rule.rstrip("+")
    return _definition_image(base, prem, i, env) if direction == "down" else None


def _check_unary(node: Inference, env: Env):
    prem = node.premises[0].conclusion
    concl = node.conclusion
    if not isinstance(prem, Sequent) or not isinstance(concl, Sequent):
        return None, [Violation(SHAPE, f"{node.rule} relates two sequents")]
    for w in _unary_witnesses(node.rule, prem, concl):
        if w[2] == "down":
            img = unary_image(node.rule, prem, w, env)
            if img is not None and sequents_equal(img, concl, env):
                return w, []
        else:
            img = _definition_image(node.rule.rstrip("+"), concl, w[1], env)
            if img is not None and sequents_equal(img, prem, env):
                return w, []
    return None, [Violation(SHAPE, f"conclusion is not a {node.rule} image of the premise")]


# ---------------------------------------------------------------- resolution


def formula_as_term(f: Formula):
    """Formulas as first-order terms over reserved heads (for unification)."""
    if isinstance(f, Atom):
        return App("@" + f.pred, f.args)
    if isinstance(f, Not):
        return App("@not", (formula_as_term(f.arg),))
    if isinstance(f, And):
        return App("@and", (formula_as_term(f.left), formula_as_term(f.right)))
    if isinstance(f, Or):
        return App("@or", (formula_as_term(f.left), formula_as_term(f.right)))
    return Const("@" + repr(f))


def _fo_vars(fs: Iterable[Formula]) -> set:
    return {v for f in fs for v in formula_varexprs(f)}


def essentially_disjoint(A: Iterable[VarExpr], B: Iterable[VarExpr], state: Optional[State] = None) -> bool:
    """No expression of A is parameter-unifiable with one of B."""
    B = list(B)
    for a in A:
        for b in B:
            if state is None:
                if parameter_unifiable(a, b):
                    return False
            elif parameter_unifiable_in(a, b, state):
                return False
    return True


def _sub_multisets(n: int, limit: int = 4):
    idx = range(n)
    for k in range(1, min(n, limit) + 1):
        yield from itertools.combinations(idx, k)


def _is_fo_mode(prems: Sequence[Sequent], subst) -> bool:
    if subst is not None and not isinstance(subst, FOSubstitution):
        return False
    return all(is_pl0(f) for s in prems for f in s.formulas())


def _pick(xs: tuple, idx: tuple) -> tuple:
    return tuple(xs[i] for i in idx)


def _drop(xs: tuple, idx: tuple) -> tuple:
    s = set(idx)
    return tuple(x for i, x in enumerate(xs) if i not in s)


def _res_parts(left: Sequent, right: Sequent, witness):
    """(resolved formulas A, resolved formulas B, remaining ante, remaining succ)."""
    orient, ia, ib = witness
    if orient == "lr":  # A's in left succedent, B's in right antecedent
        A, B = _pick(left.succ, ia), _pick(right.ante, ib)
        ante = left.ante + _drop(right.ante, ib)
        succ = _drop(left.succ, ia) + right.succ
    else:  # A's in right succedent, B's in left antecedent
        A, B = _pick(right.succ, ia), _pick(left.ante, ib)
        ante = _drop(left.ante, ib) + right.ante
        succ = left.succ + _drop(right.succ, ia)
    return A, B, ante, succ


def _res_witnesses(left: Sequent, right: Sequent):
    for ia in _sub_multisets(len(left.succ)):
        for ib in _sub_multisets(len(right.ante)):
            yield ("lr", ia, ib)
    for ia in _sub_multisets(len(right.succ)):
        for ib in _sub_multisets(len(left.ante)):
            yield ("rl", ia, ib)


def _context_states(env: Env, params: Sequence[str]) -> list:
    if env.context is None:
        return states_over(params)
    return env.context.consistent_states(params)


def _res_params(prems, subst, concl) -> list:
    out: list = []
    for s in list(prems) + ([concl] if isinstance(concl, Sequent) else []):
        for f in s.formulas():
            for p in formula_params(f):
                if p not in out:
                    out.append(p)
    if subst is not None:
        for p in subst.params():
            if p not in out:
                out.append(p)
    return out


def res_image_fo(left: Sequent, right: Sequent, witness, sigma: SSubstitution) -> Sequent:
    _, _, ante, succ = _res_parts(left, right, witness)
    return Sequent(tuple(apply_fo_formula(sigma, f) for f in ante), tuple(apply_fo_formula(sigma, f) for f in succ))


def res_image_at(left: Sequent, right: Sequent, witness, theta: SSubstitution, st: State, env: Env) -> Sequent:
    _, _, ante, succ = _res_parts(left, right, witness)
    ap = lambda f: ap_formula_at(theta, f, st, env.psi, theory=env.iota())
    return Sequent(tuple(ap(f) for f in ante), tuple(ap(f) for f in succ))


def _check_res_fo(node: Inference, env: Env, require_mgu: bool):
    left, right = (p.conclusion for p in node.premises)
    sigma = node.subst if node.subst is not None else FO_EPSILON
    reasons: set = set()
    for w in _res_witnesses(left, right):
        A, B, _, _ = _res_parts(left, right, w)
        terms = [formula_as_term(f) for f in A + B]
        images = {formula_as_term(apply_fo_formula(sigma, f)) for f in A + B}
        if len(images) != 1:
            continue
        if _fo_vars(A) & _fo_vars(B):
            reasons.add(NOT_DISJOINT)
            continue
        if require_mgu:
            mgu = fo_unify(terms)
            dom_ok = set(sigma.domain()) <= _fo_vars(A + B)
            if mgu is BOTTOM or not dom_ok or not is_variant(mgu, sigma, terms):
                reasons.add(NOT_MGU)
                continue
        if sequents_equal(res_image_fo(left, right, w, sigma), node.conclusion, env):
            return w, []
        reasons.add(SHAPE)
    return None, [_res_failure(reasons)]


def _res_failure(reasons: set) -> Violation:
    for kind, msg in (
        (SHAPE, "conclusion does not match the resolvent"),
        (NOT_MGU, "substitution is not a most general unifier"),
        (NOT_DISJOINT, "resolved formulas share variables"),
    ):
        if kind in reasons:
            return Violation(kind, msg)
    return Violation(NOT_UNIFIER, "substitution unifies no choice of resolved formulas")


def _hat_class_names(fs) -> set:
    return {c.name for f in fs for h in hat_atoms(f) for c in h.classes}


def _check_res_schematic(node: Inference, env: Env):
    left, right = (p.conclusion for p in node.premises)
    theta = node.subst if node.subst is not None else SSubstitution()
    params = _res_params((left, right), theta, node.conclusion)
    states = _context_states(env, params)
    reasons: set = set()
    for w in _res_witnesses(left, right):
        A, B, _, _ = _res_parts(left, right, w)
        ok = True
        for st in states:
            b = merge_bounds(env.bounds, st.bounds())
            imgs = [ap_formula_at(theta, f, st, env.psi, theory=env.iota()) for f in A + B]
            if len({_norm(g, b) for g in imgs}) != 1 and not all(
                _semantic_equal([imgs[0]], [g], env, b) for g in imgs[1:]
            ):
                ok = False
                break
        if not ok:
            continue
        va, vb = set(_fo_vars(A)), set(_fo_vars(B))
        ha, hb = _hat_class_names(A), _hat_class_names(B)
        if (ha & (hb | {v.cls.name for v in vb})) or (hb & {v.cls.name for v in va}) or not all(
            essentially_disjoint(va, vb, st) for st in states
        ):
            reasons.add(NOT_DISJOINT)
            continue
        if all(
            sequents_equal(res_image_at(left, right, w, theta, st, env), node.conclusion, env, st.bounds())
            for st in states
        ):
            return w, []
        reasons.add(SHAPE)
    return None, [_res_failure(reasons)]


def _check_cut(node: Inference, env: Env):
    left, right = (p.conclusion for p in node.premises)
    for w in _res_witnesses(left, right):
        A, B, ante, succ = _res_parts(left, right, w)
        cut = A + B
        if len(_counter(cut, env.bounds)) != 1 and not formulas_equal(cut, (cut[0],) * len(cut), env):
            continue
        if sequents_equal(Sequent(ante, succ), node.conclusion, env):
            return w, []
    return None, [Violation(SHAPE, "cut premises do not share a cut formula matching the conclusion")]


# ---------------------------------------------------------------- node checks


def _check_axiom(node: Axiom, axioms, env: Env) -> list:
    s = node.sequent
    if s.ante or len(s.succ) != 1:
        return [Violation(BAD_AXIOM, "axioms have the form |- F")]
    if axioms is None:
        return []
    f = s.succ[0]
    for a in axioms:
        g = a.succ[0] if isinstance(a, Sequent) else a
        if _norm(f, env.bounds) == _norm(g, env.bounds) or _formula_variant(f, g):
            return []
    return [Violation(BAD_AXIOM, "leaf is not an admissible axiom")]


def _formula_variant(f: Formula, g: Formula) -> bool:
    if not (is_pl0(f) and is_pl0(g)):
        return False
    return _term_variant(formula_as_term(f), formula_as_term(g))


def _term_variant(a, b) -> bool:
    ren: dict = {}
    back: dict = {}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if isinstance(x, VarExpr) and isinstance(y, VarExpr) and x.is_variable and y.is_variable:
            if ren.setdefault(x, y) != y or back.setdefault(y, x) != x:
                return False
            continue
        if type(x) is not type(y):
            return False
        if isinstance(x, App):
            if x.fn != y.fn or len(x.args) != len(y.args):
                return False
            stack.extend(zip(x.args, y.args))
        elif x != y:
            return False
    return True


def _check_vi(node: Inference, env: Env) -> list:
    prem = node.premises[0].conclusion
    v = node.conclusion
    if not isinstance(v, ProofVariable) or not isinstance(prem, Sequent):
        return [Violation(SHAPE, "VI concludes a proof variable from a sequent")]
    if prem.ante or len(prem.succ) != 1 or not formulas_equal(prem.succ, (v.type,), env):
        return [Violation(SHAPE, "VI premise must be |- A for the variable's type A")]
    return []


def _check_ve(node: Inference, env: Env) -> list:
    prem = node.premises[0]
    s = node.conclusion
    if not isinstance(prem, VarLeaf) or not isinstance(s, Sequent):
        return [Violation(SHAPE, "VE applies to a proof-variable leaf")]
    if s.ante or len(s.succ) != 1 or not formulas_equal(s.succ, (prem.var.type,), env):
        return [Violation(SHAPE, "VE concludes |- A for the variable's type A")]
    return []


def check_node(node, env: Env, axioms=None, require_mgu: bool = True):
    """(witness, violations) for one node, using its premises' conclusions."""
    if isinstance(node, Axiom):
        return None, _check_axiom(node, axioms, env)
    if isinstance(node, VarLeaf):
        return None, []
    if not isinstance(node, Inference):
        return None, [Violation(SHAPE, f"unknown node {type(node).__name__}")]
    rule = node.rule
    if rule not in RULES:
        return None, [Violation(UNKNOWN_RULE, f"unknown rule {rule}")]
    want = 2 if rule in ("res", "cut") else 1
    if len(node.premises) != want:
        return None, [Violation(ARITY, f"{rule} takes {want} premise(s)")]
    if rule == "VI":
        return None, _check_vi(node, env)
    if rule == "VE":
        return None, _check_ve(node, env)
    if rule == "cut":
        return _check_cut(node, env)
    if rule == "res":
        prems = [p.conclusion for p in node.premises]
        if not all(isinstance(p, Sequent) for p in prems):
            return None, [Violation(SHAPE, "res premises are sequents")]
        if _is_fo_mode(prems, node.subst):
            return _check_res_fo(node, env, require_mgu)
        return _check_res_schematic(node, env)
    return _check_unary(node, env)


def check_inference(node, psi=None, context: Optional[Condition] = None, axioms=None, require_mgu: bool = True) -> list:
    """Violations of one inference (empty when it is a correct rule application)."""
    return check_node(node, Env(psi, context), axioms, require_mgu)[1]


def _unwrap(rho, context):
    if isinstance(rho, Derivation):
        return rho.root, rho.context if context is None else context
    return rho, context


def check_derivation(rho, psi=None, context: Optional[Condition] = None, axioms=None, require_mgu: bool = True) -> list:
    """All violations in a derivation, each tagged with its node path."""
    root, context = _unwrap(rho, context)
    env = Env(psi, context)
    out = []
    for path, n in nodes(root):
        for v in check_node(n, env, axioms, require_mgu)[1]:
            out.append(Violation(v.kind, v.message, path))
    return out


def witnesses(root, psi=None, context=None, require_mgu: bool = True) -> dict:
    """Witness per node id; raises DerivationError when a node does not check."""
    env = Env(psi, context)
    out = {}
    for path, n in nodes(root):
        w, vs = check_node(n, env, None, require_mgu)
        if vs:
            raise DerivationError([Violation(v.kind, v.message, path) for v in vs])
        out[id(n)] = w
    return out


# ---------------------------------------------------------------- regularization and total mgu


def _fresh_names(used: set, supply: Optional[Iterable[str]]):
    if supply is not None:
        for s in supply:
            used.add(s)
            yield s
    k = 0
    while True:
        k += 1
        s = f"v{k}"
        if s not in used:
            used.add(s)
            yield s


def _leaf_classes(leaf) -> dict:
    out: dict = {}
    if isinstance(leaf, Axiom):
        for f in leaf.sequent.formulas():
            for v in formula_varexprs(f):
                out.setdefault(v.cls.name, v.cls)
    return out


def _rename_sequent(s: Sequent, ren: Mapping[str, VariableClass]) -> Sequent:
    return s.map(lambda f: rename_classes_formula(f, ren))


def _replay(root, wit: dict, new_leaf: dict, env: Env):
    """Recompute conclusions bottom-up using stored witnesses; res substitutions become mgus."""

    def step(old, prems):
        if not old.premises:
            return new_leaf.get(id(old), old)
        w = wit[id(old)]
        if old.rule == "res":
            left, right = (p.conclusion for p in prems)
            A, B, _, _ = _res_parts(left, right, w)
            sigma = fo_unify([formula_as_term(f) for f in A + B])
            if sigma is BOTTOM:
                raise KernelError("renamed resolution premises are not unifiable")
            return Inference("res", prems, res_image_fo(left, right, w, sigma), sigma)
        if old.rule in ("VI", "VE"):
            return Inference(old.rule, prems, old.conclusion, old.subst)
        if old.rule == "cut":
            left, right = (p.conclusion for p in prems)
            _, _, ante, succ = _res_parts(left, right, w)
            return Inference("cut", prems, Sequent(ante, succ), old.subst)
        prem = prems[0].conclusion
        if w[2] == "down":
            img = unary_image(old.rule, prem, w, env)
        else:
            img = None
        if img is None:
            img = old.conclusion
        return Inference(old.rule, prems, img, old.subst)

    return rebuild(root, step)


def regularize(rho, supply: Optional[Iterable[str]] = None, psi=None):
    """Rename variables leaf by leaf (right to left) so resolution branches share none.

    The rightmost leaf keeps its names; fresh names come from supply first.
    """
    root, context = _unwrap(rho, None)
    env = Env(psi, context)
    wit = witnesses(root, psi, context)
    used = {c for lf in leaves(root) for c in _leaf_classes(lf)}
    fresh = _fresh_names(used, supply)
    new_leaf: dict = {}
    for k, lf in enumerate(reversed(leaves(root))):
        classes = _leaf_classes(lf)
        if k == 0 or not classes:
            continue
        ren = {name: VariableClass(next(fresh), c.params) for name, c in sorted(classes.items())}
        new_leaf[id(lf)] = Axiom(_rename_sequent(lf.sequent, ren))
    out = _replay(root, wit, new_leaf, env)
    return Derivation(out, context, rho.name) if isinstance(rho, Derivation) else out


def is_regular(rho) -> bool:
    root, _ = _unwrap(rho, None)
    seen: set = set()
    for lf in leaves(root):
        cs = set(_leaf_classes(lf))
        if cs & seen:
            return False
        seen |= cs
    return True


def resolution_problems(rho, psi=None) -> list:
    """The atom sets resolved by each res inference, top-down."""
    root, context = _unwrap(rho, None)
    wit = witnesses(root, psi, context)
    out = []
    for n in postorder(root):
        if isinstance(n, Inference) and n.rule == "res":
            left, right = (p.conclusion for p in n.premises)
            A, B, _, _ = _res_parts(left, right, wit[id(n)])
            out.append([formula_as_term(f) for f in A + B])
    return out


def total_mgu(rho, psi=None):
    """Most general simultaneous unifier of all resolution problems of a regular derivation."""
    return simultaneous_mgu(resolution_problems(rho, psi))


# ---------------------------------------------------------------- resolution to cut


def to_cut_derivation(rho, psi=None, state: Optional[State] = None):
    """Replace res by cut, pushing each resolving substitution into the sequents above it."""
    root, context = _unwrap(rho, None)
    env = Env(psi, context)
    wit = witnesses(root, psi, context)

    def apply(s, chain):
        if not isinstance(s, Sequent):
            return s
        for theta in chain:
            if state is None:
                s = s.map(lambda f: apply_fo_formula(theta, f, psi))
            else:
                s = s.map(lambda f: ap_formula_at(theta, f, state, psi, theory=env.iota()))
        return s

    chains = {id(root): ()}
    for _, n in nodes(root):
        chain = chains[id(n)]
        below = chain
        if isinstance(n, Inference) and n.rule == "res" and n.subst is not None:
            below = (n.subst,) + chain
        for p in n.premises:
            chains[id(p)] = below

    def step(old, prems):
        chain = chains[id(old)]
        if isinstance(old, Axiom):
            return Axiom(apply(old.sequent, chain))
        if isinstance(old, VarLeaf):
            return old
        concl = old.conclusion
        if state is not None and old.rule != "res" and isinstance(concl, Sequent):
            concl = concl.map(lambda f: psi_formula(state, f))
        concl = apply(concl, chain)
        if old.rule == "res":
            return Inference("cut", prems, concl)
        return Inference(old.rule, prems, concl, old.subst)

    out = rebuild(root, step)
    return Derivation(out, context, rho.name) if isinstance(rho, Derivation) else out


# ---------------------------------------------------------------- instances


def instantiate_derivation(rho, sigma: Mapping[str, int], psi=None):
    """The σ-instance: every formula evaluated, every substitution σ-evaluated."""
    root, _ = _unwrap(rho, None)
    iota = psi.iota if psi is not None else None

    def ev(f):
        return eval_formula(f, sigma, psi)

    def conv(c):
        if isinstance(c, Sequent):
            return c.map(ev)
        return ProofVariable(c.name, ev(c.type))

    def step(old, prems):
        if isinstance(old, Axiom):
            return Axiom(old.sequent.map(ev))
        if isinstance(old, VarLeaf):
            return VarLeaf(conv(old.var))
        sub = old.subst
        if sub is not None:
            sub = eval_subst(sub, sigma, iota)
        return Inference(old.rule, prems, conv(old.conclusion), sub)

    return rebuild(root, step)
