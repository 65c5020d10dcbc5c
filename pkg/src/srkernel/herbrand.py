"""Herbrand schemata: extraction from proof schemata, instantiation and unsatisfiability checks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .calculus import Axiom, Inference, Sequent, VarLeaf, nodes
from .formulas import And, Atom, Formula, Not, Or, apply_fo_formula, eval_formula, formula_params, subst_params_formula
from .schemata import SCases, SClosure, SCompose, SLeaf, _closure_leaf_var, _leaf_derivation, _resolver
from .substitution import FO_EPSILON, FOSubstitution, eval_subst
from .terms import DepthExceeded, KernelError, Num, recursion_bound


class NotGround(KernelError):
    pass


# ---------------------------------------------------------------- AST


@dataclass(frozen=True)
class HEntry:
    """A leaf of the underlying proof with the resolution substitutions below it, nearest first."""

    chain: tuple
    target: object  # Sequent for axioms, ProofVariable for open leaves


@dataclass(frozen=True)
class HBase:
    entries: tuple
    end: object


@dataclass(frozen=True)
class HCompose:
    first: object
    second: object


@dataclass(frozen=True)
class HClosure:
    body: object
    param: str
    var: object  # the proof variable at the closure base, typed with param := 0


@dataclass(frozen=True)
class HCases:
    branches: tuple


def _chains(root) -> list:
    below = {id(root): ()}
    out = []
    for _, n in nodes(root):
        chain = below[id(n)]
        if isinstance(n, Inference) and n.rule == "res" and n.subst is not None:
            up = (n.subst,) + chain
        else:
            up = chain
        for p in n.premises:
            below[id(p)] = up
        if isinstance(n, Axiom):
            out.append(HEntry(chain, n.sequent))
        elif isinstance(n, VarLeaf):
            out.append(HEntry(chain, n.var))
    return out


def extract(schema, named: Optional[Mapping] = None):
    """The Herbrand schema, structurally parallel to the proof schema."""
    resolve = _resolver(named)

    def go(s):
        s = resolve(s)
        if isinstance(s, SLeaf):
            root = s.derivation.root
            return HBase(tuple(_chains(root)), root.conclusion)
        if isinstance(s, SCompose):
            return HCompose(go(s.first), go(s.second))
        if isinstance(s, SClosure):
            v = _closure_leaf_var(_leaf_derivation(s.body, resolve).root, s.param, s.var)
            return HClosure(go(s.body), s.param, v)
        if isinstance(s, SCases):
            return HCases(tuple((c, go(b)) for c, b in s.branches))
        raise KernelError(f"not a proof schema: {s!r}")

    return go(schema)


def substitutions(h) -> list:
    """All distinct schematic substitutions occurring in a Herbrand schema."""
    out: list = []
    stack = [h]
    while stack:
        x = stack.pop()
        if isinstance(x, HBase):
            for e in x.entries:
                for t in e.chain:
                    if t not in out:
                        out.append(t)
        elif isinstance(x, HCompose):
            stack += [x.second, x.first]
        elif isinstance(x, HClosure):
            stack.append(x.body)
        elif isinstance(x, HCases):
            stack += [b for _, b in reversed(x.branches)]
    return out


# ---------------------------------------------------------------- instantiation


def _inst_var(v, sigma):
    from .calculus import ProofVariable

    return ProofVariable(v.name, subst_params_formula(v.type, {k: Num(x) for k, x in sigma.items()}))


def _evaluate(h, sigma: dict, theory, literal: bool, limit: int):
    """(entries with first-order chains, end) at σ."""
    if isinstance(h, HBase):
        entries = []
        for e in h.entries:
            chain = tuple(eval_subst(t, sigma, theory) for t in e.chain)
            tgt = e.target if isinstance(e.target, Sequent) else _inst_var(e.target, sigma)
            entries.append((chain, tgt))
        end = h.end if isinstance(h.end, Sequent) else _inst_var(h.end, sigma)
        return entries, end
    if isinstance(h, HCompose):
        a = _evaluate(h.first, sigma, theory, literal, limit)
        b = _evaluate(h.second, sigma, theory, literal, limit)
        return _compose_entries(a, b, literal)
    if isinstance(h, HClosure):
        nu = sigma[h.param]
        if nu > limit:
            raise DepthExceeded(f"closure over {h.param} needs {nu} unrollings (bound {limit})")
        v0 = _inst_var(h.var, {**sigma, h.param: 0})
        acc = ([((), v0)], v0)
        for l in range(1, nu + 1):
            acc = _compose_entries(_evaluate(h.body, {**sigma, h.param: l}, theory, literal, limit), acc, literal)
        return acc
    if isinstance(h, HCases):
        for cond, sub in h.branches:
            if cond is None or cond.holds(sigma):
                return _evaluate(sub, sigma, theory, literal, limit)
        raise KernelError("no case applies")
    raise KernelError(f"not a Herbrand schema: {h!r}")


def _compose_entries(a, b, literal: bool):
    ea, v = a
    eb, end_b = b
    holes = [c for c, t in eb if t == v]
    if not holes and end_b == v:
        return ea, v
    out = []
    for c2 in holes:
        for c1, t1 in ea:
            out.append((c1 + c2 + (c2 if literal else ()), t1))
    out += [(c, t) for c, t in eb if t != v]
    return out, end_b


def _chain_subst(chain) -> FOSubstitution:
    out = FO_EPSILON
    for s in chain:
        out = out.then(s)
    return out


def instantiate_hs(h, sigma: Mapping[str, int], theory=None, literal: bool = False, bound: Optional[int] = None) -> frozenset:
    """The finite set of first-order substitutions the schema denotes at σ."""
    limit = recursion_bound() if bound is None else bound
    iota = getattr(theory, "iota", theory)
    entries, _ = _evaluate(h, dict(sigma), iota, literal, limit)
    return frozenset(_chain_subst(c) for c, t in entries if isinstance(t, Sequent))


# ---------------------------------------------------------------- unsatisfiability


@dataclass(frozen=True)
class SatResult:
    unsat: bool
    model: Optional[dict] = None

    def __bool__(self):
        return self.unsat


def ground_unsat(formulas: Iterable[Formula]) -> SatResult:
    """Decide propositional unsatisfiability of ground quantifier-free formulas."""
    from sympy import Symbol, false, true
    from sympy.logic.boolalg import And as SAnd, Not as SNot, Or as SOr
    from sympy.logic.inference import satisfiable

    atoms: dict = {}

    def conv(f):
        stack = [(f, False)]
        done: list = []
        while stack:
            x, visited = stack.pop()
            if isinstance(x, Atom):
                sym = atoms.get(x)
                if sym is None:
                    sym = atoms[x] = Symbol(f"a{len(atoms)}")
                done.append(sym)
            elif not visited:
                stack.append((x, True))
                kids = (x.arg,) if isinstance(x, Not) else (x.left, x.right) if isinstance(x, (And, Or)) else None
                if kids is None:
                    raise NotGround(f"cannot decide {x!r}")
                stack.extend((k, False) for k in reversed(kids))
            elif isinstance(x, Not):
                done.append(SNot(done.pop()))
            else:
                r, l = done.pop(), done.pop()
                done.append(SAnd(l, r) if isinstance(x, And) else SOr(l, r))
        return done[0]

    parts = [conv(f) for f in formulas]
    expr = SAnd(*parts) if parts else true
    model = satisfiable(expr)
    if model is False:
        return SatResult(True)
    back = {v: k for k, v in atoms.items()}
    full = {a: False for a in atoms}
    if model is not True and model:
        for sym, val in model.items():
            if sym in back:
                full[back[sym]] = bool(val)
    return SatResult(False, full)


def holds(f: Formula, model: Mapping) -> bool:
    """Truth value of a ground formula under an atom valuation."""
    if isinstance(f, Atom):
        return bool(model.get(f, False))
    if isinstance(f, Not):
        return not holds(f.arg, model)
    if isinstance(f, And):
        return holds(f.left, model) and holds(f.right, model)
    if isinstance(f, Or):
        return holds(f.left, model) or holds(f.right, model)
    raise NotGround(f"cannot evaluate {f!r}")


def instance_formulas(goal, subs: Iterable[FOSubstitution], sigma: Mapping[str, int], psi) -> list:
    """{q̂(X,ν)θ evaluated} for θ in subs."""
    base = eval_formula(goal, sigma, psi)
    if formula_params(base):
        raise NotGround("evaluation left a parameter")
    return [apply_fo_formula(th, base) for th in subs]


def verify_unsat(goal, h, sigma: Mapping[str, int], psi, literal: bool = False, subs=None) -> SatResult:
    """Unsatisfiability of the Herbrand instance sequents at σ."""
    if subs is None:
        subs = instantiate_hs(h, sigma, psi, literal)
    return ground_unsat(instance_formulas(goal, subs, sigma, psi))
