"""Proof schemata: composition, inductive closure, case split, refutation checking and instantiation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .calculus import (
    Axiom,
    Derivation,
    Env,
    Inference,
    ProofVariable,
    Sequent,
    VarLeaf,
    Violation,
    check_derivation,
    formulas_equal,
    leaves,
    nodes,
    rebuild,
)
from .formulas import HatAtom, subst_params_formula
from .substitution import Condition, FOSubstitution, SSubstitution
from .terms import DepthExceeded, KernelError, Num, is_first_order, recursion_bound, subst_params_term


class NotComposable(KernelError):
    pass


class NotVRegular(KernelError):
    pass


# ---------------------------------------------------------------- AST


@dataclass(frozen=True)
class SLeaf:
    derivation: Derivation
    name: Optional[str] = None


@dataclass(frozen=True)
class SCompose:
    first: object
    second: object


@dataclass(frozen=True)
class SClosure:
    body: object
    param: str
    var: str


@dataclass(frozen=True)
class SCases:
    branches: tuple  # ((Condition or None, schema), ...)
    chained: bool = True


# ---------------------------------------------------------------- proof variables


def proof_vars(root) -> list:
    """Proof variables at leaves, in order."""
    return [n.var for n in leaves(root) if isinstance(n, VarLeaf)]


def root_var(root) -> Optional[ProofVariable]:
    c = root.conclusion
    return c if isinstance(c, ProofVariable) else None


def is_v_regular(root) -> bool:
    vs = proof_vars(root)
    r = root_var(root)
    if r is not None and not isinstance(root, VarLeaf):
        vs = vs + [r]
    return len(vs) == len(set(vs))


def check_v_rules(rho) -> list:
    """VE only right above proof-variable leaves, VI only at the root, leaves only under VE."""
    root = rho.root if isinstance(rho, Derivation) else rho
    out = []
    for path, n in nodes(root):
        if not isinstance(n, Inference):
            continue
        if n.rule == "VI" and path != ():
            out.append(Violation("VRule", "VI applied below the root", path))
        if n.rule == "VE" and not (len(n.premises) == 1 and isinstance(n.premises[0], VarLeaf)):
            out.append(Violation("VRule", "VE applied mid-tree", path))
        if n.rule != "VE":
            for i, p in enumerate(n.premises):
                if isinstance(p, VarLeaf):
                    out.append(Violation("VRule", "proof-variable leaf without VE", path + (i,)))
        if n.rule == "VI":
            prem = n.premises[0].conclusion if n.premises else None
            if not isinstance(prem, Sequent) or prem.ante or len(prem.succ) != 1:
                out.append(Violation("VRule", "VI premise must be a one-formula sequent |- A", path))
    if not isinstance(root, VarLeaf) and not out:
        if not is_v_regular(root):
            out.append(Violation("VRule", "proof variables are not pairwise different", ()))
    return out


# ---------------------------------------------------------------- composition


def compose_proofs(rho1, rho2):
    """ρ1 ∘ ρ2: graft the derivation under ρ1's root VI at ρ2's leaf for that variable."""
    if not (isinstance(rho1, Inference) and rho1.rule == "VI"):
        raise NotComposable("left proof does not end in a variable introduction")
    v = rho1.conclusion
    if isinstance(rho2, VarLeaf):
        if rho2.var != v:
            raise NotComposable(f"proof variable {v.name} does not match the leaf")
        return rho1
    body = rho1.premises[0]
    sites = [n for _, n in nodes(rho2) if isinstance(n, Inference) and n.rule == "VE" and n.premises[0].var == v]
    if not sites:
        raise NotComposable(f"no leaf {v.name} of the required type")
    if len(sites) > 1:
        raise NotVRegular("the variable occurs at more than one leaf")
    site = sites[0]
    out = rebuild(rho2, lambda old, prems: body if old is site else _same(old, prems))
    if not is_v_regular(out):
        raise NotVRegular("composition is not V-regular")
    return out


def _same(old, prems):
    if not old.premises or all(a is b for a, b in zip(old.premises, prems)):
        return old
    return Inference(old.rule, prems, old.conclusion, old.subst)


# ---------------------------------------------------------------- parameter instantiation


def _num_env(sigma: Mapping[str, int]) -> dict:
    return {k: Num(v) for k, v in sigma.items()}


def _inst_subst(theta: SSubstitution, env) -> SSubstitution:
    pairs = [(subst_params_term(l, env), subst_params_term(r, env)) for l, r in theta.bindings]
    if pairs and all(l.is_variable and is_first_order(r) for l, r in pairs):
        return FOSubstitution(pairs)
    return SSubstitution(pairs)


def instantiate_params(root, sigma: Mapping[str, int]):
    """Replace parameters by numerals everywhere in a derivation."""
    env = _num_env(sigma)
    f = lambda x: subst_params_formula(x, env)

    def conc(c):
        if isinstance(c, Sequent):
            return c.map(f)
        return ProofVariable(c.name, f(c.type))

    def step(old, prems):
        if isinstance(old, Axiom):
            return Axiom(old.sequent.map(f))
        if isinstance(old, VarLeaf):
            return VarLeaf(conc(old.var))
        sub = _inst_subst(old.subst, env) if old.subst is not None else None
        return Inference(old.rule, prems, conc(old.conclusion), sub)

    return rebuild(root, step)


def _var_type_at(v: ProofVariable, param: str, value) -> ProofVariable:
    return ProofVariable(v.name, subst_params_formula(v.type, {param: value}))


def _closure_leaf_var(body_root, param: str, var: str) -> ProofVariable:
    for v in proof_vars(body_root):
        if v.name == var and isinstance(v.type, HatAtom) and v.type.nargs and param in _params_of(v.type.nargs[-1]):
            return v
    raise KernelError(f"closure body has no leaf {var} recursing on {param}")


def _params_of(r) -> list:
    from .terms import num_params

    return num_params(r)


def _leaf_derivation(schema, resolve):
    """The derivation under the leftmost leaf schema (for closure shape inspection)."""
    s = schema
    while True:
        if isinstance(s, SLeaf):
            return s.derivation
        if isinstance(s, SCompose):
            s = s.second
        elif isinstance(s, SClosure):
            s = s.body
        elif isinstance(s, SCases):
            s = s.branches[-1][1]
        else:
            s = resolve(s)


def _resolver(named):
    def resolve(s):
        from .syntax import SchemaRef

        if isinstance(s, SchemaRef):
            if named is None or s.name not in named:
                raise KernelError(f"unknown schema {s.name}")
            return named[s.name]
        return s

    return resolve


def instantiate(schema, sigma: Mapping[str, int], named: Optional[Mapping] = None, bound: Optional[int] = None):
    """A concrete derivation: parameters replaced, cases resolved, closures unrolled, compositions grafted."""
    resolve = _resolver(named)
    limit = recursion_bound() if bound is None else bound

    def go(s, sig):
        s = resolve(s)
        if isinstance(s, SLeaf):
            return instantiate_params(s.derivation.root, sig)
        if isinstance(s, SCompose):
            return compose_proofs(go(s.first, sig), go(s.second, sig))
        if isinstance(s, SCases):
            for cond, sub in s.branches:
                if cond is None or cond.holds(sig):
                    return go(sub, sig)
            raise KernelError("no case applies")
        if isinstance(s, SClosure):
            nu = sig[s.param]
            if nu > limit:
                raise DepthExceeded(f"closure over {s.param} needs {nu} unrollings (bound {limit})")
            body_root = _leaf_derivation(s.body, resolve).root
            v = _closure_leaf_var(body_root, s.param, s.var)
            acc = VarLeaf(ProofVariable(v.name, subst_params_formula(v.type, _num_env({**sig, s.param: 0}))))
            for l in range(1, nu + 1):
                acc = compose_proofs(go(s.body, {**sig, s.param: l}), acc)
            return acc
        raise KernelError(f"not a proof schema: {s!r}")

    return go(schema, dict(sigma))


# ---------------------------------------------------------------- refutation schemata


@dataclass(frozen=True)
class SchemaShape:
    end: object
    open: tuple


def _goal_axioms(goal, sigma: Optional[Mapping[str, int]] = None) -> list:
    """⊢ goal, or its instances at every assignment pointwise below σ (closure steps lower the parameter)."""
    if sigma is None:
        return [Sequent((), (goal,))]
    import itertools

    names = list(sigma)
    out = []
    for vals in itertools.product(*(range(sigma[k] + 1) for k in names)):
        g = subst_params_formula(goal, _num_env(dict(zip(names, vals))))
        out.append(Sequent((), (g,)))
    return out


def _same_var(a: ProofVariable, b: ProofVariable, env: Env) -> bool:
    return a.name == b.name and formulas_equal((a.type,), (b.type,), env)


def is_refutation_schema(schema, goal, psi=None, named: Optional[Mapping] = None) -> list:
    """Violations of the refutation-schema clauses for ⊢ goal; empty means ok."""
    resolve = _resolver(named)
    out: list = []

    def shape(s, ctx: Optional[Condition]) -> Optional[SchemaShape]:
        s = resolve(s)
        if isinstance(s, SLeaf):
            d = s.derivation
            c = d.context.conj(ctx) if d.context is not None else ctx
            vs = check_derivation(d.root, psi, c, axioms=None)
            out.extend(vs)
            out.extend(check_v_rules(d.root))
            for lf in leaves(d.root):
                if isinstance(lf, Axiom) and not _is_goal(lf.sequent, goal, psi, c):
                    out.append(Violation("UndischargedLeaf", f"undischarged leaf {_render(lf.sequent)}"))
            return SchemaShape(d.root.conclusion, tuple(proof_vars(d.root)))
        if isinstance(s, SCompose):
            a, b = shape(s.first, ctx), shape(s.second, ctx)
            if a is None or b is None:
                return None
            env = Env(psi, ctx)
            if not isinstance(a.end, ProofVariable):
                out.append(Violation("NotComposable", "left schema does not end in a proof variable"))
                return None
            hits = [v for v in b.open if _same_var(v, a.end, env)]
            if isinstance(b.end, ProofVariable) and not b.open and _same_var(b.end, a.end, env):
                return SchemaShape(a.end, a.open)
            if len(hits) != 1:
                out.append(Violation("NotComposable", f"{a.end.name} is not a unique leaf of the right schema"))
                return None
            rest = tuple(v for v in b.open if v is not hits[0])
            if set(rest) & set(a.open):
                out.append(Violation("NotVRegular", "composition repeats a proof variable"))
            return SchemaShape(b.end, a.open + rest)
        if isinstance(s, SClosure):
            c = Condition(((s.param, False, False),)).conj(ctx)
            b = shape(s.body, c)
            if b is None:
                return None
            if not isinstance(b.end, ProofVariable) or b.end.name != s.var:
                out.append(Violation("NotRecursive", "closure body must end in its proof variable"))
                return None
            end = ProofVariable(s.var, subst_params_formula(b.end.type, {s.param: Num(0)}))
            return SchemaShape(end, b.open)
        if isinstance(s, SCases):
            shapes = []
            for cond, sub in s.branches:
                c = ctx if cond is None else cond.conj(ctx)
                shapes.append(shape(sub, c))
            if any(x is None for x in shapes):
                return None
            return SchemaShape(shapes[0].end, tuple(v for x in shapes for v in x.open))
        out.append(Violation("NotSchema", f"not a proof schema: {s!r}"))
        return None

    top = shape(schema, None)
    if top is not None:
        if not (isinstance(top.end, Sequent) and top.end.is_empty):
            out.append(Violation("NotRefutation", "not empty end-sequent"))
        if top.open:
            names = ", ".join(v.name for v in top.open)
            out.append(Violation("UndischargedLeaf", f"undischarged leaf: proof variable {names}"))
    return out


def _is_goal(s: Sequent, goal, psi, ctx) -> bool:
    return not s.ante and len(s.succ) == 1 and formulas_equal(s.succ, (goal,), Env(psi, ctx))


def _render(x) -> str:
    from .syntax import show

    return show(x)


def check_instances(schema, goal, psi, grid, named: Optional[Mapping] = None) -> list:
    """Per-instantiation check: each instance checks, ends in ⊢ and uses only goal instances at or below σ as axioms."""
    out = []
    for sigma in grid:
        root = instantiate(schema, sigma, named)
        vs = check_derivation(root, psi, None, axioms=_goal_axioms(goal, sigma))
        end = root.conclusion
        if not (isinstance(end, Sequent) and end.is_empty):
            vs.append(Violation("NotRefutation", "not empty end-sequent"))
        out.extend((dict(sigma), v) for v in vs)
    return out
