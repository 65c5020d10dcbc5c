"""Quantifier-free schematic formulas, theories of defined predicates, evaluation and unfolding."""
from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union

from .substitution import (
    FOSubstitution,
    SSubstitution,
    State,
    apply_syntactic,
    eval_subst,
    psi_num,
    psi_subst,
    psi_term,
)
from .terms import (
    HatApp,
    IotaTerm,
    Pred,
    Succ,
    KernelError,
    Num,
    NumTerm,
    OmegaIotaTheory,
    Param,
    UndeclaredSymbol,
    VarExpr,
    VariableClass,
    _IotaEvaluator,
    is_first_order,
    _TheoryBase,
    _as_num,
    _iota_of,
    _num_value,
    lower_bound,
    map_num_term,
    normalize_ground_hats,
    num_params,
    num_symbols,
    rename_classes_term,
    simplify_num,
    subst_num,
    subterms,
    term_numterms,
    term_params,
    varexprs,
)


class NotUnfoldable(KernelError):
    pass


class Formula:
    """Base class of formula schemata."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class FormulaVar(Formula):
    name: str = "ξ"


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    pred: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class DerivedSymbol:
    """The predicate p̂(Θ)|_p, or p̂(σ) for a first-order σ when state is None."""

    base: Union[str, "DerivedSymbol"]
    theta: SSubstitution
    state: Optional[State] = None

    @property
    def root(self) -> str:
        b = self.base
        while isinstance(b, DerivedSymbol):
            b = b.base
        return b

    @property
    def name(self) -> str:
        digest = hashlib.sha1(_canonical(self).encode("utf-8")).hexdigest()[:8]
        return f"{self.root}@{digest}"


def _canonical(x) -> str:
    if isinstance(x, DerivedSymbol):
        return f"D({_canonical(x.base)},{_canonical(x.theta)},{x.state!r})"
    if isinstance(x, SSubstitution):
        return "{" + ",".join(sorted(f"{l!r}<-{r!r}" for l, r in x.bindings)) + "}"
    return repr(x)


@dataclass(frozen=True, slots=True)
class HatAtom(Formula):
    """A defined predicate applied to variable classes and numeric arguments."""

    pred: Union[str, DerivedSymbol]
    classes: tuple
    nargs: tuple

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "nargs", tuple(_as_num(n) for n in self.nargs))

    @property
    def root(self) -> str:
        return self.pred if isinstance(self.pred, str) else self.pred.root


def disj(*fs: Formula) -> Formula:
    """Right-nested disjunction."""
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def conj(*fs: Formula) -> Formula:
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


# ---------------------------------------------------------------- traversal helpers


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        x = stack.pop()
        yield x
        if isinstance(x, Not):
            stack.append(x.arg)
        elif isinstance(x, (And, Or)):
            stack.append(x.right)
            stack.append(x.left)


def formula_terms(f: Formula) -> Iterator[IotaTerm]:
    for x in subformulas(f):
        if isinstance(x, Atom):
            yield from x.args


def formula_numterms(f: Formula) -> Iterator[NumTerm]:
    for x in subformulas(f):
        if isinstance(x, Atom):
            for t in x.args:
                yield from term_numterms(t)
        elif isinstance(x, HatAtom):
            yield from x.nargs
            sym = x.pred
            while isinstance(sym, DerivedSymbol):
                for l, r in sym.theta.bindings:
                    yield from term_numterms(l)
                    yield from term_numterms(r)
                sym = sym.base


def formula_params(f: Formula) -> list[str]:
    out: list[str] = []
    for r in formula_numterms(f):
        for p in num_params(r):
            if p not in out:
                out.append(p)
    return out


def formula_varexprs(f: Formula) -> list[VarExpr]:
    out: list[VarExpr] = []
    for t in formula_terms(f):
        for v in varexprs(t):
            if v not in out:
                out.append(v)
    return out


def hat_atoms(f: Formula) -> list[HatAtom]:
    return [x for x in subformulas(f) if isinstance(x, HatAtom)]


def map_formula(f: Formula, term_fn, num_fn, hat_fn=None) -> Formula:
    """Rebuild f, mapping atom terms with term_fn and hat-atom numerals with num_fn."""
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(term_fn(t) for t in f.args))
    if isinstance(f, Not):
        return Not(map_formula(f.arg, term_fn, num_fn, hat_fn))
    if isinstance(f, And):
        return And(map_formula(f.left, term_fn, num_fn, hat_fn), map_formula(f.right, term_fn, num_fn, hat_fn))
    if isinstance(f, Or):
        return Or(map_formula(f.left, term_fn, num_fn, hat_fn), map_formula(f.right, term_fn, num_fn, hat_fn))
    if isinstance(f, HatAtom):
        if hat_fn is not None:
            return hat_fn(f)
        return HatAtom(f.pred, f.classes, tuple(num_fn(n) for n in f.nargs))
    return f


def map_num_formula(f: Formula, fn) -> Formula:
    """Apply fn to every numeric term, including those inside derived symbols."""

    def hat(h: HatAtom) -> HatAtom:
        return HatAtom(_map_num_symbol(h.pred, fn), h.classes, tuple(fn(n) for n in h.nargs))

    return map_formula(f, lambda t: map_num_term(t, fn), fn, hat)


def _map_num_symbol(sym, fn):
    if isinstance(sym, str):
        return sym
    theta = sym.theta.map(lambda t: map_num_term(t, fn))
    if isinstance(sym.theta, FOSubstitution):
        theta = FOSubstitution(theta.bindings)
    return DerivedSymbol(_map_num_symbol(sym.base, fn), theta, sym.state)


def subst_params_formula(f: Formula, env: Mapping[str, NumTerm], bounds=None) -> Formula:
    return map_num_formula(f, lambda r: simplify_num(subst_num(r, env), None, bounds))


def normalize_formula(f: Formula, bounds=None) -> Formula:
    """Fold numerals and apply what the bounds determine."""
    return map_num_formula(f, lambda r: simplify_num(r, None, bounds))


def psi_formula(p: State, f: Formula) -> Formula:
    if not p.fixed():
        return f
    return map_formula(f, lambda t: psi_term(p, t), lambda r: psi_num(p, r))


def rename_classes_formula(f: Formula, ren: Mapping[str, VariableClass]) -> Formula:
    def hat(h: HatAtom) -> HatAtom:
        return HatAtom(h.pred, tuple(ren.get(c.name, c) for c in h.classes), h.nargs)

    return map_formula(f, lambda t: rename_classes_term(t, ren), lambda r: r, hat)


def formula_class_names(f: Formula, psi=None) -> set[str]:
    """Names of variable classes that may occur in the evaluation of f."""
    out: set[str] = {v.cls.name for v in formula_varexprs(f)}
    for h in hat_atoms(f):
        out |= reachable_classes(h, psi)
    return out


def reachable_classes(h: HatAtom, psi=None) -> set[str]:
    out = {c.name for c in h.classes}
    if psi is not None:
        out |= psi.symbol_globals(h.pred)
    return out


def is_pl0(f: Formula) -> bool:
    """No defined predicates, no parameters, only first-order terms."""
    for x in subformulas(f):
        if isinstance(x, (HatAtom, FormulaVar)):
            return False
    return not formula_params(f) and all(_fo_term(t) for t in formula_terms(f))


def _fo_term(t: IotaTerm) -> bool:
    return is_first_order(t)


# ---------------------------------------------------------------- theories of predicates


@dataclass(frozen=True)
class PredDef:
    """Defining equations of p̂(X1..Xi; n1..nj).

    Recursive definitions recurse on the last numeric parameter and the step
    body contains the recursive call p̂(X1..Xi; n1..nj) verbatim (the ξ position).
    """

    name: str
    classes: tuple
    params: tuple
    base: Optional[Formula] = None
    step: Optional[Formula] = None
    body: Optional[Formula] = None

    @property
    def recursive(self) -> bool:
        return self.body is None

    def bodies(self) -> list:
        return [b for b in (self.base, self.step, self.body) if b is not None]

    def rec_call(self, classes: Mapping[str, VariableClass]) -> HatAtom:
        return HatAtom(self.name, tuple(classes[c] for c in self.classes), tuple(Param(n) for n in self.params))


@dataclass(frozen=True, eq=False)
class OmegaIotaOTheory(_TheoryBase):
    """Defined predicates over an omega-iota theory, plus the derived-symbol registry."""

    defs: dict = field(default_factory=dict)
    iota: OmegaIotaTheory = field(default_factory=OmegaIotaTheory)
    order: Optional[frozenset] = None
    main: Optional[str] = None
    formal_classes: dict = field(default_factory=dict)  # pred -> {name: VariableClass}
    _registry: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _globals: dict = field(default_factory=dict, repr=False)

    @property
    def omega(self):
        return self.iota.omega

    def _deps(self, d: PredDef) -> set:
        out = set()
        for b in d.bodies():
            out |= {h.root for h in hat_atoms(b)}
        return out

    def violations(self) -> list[str]:
        out = [f"term: {v}" for v in self.iota.violations()]
        out += self._order_violations("predicate")
        for name, d in self.defs.items():
            if d.recursive and (d.base is None or d.step is None or not d.params):
                out.append(f"definition of {name} needs a base and a step equation")
                continue
            for b in d.bodies():
                if any(isinstance(x, FormulaVar) for x in subformulas(b)):
                    out.append(f"definition of {name} contains a free formula variable")
                for t in formula_terms(b):
                    for x in subterms(t):
                        if isinstance(x, HatApp) and x.fn not in self.iota.defs:
                            out.append(f"undeclared term symbol {x.fn} in definition of {name}")
                for r in formula_numterms(b):
                    for sym in num_symbols(r):
                        if sym not in self.omega.defs:
                            out.append(f"undeclared numeric symbol {sym} in definition of {name}")
            if d.recursive:
                rec = d.rec_call(self.formal_classes.get(name, {}))
                if any(h.root == name for h in hat_atoms(d.base)):
                    out.append(f"FV(q̂_B) = ∅ violated: base of {name} contains the recursive call")
                if not set(formula_params(d.base)) <= set(d.params[:-1]):
                    out.append(f"base of {name} uses its recursion parameter")
                if not set(formula_params(d.step)) <= set(d.params):
                    out.append(f"step of {name} uses parameters outside its formals")
                calls = [h for h in hat_atoms(d.step) if h.root == name]
                if len(calls) != 1 or calls[0] != rec:
                    out.append(f"step of {name} must contain the recursive call {name} exactly once")
            else:
                if any(h.root == name for h in hat_atoms(d.body)):
                    out.append(f"explicit definition of {name} is recursive")
                if not set(formula_params(d.body)) <= set(d.params):
                    out.append(f"body of {name} uses parameters outside its formals")
        return out

    # -- derived symbols

    def register(self, sym: DerivedSymbol) -> DerivedSymbol:
        key = sym.name
        with self._lock:
            known = self._registry.get(key)
            if known is None:
                self._registry[key] = sym
                return sym
        return known

    def lookup(self, name: str) -> DerivedSymbol:
        return self._registry[name]

    def symbol_globals(self, sym) -> set[str]:
        """Class names a symbol's unfoldings may mention beyond its arguments."""
        if isinstance(sym, DerivedSymbol):
            out = set(self.symbol_globals(sym.base))
            for l, r in sym.theta.bindings:
                out.add(l.cls.name)
                out |= {v.cls.name for v in varexprs(r)}
            return out
        hit = self._globals.get(sym)
        if hit is not None:
            return hit
        d = self.defs.get(sym)
        if d is None:
            raise UndeclaredSymbol(sym)
        self._globals[sym] = set()  # cycle guard
        out: set[str] = set()
        for b in d.bodies():
            out |= {v.cls.name for v in formula_varexprs(b)}
            for h in hat_atoms(b):
                out |= {c.name for c in h.classes}
                if h.root != sym:
                    out |= self.symbol_globals(h.pred)
        out -= set(d.classes)
        self._globals[sym] = out
        return out


def validate_psi(psi: OmegaIotaOTheory) -> list[str]:
    return psi.violations()


def _pred_def(psi: OmegaIotaOTheory, name: str) -> PredDef:
    d = psi.defs.get(name) if psi is not None else None
    if d is None:
        raise UndeclaredSymbol(name)
    return d


def derived_predicate(psi: OmegaIotaOTheory, pred, theta: SSubstitution, state: Optional[State]):
    """The symbol p̂(Θ)|_p; the empty substitution yields p̂ itself."""
    if not theta:
        return pred
    return psi.register(DerivedSymbol(pred, theta, state))


# ---------------------------------------------------------------- unfolding


def _instantiate_body(body: Formula, d: PredDef, atom: HatAtom, nenv: Mapping[str, NumTerm], bounds) -> Formula:
    ren = dict(zip(d.classes, atom.classes))
    f = rename_classes_formula(body, ren)
    return subst_params_formula(f, nenv, bounds)


def unfold(atom: HatAtom, psi: OmegaIotaOTheory, bounds=None) -> Formula:
    """One-step unfolding of a defined atom (base, step or explicit body)."""
    if isinstance(atom.pred, DerivedSymbol):
        sym = atom.pred
        inner = unfold(HatAtom(sym.base, atom.classes, atom.nargs), psi, bounds)
        if sym.state is None:
            return apply_fo_formula(sym.theta, inner, psi)
        return ap_formula_at(sym.theta, inner, sym.state, psi)
    d = _pred_def(psi, atom.pred)
    if len(atom.classes) != len(d.classes) or len(atom.nargs) != len(d.params):
        raise KernelError(f"arity mismatch in application of {atom.pred}")
    nargs = [simplify_num(r, None, bounds) for r in atom.nargs]
    if not d.recursive:
        return _instantiate_body(d.body, d, atom, dict(zip(d.params, nargs)), bounds)
    env = dict(zip(d.params[:-1], nargs[:-1]))
    last = nargs[-1]
    if last == Num(0):
        return _instantiate_body(d.base, d, atom, env, bounds)
    if isinstance(last, Num):
        env[d.params[-1]] = Num(last.value - 1)
    elif isinstance(last, Succ):
        env[d.params[-1]] = last.arg
    elif lower_bound(last, bounds) >= 1:
        env[d.params[-1]] = simplify_num(Pred(last), None, bounds)
    else:
        raise NotUnfoldable(f"last argument of {atom.pred} is neither 0 nor a successor")
    return _instantiate_body(d.step, d, atom, env, bounds)


def unfold_step(atom: HatAtom, psi: OmegaIotaOTheory) -> Formula:
    """Unfold an atom whose last numeric argument is syntactically 0 or s(·)."""
    return unfold(atom, psi)


def unfold_kind(atom: HatAtom, psi: OmegaIotaOTheory, bounds=None) -> Optional[str]:
    """'B', 'S' or 'D' according to which defining equation unfold would use."""
    root_atom = atom
    while isinstance(root_atom.pred, DerivedSymbol):
        root_atom = HatAtom(root_atom.pred.base, root_atom.classes, root_atom.nargs)
    d = _pred_def(psi, root_atom.pred)
    if not d.recursive:
        return "D"
    last = simplify_num(atom.nargs[-1], None, bounds)
    if last == Num(0):
        return "B"
    if lower_bound(last, bounds) >= 1:
        return "S"
    return None


# ---------------------------------------------------------------- evaluation


class _FormulaEvaluator:
    def __init__(self, psi: OmegaIotaOTheory, sigma: Mapping[str, int]):
        self.psi = psi
        self.iota = _iota_of(psi)
        self.terms = _IotaEvaluator(self.iota, strict=True)
        self.sigma = dict(sigma)
        self.memo: dict = {}

    def num(self, r: NumTerm, env) -> int:
        return _num_value(r, env, self.iota.omega, None)

    def formula(self, f: Formula, env, ren=None, rec=None) -> Formula:
        if isinstance(f, Atom):
            args = []
            for t in f.args:
                if ren:
                    t = rename_classes_term(t, ren)
                args.append(self.terms.term(t, env))
            return Atom(f.pred, tuple(args))
        if isinstance(f, Not):
            return Not(self.formula(f.arg, env, ren, rec))
        if isinstance(f, And):
            return And(self.formula(f.left, env, ren, rec), self.formula(f.right, env, ren, rec))
        if isinstance(f, Or):
            return Or(self.formula(f.left, env, ren, rec), self.formula(f.right, env, ren, rec))
        if isinstance(f, HatAtom):
            if rec is not None and f.pred == rec[0]:
                return rec[1]
            classes = tuple(ren.get(c.name, c) for c in f.classes) if ren else f.classes
            return self.hat(f.pred, classes, tuple(self.num(r, env) for r in f.nargs))
        raise KernelError("cannot evaluate a formula variable")

    def hat(self, pred, classes: tuple, nvals: tuple) -> Formula:
        key = (pred, classes, nvals)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if isinstance(pred, DerivedSymbol):
            base = self.hat(pred.base, classes, nvals)
            th = pred.theta if pred.state is None else psi_subst(pred.state, pred.theta)
            theta = eval_subst(th, self.sigma, self.iota)
            out = apply_fo_formula(theta, base, self.psi)
        else:
            d = _pred_def(self.psi, pred)
            if len(classes) != len(d.classes) or len(nvals) != len(d.params):
                raise KernelError(f"arity mismatch in application of {pred}")
            ren = dict(zip(d.classes, classes))
            if not d.recursive:
                out = self.formula(d.body, dict(zip(d.params, nvals)), ren)
            else:
                env = dict(zip(d.params[:-1], nvals[:-1]))
                out = self.formula(d.base, env, ren)
                y = d.params[-1]
                for j in range(nvals[-1]):
                    env[y] = j
                    out = self.formula(d.step, env, ren, (pred, out))
        self.memo[key] = out
        return out


def eval_formula(f: Formula, sigma: Mapping[str, int], psi: Optional[OmegaIotaOTheory] = None) -> Formula:
    """Normalize a formula schema under σ to a PL0 formula."""
    if psi is not None:
        psi.checked()
    return _FormulaEvaluator(psi, sigma).formula(f, dict(sigma))


# ---------------------------------------------------------------- substitution on formulas


def apply_fo_formula(sigma: SSubstitution, f: Formula, psi: Optional[OmegaIotaOTheory] = None) -> Formula:
    """Apply a first-order substitution; defined atoms it may touch become derived atoms."""
    if not sigma:
        return f
    dom = sigma.classes()

    def hat(h: HatAtom) -> HatAtom:
        if psi is not None and not (dom & reachable_classes(h, psi)):
            return h
        sym = DerivedSymbol(h.pred, sigma, None)
        if psi is not None:
            sym = psi.register(sym)
        return HatAtom(sym, h.classes, h.nargs)

    return map_formula(f, lambda t: apply_syntactic(sigma, t), lambda r: r, hat)


def ap_formula_at(theta: SSubstitution, f: Formula, p: State, psi: Optional[OmegaIotaOTheory] = None, theory=None) -> Formula:
    """Ap(Θ, F)|_p."""
    th = psi_subst(p, theta)
    dom = theta.classes()
    iota = theory if theory is not None else None

    def term(t: IotaTerm) -> IotaTerm:
        out = apply_syntactic(th, psi_term(p, t))
        return normalize_ground_hats(out, iota) if iota is not None else out

    def hat(h: HatAtom) -> HatAtom:
        nargs = tuple(psi_num(p, r) for r in h.nargs)
        if psi is not None and not (dom & reachable_classes(h, psi)):
            return HatAtom(h.pred, h.classes, nargs)
        sym = DerivedSymbol(h.pred, theta, p)
        if psi is not None:
            sym = psi.register(sym)
        return HatAtom(sym, h.classes, nargs)

    return map_formula(f, term, lambda r: r, hat)
