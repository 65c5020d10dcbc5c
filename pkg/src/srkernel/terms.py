"""Numeric terms, individual term schemata, their theories and evaluation."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Union


class KernelError(Exception):
    """Base class for all kernel errors."""


class UndeclaredSymbol(KernelError):
    pass


class UnboundParameter(KernelError):
    pass


class NotStandard(KernelError):
    pass


class TheoryError(KernelError):
    """Raised when a theory violates its well-formedness conditions."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DepthExceeded(KernelError):
    pass


DEFAULT_RECURSION_BOUND = 10_000


def recursion_bound() -> int:
    """Unrolling bound, overridable by the SR_RECURSION_BOUND environment variable."""
    raw = os.environ.get("SR_RECURSION_BOUND")
    if raw is None:
        return DEFAULT_RECURSION_BOUND
    try:
        value = int(raw)
    except ValueError:
        raise KernelError(f"SR_RECURSION_BOUND must be an integer, got {raw!r}")
    if value < 0:
        raise KernelError("SR_RECURSION_BOUND must be non-negative")
    return value


# ---------------------------------------------------------------- numeric terms


@dataclass(frozen=True, slots=True)
class Num:
    """A numeral s^value(0). Num(0) is the zero constant."""

    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("numerals are natural numbers")


@dataclass(frozen=True, slots=True)
class Succ:
    arg: "NumTerm"


@dataclass(frozen=True, slots=True)
class Pred:
    arg: "NumTerm"


@dataclass(frozen=True, slots=True)
class Param:
    name: str


@dataclass(frozen=True, slots=True)
class NumApp:
    symbol: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


NumTerm = Union[Num, Succ, Pred, Param, NumApp]
ZERO = Num(0)
ParamAssignment = Mapping[str, int]


def succ(t: NumTerm) -> NumTerm:
    """s(t), folded onto numerals."""
    return Num(t.value + 1) if isinstance(t, Num) else Succ(t)


def pred(t: NumTerm) -> NumTerm:
    """p(t), folded onto numerals and cancelled against s."""
    if isinstance(t, Num):
        return Num(max(t.value - 1, 0))
    if isinstance(t, Succ):
        return t.arg
    return Pred(t)


def num_params(t: NumTerm) -> list[str]:
    """Parameters of t in order of first occurrence."""
    out: list[str] = []
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Param):
            if x.name not in out:
                out.append(x.name)
        elif isinstance(x, (Succ, Pred)):
            stack.append(x.arg)
        elif isinstance(x, NumApp):
            stack.extend(reversed(x.args))
    return out


def num_symbols(t: NumTerm) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, (Succ, Pred)):
            stack.append(x.arg)
        elif isinstance(x, NumApp):
            out.add(x.symbol)
            stack.extend(x.args)
    return out


def subst_num(t: NumTerm, env: Mapping[str, NumTerm]) -> NumTerm:
    """Replace parameters by numeric terms."""
    if isinstance(t, Param):
        return env.get(t.name, t)
    if isinstance(t, Num):
        return t
    if isinstance(t, Succ):
        return Succ(subst_num(t.arg, env))
    if isinstance(t, Pred):
        return Pred(subst_num(t.arg, env))
    return NumApp(t.symbol, tuple(subst_num(a, env) for a in t.args))


Bounds = Mapping[str, tuple]  # name -> (lo, hi or None)


def lower_bound(t: NumTerm, bounds: Optional[Bounds] = None) -> int:
    """A lower bound on the value of t valid for every assignment within bounds."""
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Param):
        return bounds[t.name][0] if bounds and t.name in bounds else 0
    if isinstance(t, Succ):
        return lower_bound(t.arg, bounds) + 1
    if isinstance(t, Pred):
        return max(lower_bound(t.arg, bounds) - 1, 0)
    return 0


def simplify_num(t: NumTerm, theory=None, bounds: Optional[Bounds] = None) -> NumTerm:
    """Fold numerals, cancel s/p where sound, fix parameters pinned by bounds.

    Defined symbols are evaluated only when a theory is given and all arguments
    fold to numerals.
    """
    if isinstance(t, Num):
        return t
    if isinstance(t, Param):
        if bounds and t.name in bounds:
            lo, hi = bounds[t.name]
            if hi is not None and lo == hi:
                return Num(lo)
        return t
    if isinstance(t, Succ):
        a = simplify_num(t.arg, theory, bounds)
        if isinstance(a, Num):
            return Num(a.value + 1)
        if isinstance(a, Pred) and lower_bound(a.arg, bounds) >= 1:
            return a.arg
        return Succ(a)
    if isinstance(t, Pred):
        a = simplify_num(t.arg, theory, bounds)
        if isinstance(a, Num):
            return Num(max(a.value - 1, 0))
        if isinstance(a, Succ):
            return a.arg
        return Pred(a)
    args = tuple(simplify_num(a, theory, bounds) for a in t.args)
    if theory is not None and all(isinstance(a, Num) for a in args):
        return Num(_omega_of(theory).apply(t.symbol, [a.value for a in args]))
    return NumApp(t.symbol, args)


def is_numeral(t: NumTerm) -> bool:
    return isinstance(t, Num)


# ---------------------------------------------------------------- omega theories


@dataclass(frozen=True)
class NumDef:
    """Defining equations of a numeric symbol g(x1..xm, y).

    Recursive definitions give ``base`` (for y = 0) and ``step`` (for y = s(y)),
    where the step body contains the recursive call g(x1..xm, y) verbatim.
    Explicit definitions give ``body`` only.
    """

    name: str
    params: tuple
    base: Optional[NumTerm] = None
    step: Optional[NumTerm] = None
    body: Optional[NumTerm] = None

    @property
    def recursive(self) -> bool:
        return self.body is None

    @property
    def arity(self) -> int:
        return len(self.params)

    def bodies(self) -> list:
        return [b for b in (self.base, self.step, self.body) if b is not None]


def _closure(pairs: Iterable[tuple]) -> frozenset:
    rel = set(pairs)
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for c, d in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return frozenset(rel)


class _TheoryBase:
    """Shared order handling for the three theory layers."""

    defs: dict
    order: Optional[frozenset]
    main: Optional[str]

    def _deps(self, d) -> set:
        raise NotImplementedError

    def effective_order(self) -> frozenset:
        """Declared order, or the transitive dependency order when none is declared."""
        if self.order is not None:
            return _closure(self.order)
        pairs = []
        for name, d in self.defs.items():
            for h in self._deps(d):
                if h != name:
                    pairs.append((h, name))
        return _closure(pairs)

    def _order_violations(self, kind: str) -> list[str]:
        out = []
        order = self.effective_order()
        for a, b in order:
            if a == b:
                out.append(f"order is not irreflexive at {a}")
        if self.main is not None:
            if self.main not in self.defs:
                out.append(f"main symbol {self.main} is not defined")
            for name in self.defs:
                if name != self.main and (name, self.main) not in order:
                    out.append(f"main symbol {self.main} is not maximal: {name} is not below it")
        for name, d in self.defs.items():
            for h in self._deps(d):
                if h == name:
                    continue
                if h not in self.defs and not self._declared_elsewhere(h):
                    out.append(f"undeclared symbol {h} in definition of {name}")
                elif (h, name) not in order:
                    out.append(f"order descent: {h} is not below {name}")
        return out

    def _declared_elsewhere(self, h: str) -> bool:
        return False

    def checked(self):
        """Validate once; raise TheoryError on violations."""
        cached = getattr(self, "_valid", None)
        if cached is None:
            violations = self.violations()
            object.__setattr__(self, "_valid", not violations)
            object.__setattr__(self, "_violations", violations)
            cached = not violations
        if not cached:
            raise TheoryError(self._violations)
        return self


@dataclass(frozen=True, eq=False)
class OmegaTheory(_TheoryBase):
    """Primitive recursive definitions of numeric function symbols."""

    defs: dict = field(default_factory=dict)
    order: Optional[frozenset] = None
    main: Optional[str] = None

    @property
    def omega(self) -> "OmegaTheory":
        return self

    def _deps(self, d: NumDef) -> set:
        out = set()
        for b in d.bodies():
            out |= num_symbols(b)
        return out

    def violations(self) -> list[str]:
        out = self._order_violations("numeric")
        for name, d in self.defs.items():
            formal = set(d.params)
            if d.recursive:
                if d.base is None or d.step is None:
                    out.append(f"definition of {name} needs a base and a step equation")
                    continue
                *xs, y = d.params
                if not set(num_params(d.base)) <= set(xs):
                    out.append(f"base of {name} uses parameters outside {{{', '.join(xs)}}}")
                if not set(num_params(d.step)) <= formal:
                    out.append(f"step of {name} uses parameters outside its formals")
                if name in num_symbols(d.base):
                    out.append(f"base of {name} is recursive")
                rec = NumApp(name, tuple(Param(x) for x in d.params))
                for call in _num_calls(d.step, name):
                    if call != rec:
                        out.append(f"step of {name} calls {name} on non-predecessor arguments")
            else:
                if not set(num_params(d.body)) <= formal:
                    out.append(f"body of {name} uses parameters outside its formals")
                if name in num_symbols(d.body):
                    out.append(f"explicit definition of {name} is recursive")
        return out

    def apply(self, symbol: str, args: list[int]) -> int:
        self.checked()
        d = self.defs.get(symbol)
        if d is None:
            raise UndeclaredSymbol(symbol)
        if len(args) != d.arity:
            raise KernelError(f"{symbol} expects {d.arity} arguments, got {len(args)}")
        if not d.recursive:
            return _num_value(d.body, dict(zip(d.params, args)), self, None)
        *xs, y = d.params
        env = dict(zip(xs, args[:-1]))
        acc = _num_value(d.base, env, self, None)
        for j in range(args[-1]):
            env[y] = j
            acc = _num_value(d.step, env, self, (symbol, acc))
        return acc


def _num_calls(t: NumTerm, name: str) -> Iterator[NumApp]:
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, NumApp):
            if x.symbol == name:
                yield x
            stack.extend(x.args)
        elif isinstance(x, (Succ, Pred)):
            stack.append(x.arg)


def _num_value(t: NumTerm, env: Mapping[str, int], theory, rec) -> int:
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Param):
        try:
            return env[t.name]
        except KeyError:
            raise UnboundParameter(t.name) from None
    if isinstance(t, Succ):
        return _num_value(t.arg, env, theory, rec) + 1
    if isinstance(t, Pred):
        return max(_num_value(t.arg, env, theory, rec) - 1, 0)
    if rec is not None and t.symbol == rec[0]:
        return rec[1]
    if theory is None:
        raise UndeclaredSymbol(t.symbol)
    return theory.apply(t.symbol, [_num_value(a, env, theory, rec) for a in t.args])


EMPTY_OMEGA = OmegaTheory()


def _omega_of(theory) -> OmegaTheory:
    if theory is None:
        return EMPTY_OMEGA
    return theory.omega


def eval_num(t: NumTerm, sigma: ParamAssignment, theory=None) -> Num:
    """Evaluate a numeric term to a numeral under a parameter assignment."""
    return Num(_num_value(t, sigma, _omega_of(theory).checked(), None))


# ---------------------------------------------------------------- individual terms


@dataclass(frozen=True, slots=True)
class VariableClass:
    """A k-ary variable class with its assigned parameter list."""

    name: str
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))

    @property
    def arity(self) -> int:
        return len(self.params)

    def __call__(self, *indices) -> "VarExpr":
        return VarExpr(self, tuple(_as_num(i) for i in indices))


def _as_num(i) -> NumTerm:
    if isinstance(i, int):
        return Num(i)
    if isinstance(i, str):
        return Param(i)
    return i


@dataclass(frozen=True, slots=True)
class Const:
    name: str


@dataclass(frozen=True, slots=True)
class VarExpr:
    cls: VariableClass
    indices: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        if len(self.indices) != self.cls.arity:
            raise KernelError(
                f"class {self.cls.name} has arity {self.cls.arity}, got {len(self.indices)} indices"
            )

    @property
    def is_variable(self) -> bool:
        return all(isinstance(i, Num) for i in self.indices)


@dataclass(frozen=True, slots=True)
class App:
    fn: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True, slots=True)
class HatApp:
    """A defined term symbol applied to individual and numeric arguments."""

    fn: str
    iargs: tuple
    nargs: tuple

    def __post_init__(self):
        object.__setattr__(self, "iargs", tuple(self.iargs))
        object.__setattr__(self, "nargs", tuple(_as_num(n) for n in self.nargs))


IotaTerm = Union[Const, VarExpr, App, HatApp]


def var(name: str) -> VarExpr:
    """A plain first-order variable (arity-0 class)."""
    return VarExpr(VariableClass(name), ())


def is_standard_index(r: NumTerm, n: str, extended: bool = False) -> bool:
    if r == ZERO or r == Param(n) or r == Pred(Param(n)) or r == Succ(Param(n)):
        return True
    return extended and isinstance(r, Num)


def is_standard_varexpr(v: VarExpr, extended: bool = False) -> bool:
    return all(is_standard_index(r, n, extended) for r, n in zip(v.indices, v.cls.params))


def subterms(t: IotaTerm) -> Iterator[IotaTerm]:
    """Pre-order traversal of individual subterms (numeric arguments excluded)."""
    stack = [t]
    while stack:
        x = stack.pop()
        yield x
        if isinstance(x, App):
            stack.extend(reversed(x.args))
        elif isinstance(x, HatApp):
            stack.extend(reversed(x.iargs))


def varexprs(t: IotaTerm) -> list[VarExpr]:
    out: list[VarExpr] = []
    for x in subterms(t):
        if isinstance(x, VarExpr) and x not in out:
            out.append(x)
    return out


def term_numterms(t: IotaTerm) -> Iterator[NumTerm]:
    for x in subterms(t):
        if isinstance(x, VarExpr):
            yield from x.indices
        elif isinstance(x, HatApp):
            yield from x.nargs


def term_params(t: IotaTerm) -> list[str]:
    out: list[str] = []
    for r in term_numterms(t):
        for p in num_params(r):
            if p not in out:
                out.append(p)
    return out


def hat_symbols(t: IotaTerm) -> set[str]:
    return {x.fn for x in subterms(t) if isinstance(x, HatApp)}


def analyze(t: IotaTerm):
    """Return (parameters, variable expressions, standardness) of a term."""
    vs = varexprs(t)
    return set(term_params(t)), set(vs), all(is_standard_varexpr(v) for v in vs)


def map_num_term(t: IotaTerm, f) -> IotaTerm:
    """Apply f to every numeric term inside t."""
    if isinstance(t, Const):
        return t
    if isinstance(t, VarExpr):
        return VarExpr(t.cls, tuple(f(i) for i in t.indices))
    if isinstance(t, App):
        return App(t.fn, tuple(map_num_term(a, f) for a in t.args))
    return HatApp(t.fn, tuple(map_num_term(a, f) for a in t.iargs), tuple(f(n) for n in t.nargs))


def subst_params_term(t: IotaTerm, env: Mapping[str, NumTerm], theory=None, bounds=None) -> IotaTerm:
    return map_num_term(t, lambda r: simplify_num(subst_num(r, env), theory, bounds))


def rename_classes_term(t: IotaTerm, ren: Mapping[str, VariableClass]) -> IotaTerm:
    if isinstance(t, Const):
        return t
    if isinstance(t, VarExpr):
        c = ren.get(t.cls.name)
        return VarExpr(c, t.indices) if c is not None else t
    if isinstance(t, App):
        return App(t.fn, tuple(rename_classes_term(a, ren) for a in t.args))
    return HatApp(t.fn, tuple(rename_classes_term(a, ren) for a in t.iargs), t.nargs)


def occurs_in(v: VarExpr, t: IotaTerm) -> bool:
    return any(x == v for x in subterms(t))


# ---------------------------------------------------------------- omega-iota theories


@dataclass(frozen=True)
class TermDef:
    """Defining equations of a term symbol f̂(x1..xi; n1..nj).

    Recursive definitions recurse on the last numeric parameter; the step body
    contains the recursive call f̂(x1..xi; n1..nj) verbatim.
    """

    name: str
    vars: tuple
    params: tuple
    base: Optional[IotaTerm] = None
    step: Optional[IotaTerm] = None
    body: Optional[IotaTerm] = None

    @property
    def recursive(self) -> bool:
        return self.body is None

    def bodies(self) -> list:
        return [b for b in (self.base, self.step, self.body) if b is not None]

    def rec_call(self) -> HatApp:
        return HatApp(self.name, tuple(var(x) for x in self.vars), tuple(Param(n) for n in self.params))


@dataclass(frozen=True, eq=False)
class OmegaIotaTheory(_TheoryBase):
    """Primitive recursive definitions of term symbols over an omega theory."""

    defs: dict = field(default_factory=dict)
    omega: OmegaTheory = field(default_factory=OmegaTheory)
    order: Optional[frozenset] = None
    main: Optional[str] = None

    @property
    def iota(self) -> "OmegaIotaTheory":
        return self

    def _deps(self, d: TermDef) -> set:
        out = set()
        for b in d.bodies():
            out |= hat_symbols(b)
        return out

    def violations(self) -> list[str]:
        out = [f"numeric: {v}" for v in self.omega.violations()]
        out += self._order_violations("term")
        for name, d in self.defs.items():
            if d.recursive and (d.base is None or d.step is None or not d.params):
                out.append(f"definition of {name} needs a base and a step equation")
                continue
            formal_vars = set(d.vars)
            for b in d.bodies():
                for v in varexprs(b):
                    if v.cls.arity != 0 or v.cls.name not in formal_vars:
                        out.append(f"definition of {name} uses variable {v.cls.name} outside its formals")
                for r in term_numterms(b):
                    for sym in num_symbols(r):
                        if sym not in self.omega.defs:
                            out.append(f"undeclared numeric symbol {sym} in definition of {name}")
            if d.recursive:
                if not set(term_params(d.base)) <= set(d.params[:-1]):
                    out.append(f"base of {name} uses its recursion parameter")
                if name in hat_symbols(d.base):
                    out.append(f"base of {name} is recursive")
                if not set(term_params(d.step)) <= set(d.params):
                    out.append(f"step of {name} uses parameters outside its formals")
                rec = d.rec_call()
                for x in subterms(d.step):
                    if isinstance(x, HatApp) and x.fn == name and x != rec:
                        out.append(f"step of {name} calls {name} on non-predecessor arguments")
            else:
                if name in hat_symbols(d.body):
                    out.append(f"explicit definition of {name} is recursive")
                if not set(term_params(d.body)) <= set(d.params):
                    out.append(f"body of {name} uses parameters outside its formals")
        return out


EMPTY_IOTA = OmegaIotaTheory()


def _iota_of(theory) -> OmegaIotaTheory:
    if theory is None:
        return EMPTY_IOTA
    if isinstance(theory, OmegaTheory):
        return OmegaIotaTheory(omega=theory)
    return theory.iota


def validate_theory(theory) -> list[str]:
    """List the violations of a theory; empty means valid."""
    return theory.violations()


class _IotaEvaluator:
    """Evaluates hat applications iteratively with a per-call memo table."""

    def __init__(self, theory: OmegaIotaTheory, strict: bool):
        self.theory = theory.checked()
        self.omega = theory.omega
        self.strict = strict
        self.memo: dict = {}

    def num(self, r: NumTerm, env: Mapping[str, int]) -> NumTerm:
        if self.strict:
            return Num(_num_value(r, env, self.omega, None))
        return simplify_num(subst_num(r, {k: Num(v) for k, v in env.items()}), self.omega)

    def term(self, t: IotaTerm, env: Mapping[str, int], bindings=None, rec=None) -> IotaTerm:
        if isinstance(t, Const):
            return t
        if isinstance(t, VarExpr):
            if bindings is not None and t.cls.arity == 0 and t.cls.name in bindings:
                return bindings[t.cls.name]
            return VarExpr(t.cls, tuple(self.num(i, env) for i in t.indices))
        if isinstance(t, App):
            return App(t.fn, tuple(self.term(a, env, bindings, rec) for a in t.args))
        if rec is not None and t.fn == rec[0]:
            return rec[1]
        iargs = tuple(self.term(a, env, bindings, rec) for a in t.iargs)
        nargs = tuple(self.num(n, env) for n in t.nargs)
        if all(isinstance(n, Num) for n in nargs):
            return self.hat(t.fn, iargs, tuple(n.value for n in nargs))
        return HatApp(t.fn, iargs, nargs)

    def hat(self, fn: str, iargs: tuple, nvals: tuple) -> IotaTerm:
        key = (fn, iargs, nvals)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        d = self.theory.defs.get(fn)
        if d is None:
            raise UndeclaredSymbol(fn)
        if len(iargs) != len(d.vars) or len(nvals) != len(d.params):
            raise KernelError(f"arity mismatch in application of {fn}")
        bindings = dict(zip(d.vars, iargs))
        if not d.recursive:
            out = self.term(d.body, dict(zip(d.params, nvals)), bindings)
        else:
            env = dict(zip(d.params[:-1], nvals[:-1]))
            out = self.term(d.base, env, bindings)
            y = d.params[-1]
            for j in range(nvals[-1]):
                env[y] = j
                out = self.term(d.step, env, bindings, (fn, out))
        self.memo[key] = out
        return out


def eval_iota(t: IotaTerm, sigma: ParamAssignment, theory=None) -> IotaTerm:
    """Normalize a term schema under σ to a first-order term."""
    return _IotaEvaluator(_iota_of(theory), strict=True).term(t, dict(sigma))


def normalize_ground_hats(t: IotaTerm, theory=None) -> IotaTerm:
    """Evaluate hat applications whose numeric arguments are numerals; keep the rest."""
    return _IotaEvaluator(_iota_of(theory), strict=False).term(t, {})


def is_first_order(t: IotaTerm) -> bool:
    for x in subterms(t):
        if isinstance(x, HatApp):
            return False
        if isinstance(x, VarExpr) and not x.is_variable:
            return False
    return True
