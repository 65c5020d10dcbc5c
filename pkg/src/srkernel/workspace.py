"""Loading `.sr` sources into theories and named objects."""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .calculus import Derivation
from .formulas import OmegaIotaOTheory, PredDef
from .schemata import SLeaf
from .syntax import (
    ClassDecl,
    DefEq,
    DerivationDecl,
    GoalDecl,
    LetDecl,
    MainDecl,
    NumDefEq,
    OrderDecl,
    ParamsDecl,
    SchemaDecl,
    SchemaRef,
    Scope,
    SourceFile,
    Parser,
)
from .terms import KernelError, Num, NumDef, OmegaIotaTheory, OmegaTheory, Param, Succ, TermDef, TheoryError


@dataclass
class Workspace:
    source: SourceFile
    scope: Scope
    psi: OmegaIotaOTheory
    objects: dict = field(default_factory=dict)  # name -> (kind, value)
    derivations: dict = field(default_factory=dict)
    schemas: dict = field(default_factory=dict)
    goal: Optional[object] = None

    @property
    def theory(self) -> OmegaIotaOTheory:
        return self.psi

    def get(self, name: str, kind: Optional[str] = None):
        if name in self.objects:
            k, v = self.objects[name]
            if kind is not None and k != kind:
                raise KernelError(f"{name} is a {k}, not a {kind}")
            return v
        raise KernelError(f"no object named {name}")

    def of_kind(self, kind: str) -> dict:
        return {n: v for n, (k, v) in self.objects.items() if k == kind}

    def named_schemata(self) -> dict:
        """Schema names and derivation names, both usable as schema references."""
        out = {n: SLeaf(d, n) for n, d in self.derivations.items()}
        out.update(self.schemas)
        return out

    def declared_params(self) -> list:
        return [n for s in self.source.statements if isinstance(s, ParamsDecl) for n in s.names]

    def order_params(self, names) -> list:
        """Names sorted by declaration order; undeclared ones keep their relative order at the end."""
        decl = self.declared_params()
        names = list(dict.fromkeys(names))
        return sorted(names, key=lambda n: (decl.index(n) if n in decl else len(decl), names.index(n)))

    def schema(self, name: Optional[str] = None):
        """A named schema (default: the last one declared) with references resolved."""
        if name is None:
            if not self.schemas:
                raise KernelError("no schema declared")
            name = list(self.schemas)[-1]
        named = self.named_schemata()
        if name not in named:
            raise KernelError(f"no schema named {name}")
        return _resolve_refs(named[name], named)


def _resolve_refs(e, named, seen=()):
    from .schemata import SCases, SClosure, SCompose

    if isinstance(e, SchemaRef):
        if e.name in seen:
            raise KernelError(f"schema {e.name} refers to itself")
        if e.name not in named:
            raise KernelError(f"unknown schema {e.name}")
        return _resolve_refs(named[e.name], named, seen + (e.name,))
    if isinstance(e, SCompose):
        return SCompose(_resolve_refs(e.first, named, seen), _resolve_refs(e.second, named, seen))
    if isinstance(e, SClosure):
        return SClosure(_resolve_refs(e.body, named, seen), e.param, e.var)
    if isinstance(e, SCases):
        return SCases(tuple((c, _resolve_refs(b, named, seen)) for c, b in e.branches), e.chained)
    return e


# ---------------------------------------------------------------- defining equations


def _split_equations(symbol: str, eqs: list):
    """(params, base, step, body) from equations given by (nargs, body)."""
    explicit = [e for e in eqs if all(isinstance(a, Param) for a in e[0])]
    if explicit:
        if len(eqs) != 1:
            raise TheoryError([f"explicit definition of {symbol} has more than one equation"])
        nargs, body = explicit[0]
        return tuple(a.name for a in nargs), None, None, body
    base = step = None
    params = None
    fixed = None
    for nargs, body in eqs:
        *front, last = nargs
        if not all(isinstance(a, Param) for a in front):
            raise TheoryError([f"equation of {symbol} has a non-parameter leading argument"])
        names = tuple(a.name for a in front)
        if fixed is not None and names != fixed:
            raise TheoryError([f"equations of {symbol} disagree on their parameters"])
        fixed = names
        if last == Num(0):
            if base is not None:
                raise TheoryError([f"{symbol} has two base equations"])
            base = body
        elif isinstance(last, Succ) and isinstance(last.arg, Param):
            if step is not None:
                raise TheoryError([f"{symbol} has two step equations"])
            step = body
            params = names + (last.arg.name,)
        else:
            raise TheoryError([f"equation of {symbol} is neither a base nor a step equation"])
    if step is None:
        raise TheoryError([f"definition of {symbol} needs a step equation"])
    if base is None:
        raise TheoryError([f"definition of {symbol} needs a base equation"])
    return params, base, step, None


def build_theory(sf: SourceFile) -> OmegaIotaOTheory:
    """Group defining equations into the three theory layers."""
    nums: dict = {}
    terms: dict = {}
    preds: dict = {}
    term_vars: dict = {}
    pred_classes: dict = {}
    order: list = []
    main = None
    for s in sf.statements:
        if isinstance(s, NumDefEq):
            nums.setdefault(s.symbol, []).append((s.args, s.body))
        elif isinstance(s, DefEq) and s.kind == "term":
            terms.setdefault(s.symbol, []).append((s.nargs, s.body))
            term_vars[s.symbol] = tuple(v.cls.name for v in s.iargs)
        elif isinstance(s, DefEq):
            preds.setdefault(s.symbol, []).append((s.nargs, s.body))
            pred_classes[s.symbol] = s.iargs
        elif isinstance(s, OrderDecl):
            chain = [c.lstrip("^") for c in s.chain]
            order += list(zip(chain, chain[1:]))
        elif isinstance(s, MainDecl):
            main = s.symbol.lstrip("^")
    ndefs = {}
    for sym, eqs in nums.items():
        params, base, step, body = _split_equations(sym, eqs)
        ndefs[sym] = NumDef(sym, params, base, step, body)
    tdefs = {}
    for sym, eqs in terms.items():
        params, base, step, body = _split_equations(sym, eqs)
        tdefs[sym] = TermDef(sym, term_vars[sym], params, base, step, body)
    pdefs = {}
    for sym, eqs in preds.items():
        params, base, step, body = _split_equations(sym, eqs)
        pdefs[sym] = PredDef(sym, tuple(c.name for c in pred_classes[sym]), params, base, step, body)
    frozen = frozenset(order) if order else None
    # main belongs to the layer that defines it
    omega = OmegaTheory(ndefs, _restrict(frozen, ndefs), main if main in ndefs else None)
    iota = OmegaIotaTheory(tdefs, omega, _restrict(frozen, tdefs), main if main in tdefs else None)
    formal = {sym: {c.name: c for c in cs} for sym, cs in pred_classes.items()}
    pmain = main if main in pdefs or not (main in ndefs or main in tdefs) else None
    return OmegaIotaOTheory(pdefs, iota, _restrict(frozen, pdefs), pmain, formal)


def _restrict(order, defs):
    if order is None:
        return None
    return frozenset((a, b) for a, b in order if a in defs and b in defs) or None


# ---------------------------------------------------------------- loading


def load_source(sf: SourceFile, scope: Optional[Scope] = None) -> Workspace:
    ws = Workspace(sf, scope or Scope(), build_theory(sf))
    for s in sf.statements:
        if isinstance(s, LetDecl):
            ws.objects[s.name] = (s.kind, s.value)
        elif isinstance(s, DerivationDecl):
            ws.derivations[s.name] = Derivation(s.root, s.context, s.name)
            ws.objects[s.name] = ("derivation", ws.derivations[s.name])
        elif isinstance(s, SchemaDecl):
            ws.schemas[s.name] = s.expr
            ws.objects[s.name] = ("schema", s.expr)
        elif isinstance(s, GoalDecl):
            ws.goal = s.atom
    return ws


def loads(text: str) -> Workspace:
    p = Parser(text)
    sf = p.source()
    return load_source(sf, p.scope)


def load(path) -> Workspace:
    """Load a source file; a missing fixtures/NAME.sr falls back to the bundled fixture."""
    p = Path(path)
    if not p.exists() and p.parent.name == "fixtures" and fixture_path(p.name).exists():
        p = fixture_path(p.name)
    return loads(p.read_text(encoding="utf-8"))


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture (name with or without the .sr suffix)."""
    if not name.endswith(".sr"):
        name += ".sr"
    return Path(str(resources.files("srkernel") / "fixtures" / name))


def load_fixture(name: str) -> Workspace:
    return load(fixture_path(name))


def fixture_names() -> list:
    d = resources.files("srkernel") / "fixtures"
    return sorted(p.name[:-3] for p in d.iterdir() if p.name.endswith(".sr"))
