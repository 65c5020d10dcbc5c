"""Concrete syntax: tokenizer, recursive-descent parser and printers."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .formulas import And, Atom, DerivedSymbol, Formula, FormulaVar, HatAtom, Not, Or
from .substitution import C1, C2, C3, CaseMap, Condition, FOSubstitution, SSubstitution, State
from .terms import (
    App,
    Const,
    HatApp,
    KernelError,
    Num,
    NumApp,
    Param,
    Pred,
    Succ,
    VarExpr,
    VariableClass,
    is_first_order,
    pred,
    succ,
)


class SrSyntaxError(KernelError):
    """A positioned syntax error."""

    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        self.line, self.col, self.expected, self.found = line, col, expected, found
        msg = f"{line}:{col}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


# ---------------------------------------------------------------- tokens

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<hat>\^[^\W\d][\w']*(?:@[0-9a-f]+)?)
  | (?P<int>\d+)
  | (?P<ident>[^\W\d][\w']*)
  | (?P<op>\|-|<-|/\\|\\/|!=|\.\.|[()\[\]{},;:=~&<])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise SrSyntaxError(line, pos - line_start + 1, "a token", src[pos])
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            out.append(Token(kind, text, line, pos - line_start + 1))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


# ---------------------------------------------------------------- statements


@dataclass(frozen=True)
class ParamsDecl:
    names: tuple


@dataclass(frozen=True)
class ClassDecl:
    classes: tuple


@dataclass(frozen=True)
class VarDecl:
    names: tuple


@dataclass(frozen=True)
class NumDefEq:
    symbol: str
    args: tuple
    body: object


@dataclass(frozen=True)
class DefEq:
    """A defining equation of a term symbol (kind 'term') or predicate (kind 'pred')."""

    kind: str
    symbol: str
    iargs: tuple
    nargs: tuple
    body: object


@dataclass(frozen=True)
class OrderDecl:
    chain: tuple


@dataclass(frozen=True)
class MainDecl:
    symbol: str


@dataclass(frozen=True)
class LetDecl:
    """A named object: kind is term, formula, subst, terms, sequent or sigma."""

    kind: str
    name: str
    value: object


@dataclass(frozen=True)
class DerivationDecl:
    name: str
    context: Optional[Condition]
    root: object


@dataclass(frozen=True)
class SchemaDecl:
    name: str
    expr: object


@dataclass(frozen=True)
class GoalDecl:
    atom: HatAtom


@dataclass(frozen=True)
class SchemaRef:
    name: str


@dataclass(frozen=True)
class SourceFile:
    statements: tuple = ()


# ---------------------------------------------------------------- scope


@dataclass
class Scope:
    params: set = field(default_factory=set)
    classes: dict = field(default_factory=dict)
    vars: set = field(default_factory=set)
    preds: set = field(default_factory=set)
    numfns: set = field(default_factory=set)

    def copy(self) -> "Scope":
        return Scope(set(self.params), dict(self.classes), set(self.vars), set(self.preds), set(self.numfns))


# ---------------------------------------------------------------- parser


class Parser:
    def __init__(self, src: str, scope: Optional[Scope] = None):
        self.toks = tokenize(src)
        self.i = 0
        self.scope = scope if scope is not None else Scope()

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, expected: str):
        t = self.tok
        raise SrSyntaxError(t.line, t.col, expected, t.text or "end of input")

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "ident")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(repr(text))
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.error("an identifier")
        t = self.tok
        self.i += 1
        return t.text

    def hat(self) -> str:
        if self.tok.kind != "hat":
            self.error("a defined symbol '^name'")
        t = self.tok
        self.i += 1
        return t.text[1:]

    def done(self):
        if self.tok.kind != "eof":
            self.error("end of input")

    def comma_list(self, item, close: str) -> list:
        out = []
        if self.at(close):
            return out
        out.append(item())
        while self.accept(","):
            out.append(item())
        return out

    # -- numeric terms

    def num(self):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return Num(int(t.text))
        name = self.ident()
        if name in ("s", "p") and self.at("("):
            self.expect("(")
            a = self.num()
            self.expect(")")
            return succ(a) if name == "s" else _pred_num(a)
        if self.at("("):
            self.expect("(")
            args = self.comma_list(self.num, ")")
            self.expect(")")
            return NumApp(name, tuple(args))
        return Param(name)

    # -- individual terms

    def varclass(self, name: str, indices: list) -> VariableClass:
        c = self.scope.classes.get(name)
        if c is not None:
            return c
        params = []
        for r in indices:
            inner = r
            while isinstance(inner, (Succ, Pred)):
                inner = inner.arg
            if not isinstance(inner, Param):
                self.error(f"a declaration of class {name}")
            params.append(inner.name)
        c = VariableClass(name, tuple(params))
        return c

    def term(self):
        t = self.tok
        if t.kind == "hat":
            fn = self.hat()
            self.expect("(")
            iargs = [] if self.at(";") else self.comma_list(self.term, ";")
            self.expect(";")
            nargs = self.comma_list(self.num, ")")
            self.expect(")")
            return HatApp(fn, tuple(iargs), tuple(nargs))
        name = self.ident()
        if self.at("["):
            self.expect("[")
            idx = self.comma_list(self.num, "]")
            self.expect("]")
            return VarExpr(self.varclass(name, idx), tuple(idx))
        if self.at("("):
            self.expect("(")
            args = self.comma_list(self.term, ")")
            self.expect(")")
            return App(name, tuple(args))
        if name in self.scope.vars:
            return VarExpr(VariableClass(name), ())
        c = self.scope.classes.get(name)
        if c is not None and c.arity == 0:
            return VarExpr(c, ())
        return Const(name)

    # -- formulas

    def formula(self):
        left = self.conjunction()
        if self.accept("\\/"):
            return Or(left, self.formula())
        return left

    def conjunction(self):
        left = self.unary()
        if self.accept("/\\"):
            return And(left, self.conjunction())
        return left

    def unary(self):
        if self.accept("~"):
            return Not(self.unary())
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        t = self.tok
        if t.kind == "hat":
            return self.hat_atom()
        name = self.ident()
        if name in ("ξ", "xi") and not self.at("("):
            return FormulaVar("ξ")
        if self.accept("("):
            args = self.comma_list(self.term, ")")
            self.expect(")")
            return Atom(name, tuple(args))
        return Atom(name, ())

    def hat_atom(self) -> HatAtom:
        t = self.tok
        text = self.hat()
        sym = text
        if "@" in text:
            raise SrSyntaxError(t.line, t.col, "a declared predicate symbol", t.text)
        self.expect("(")
        classes = []
        if not self.at(";"):
            for name in self.comma_list(self.ident, ";"):
                c = self.scope.classes.get(name)
                if c is None:
                    raise SrSyntaxError(t.line, t.col, f"a declared variable class {name}")
                classes.append(c)
        self.expect(";")
        nargs = self.comma_list(self.num, ")")
        self.expect(")")
        return HatAtom(sym, tuple(classes), tuple(nargs))

    # -- substitutions, sequents, conditions

    def subst(self) -> SSubstitution:
        self.expect("{")
        pairs = []

        def binding():
            lhs = self.term()
            if not isinstance(lhs, VarExpr):
                self.error("a variable expression")
            self.expect("<-")
            return (lhs, self.term())

        pairs = self.comma_list(binding, "}")
        self.expect("}")
        return _mk_subst(pairs)

    def formulas_until(self, stops) -> list:
        out = []
        if self.tok.text in stops or self.tok.kind == "eof":
            return out
        out.append(self.formula())
        while self.accept(","):
            out.append(self.formula())
        return out

    def sequent(self):
        from .calculus import Sequent

        ante = self.formulas_until({"|-"})
        self.expect("|-")
        line = self.toks[self.i - 1].line
        succ_ = []
        if self.tok.kind != "eof" and self.tok.text not in (";",) and self.tok.line == line:
            succ_ = self.formulas_until({";"})
        return Sequent(tuple(ante), tuple(succ_))

    def cond_atom(self):
        name = self.ident()
        on_pred = False
        if name == "p" and self.at("("):
            self.expect("(")
            name = self.ident()
            self.expect(")")
            on_pred = True
        if self.accept("="):
            zero = True
        elif self.accept("!="):
            zero = False
        else:
            self.error("'=' or '!='")
        t = self.tok
        if t.kind != "int" or t.text != "0":
            self.error("0")
        self.i += 1
        return (name, on_pred, zero)

    def condition(self) -> Condition:
        atoms = [self.cond_atom()]
        while self.accept("&"):
            atoms.append(self.cond_atom())
        return Condition(tuple(atoms))

    def sigma(self) -> dict:
        out = {}

        def one():
            n = self.ident()
            self.expect("=")
            t = self.tok
            if t.kind != "int":
                self.error("a natural number")
            self.i += 1
            out[n] = int(t.text)

        one()
        while self.accept(","):
            one()
        return out

    def proof_var(self):
        from .calculus import ProofVariable

        name = self.ident()
        self.expect(":")
        return ProofVariable(name, self.hat_atom())

    # -- derivations

    def derivation_block(self, base_col: int):
        """Parse indented node lines until 'end'."""
        lines = []
        while not self.at("end") and self.tok.kind != "eof":
            lines.append(self.node_line())
        self.expect("end")
        if not lines:
            self.error("a derivation node")
        root, rest = self._tree(lines, 0)
        if rest != len(lines):
            t = lines[rest][0]
            raise SrSyntaxError(t.line, t.col, "a single root node")
        return root

    def node_line(self):
        from .calculus import Axiom, VarLeaf

        start = self.tok
        rule = self.ident()
        if rule == "var":
            return (start, "var", None, self.proof_var())
        if rule == "axiom":
            self.expect(";")
            return (start, "axiom", None, self.sequent())
        arg = None
        if self.at("{"):
            arg = self.subst()
        self.expect(";")
        if rule == "VI":
            concl = self.proof_var()
        else:
            concl = self.sequent()
        return (start, rule, arg, concl)

    def _tree(self, lines, k):
        from .calculus import Axiom, Inference, VarLeaf

        start, rule, arg, concl = lines[k]
        col = start.col
        k += 1
        if rule == "var":
            return VarLeaf(concl), k
        if rule == "axiom":
            return Axiom(concl), k
        kids = []
        while k < len(lines) and lines[k][0].col > col:
            if kids and lines[k][0].col != kids_col:
                t = lines[k][0]
                raise SrSyntaxError(t.line, t.col, "consistent indentation")
            kids_col = lines[k][0].col
            node, k = self._tree(lines, k)
            kids.append(node)
        if not kids:
            raise SrSyntaxError(start.line, start.col, f"premises for rule {rule}")
        return Inference(rule, tuple(kids), concl, arg), k

    # -- schema expressions

    def schema_expr(self):
        from .schemata import SCases, SClosure, SCompose

        if self.accept("if"):
            branches = []
            cond = self.condition()
            self.expect("then")
            branches.append((cond, self.schema_expr()))
            self.expect("else")
            rest = self.schema_expr()
            if isinstance(rest, SCases) and rest.chained:
                branches.extend(rest.branches)
            else:
                branches.append((None, rest))
            return SCases(tuple(branches), chained=True)
        name = self.ident()
        if name == "compose" and self.at("("):
            self.expect("(")
            a = self.schema_expr()
            self.expect(",")
            b = self.schema_expr()
            self.expect(")")
            return SCompose(a, b)
        if name == "closure" and self.at("("):
            self.expect("(")
            body = self.schema_expr()
            self.expect(";")
            k = self.ident()
            self.expect(";")
            v = self.ident()
            self.expect(")")
            return SClosure(body, k, v)
        return SchemaRef(name)

    # -- statements

    def statement(self):
        kw = self.tok.text if self.tok.kind == "ident" else None
        if kw == "params":
            self.i += 1
            names = self.comma_list(self.ident, ";")
            self.expect(";")
            self.scope.params.update(names)
            return ParamsDecl(tuple(names))
        if kw == "class":
            self.i += 1

            def one():
                name = self.ident()
                ps = []
                if self.accept("("):
                    ps = self.comma_list(self.ident, ")")
                    self.expect(")")
                c = VariableClass(name, tuple(ps))
                self.scope.classes[name] = c
                return c

            cs = self.comma_list(one, ";")
            self.expect(";")
            return ClassDecl(tuple(cs))
        if kw == "var":
            self.i += 1
            names = self.comma_list(self.ident, ";")
            self.expect(";")
            self.scope.vars.update(names)
            return VarDecl(tuple(names))
        if kw == "defnum":
            self.i += 1
            sym = self.ident()
            self.scope.numfns.add(sym)
            self.expect("(")
            args = self.comma_list(self.num, ")")
            self.expect(")")
            self.expect("=")
            body = self.num()
            self.expect(";")
            return NumDefEq(sym, tuple(args), body)
        if kw in ("def", "defpred"):
            self.i += 1
            return self.definition(force_pred=kw == "defpred")
        if kw == "order":
            self.i += 1
            chain = [self.symbol_name()]
            while self.accept("<"):
                chain.append(self.symbol_name())
            self.expect(";")
            return OrderDecl(tuple(chain))
        if kw == "main":
            self.i += 1
            s = self.symbol_name()
            self.expect(";")
            return MainDecl(s)
        if kw == "goal":
            self.i += 1
            a = self.hat_atom()
            self.expect(";")
            return GoalDecl(a)
        if kw in ("term", "formula", "subst", "terms", "sequent", "sigma"):
            self.i += 1
            name = self.ident()
            self.expect("=")
            if kw == "term":
                v = self.term()
            elif kw == "formula":
                v = self.formula()
            elif kw == "subst":
                v = self.subst()
            elif kw == "terms":
                v = tuple(self.comma_list(self.term, ";"))
            elif kw == "sequent":
                v = self.sequent()
            else:
                v = self.sigma()
            self.expect(";")
            return LetDecl(kw, name, v)
        if kw == "derivation":
            start = self.tok
            self.i += 1
            name = self.ident()
            ctx = None
            if self.accept("context"):
                ctx = self.condition()
            self.expect(":")
            root = self.derivation_block(start.col)
            return DerivationDecl(name, ctx, root)
        if kw == "schema":
            self.i += 1
            name = self.ident()
            self.expect("=")
            e = self.schema_expr()
            self.expect(";")
            return SchemaDecl(name, e)
        self.error("a statement")

    def symbol_name(self) -> str:
        if self.tok.kind == "hat":
            return "^" + self.hat()
        return self.ident()

    def definition(self, force_pred: bool):
        t = self.tok
        sym = self.hat()
        self.expect("(")
        raw = [] if self.at(";") else self.comma_list(self.ident, ";")
        self.expect(";")
        nargs = self.comma_list(self.num, ")")
        self.expect(")")
        self.expect("=")
        is_pred = force_pred or sym in self.scope.preds or any(
            self.scope.classes.get(n) is not None and self.scope.classes[n].arity > 0 for n in raw
        )
        saved = self.scope
        local = saved.copy()
        for r in nargs:
            for p in _num_param_names(r):
                local.params.add(p)
        self.scope = local
        try:
            if is_pred:
                saved.preds.add(sym)
                local.preds.add(sym)
                classes = []
                for n in raw:
                    c = local.classes.get(n)
                    if c is None:
                        raise SrSyntaxError(t.line, t.col, f"a declared variable class {n}")
                    classes.append(c)
                body = self.formula()
                iargs = tuple(classes)
                kind = "pred"
            else:
                local.vars.update(raw)
                iargs = tuple(VarExpr(VariableClass(n), ()) for n in raw)
                body = self.term()
                kind = "term"
        finally:
            self.scope = saved
        self.expect(";")
        return DefEq(kind, sym, iargs, tuple(nargs), body)

    def source(self) -> SourceFile:
        out = []
        while self.tok.kind != "eof":
            out.append(self.statement())
        return SourceFile(tuple(out))


def _num_param_names(r) -> list:
    from .terms import num_params

    return num_params(r)


def _pred_num(a):
    return pred(a) if isinstance(a, Num) else Pred(a)


def _mk_subst(pairs) -> SSubstitution:
    if pairs and all(l.is_variable and is_first_order(r) for l, r in pairs):
        return FOSubstitution(pairs)
    return SSubstitution(pairs)


# ---------------------------------------------------------------- entry points


def parse(source: str) -> SourceFile:
    """Parse a source text into its statement list."""
    return Parser(source).source()


def _entry(method: str, text: str, scope: Optional[Scope]):
    p = Parser(text, scope.copy() if scope is not None else None)
    out = getattr(p, method)()
    p.done()
    return out


def parse_num(text: str, scope: Optional[Scope] = None):
    return _entry("num", text, scope)


def parse_term(text: str, scope: Optional[Scope] = None):
    return _entry("term", text, scope)


def parse_formula(text: str, scope: Optional[Scope] = None):
    return _entry("formula", text, scope)


def parse_subst(text: str, scope: Optional[Scope] = None) -> SSubstitution:
    return _entry("subst", text, scope)


def parse_sequent(text: str, scope: Optional[Scope] = None):
    return _entry("sequent", text, scope)


def parse_condition(text: str, scope: Optional[Scope] = None) -> Condition:
    return _entry("condition", text, scope)


# ---------------------------------------------------------------- ASCII printer


def show_num(r) -> str:
    if isinstance(r, Num):
        return str(r.value)
    if isinstance(r, Param):
        return r.name
    if isinstance(r, Succ):
        return f"s({show_num(r.arg)})"
    if isinstance(r, Pred):
        return f"p({show_num(r.arg)})"
    return f"{r.symbol}({', '.join(show_num(a) for a in r.args)})"


def show_term(t) -> str:
    if isinstance(t, Const):
        return t.name
    if isinstance(t, VarExpr):
        if t.cls.arity == 0:
            return t.cls.name
        return f"{t.cls.name}[{', '.join(show_num(i) for i in t.indices)}]"
    if isinstance(t, App):
        return f"{t.fn}({', '.join(show_term(a) for a in t.args)})"
    left = ", ".join(show_term(a) for a in t.iargs)
    right = ", ".join(show_num(n) for n in t.nargs)
    return f"^{t.fn}({left}; {right})" if left else f"^{t.fn}(; {right})"


def _symbol_name(sym) -> str:
    return sym if isinstance(sym, str) else sym.name


def show_formula(f, prec: int = 0) -> str:
    if isinstance(f, FormulaVar):
        return "xi"
    if isinstance(f, Atom):
        if not f.args:
            return f.pred
        return f"{f.pred}({', '.join(show_term(a) for a in f.args)})"
    if isinstance(f, HatAtom):
        left = ", ".join(c.name for c in f.classes)
        right = ", ".join(show_num(n) for n in f.nargs)
        return f"^{_symbol_name(f.pred)}({left}; {right})" if left else f"^{_symbol_name(f.pred)}(; {right})"
    if isinstance(f, Not):
        return "~" + show_formula(f.arg, 3)
    if isinstance(f, And):
        s = f"{show_formula(f.left, 3)} /\\ {show_formula(f.right, 2)}"
        return f"({s})" if prec > 2 else s
    s = f"{show_formula(f.left, 2)} \\/ {show_formula(f.right, 1)}"
    return f"({s})" if prec > 1 else s


def show_subst(theta) -> str:
    return "{" + ", ".join(f"{show_term(l)} <- {show_term(r)}" for l, r in theta.bindings) + "}"


def show_sequent(s) -> str:
    left = ", ".join(show_formula(f) for f in s.ante)
    right = ", ".join(show_formula(f) for f in s.succ)
    return " ".join(x for x in (left, "|-", right) if x)


def show_condition(c: Condition) -> str:
    parts = []
    for n, on_pred, zero in c.atoms:
        t = f"p({n})" if on_pred else n
        parts.append(f"{t}{'=' if zero else '!='}0")
    return " & ".join(parts)


def show_state(st: State) -> str:
    if not st.cases:
        return "true"
    return show_condition(st.as_condition())


def show_proof_var(v) -> str:
    return f"{v.name}:{show_formula(v.type)}"


def show(x) -> str:
    """ASCII rendering that the parser reads back."""
    from .calculus import ProofVariable, Sequent

    if isinstance(x, (Num, Succ, Pred, Param, NumApp)):
        return show_num(x)
    if isinstance(x, (Const, VarExpr, App, HatApp)):
        return show_term(x)
    if isinstance(x, Formula):
        return show_formula(x)
    if isinstance(x, SSubstitution):
        return show_subst(x)
    if isinstance(x, Sequent):
        return show_sequent(x)
    if isinstance(x, State):
        return show_state(x)
    if isinstance(x, Condition):
        return show_condition(x)
    if isinstance(x, ProofVariable):
        return show_proof_var(x)
    if isinstance(x, CaseMap):
        return show_casemap(x)
    return str(x)


def show_casemap(cm: CaseMap, merged: bool = False, render=None) -> str:
    render = render or show
    lines = []
    if merged:
        groups = cm.merged()
        if len(groups) == 1:
            return "all states: " + render(groups[0][1])
        for states, v in groups:
            lines.append(" | ".join(f"({show_state(s)})" for s in states) + ": " + render(v))
    else:
        for st, v in cm.entries:
            lines.append(f"{show_state(st)}: {render(v)}")
    return "\n".join(lines)


# ---------------------------------------------------------------- unicode printer

_MACRON = "̄"
_HAT = "̂"


def pretty_num(r) -> str:
    if isinstance(r, Num):
        return f"{r.value}{_MACRON}"
    if isinstance(r, Param):
        return r.name
    if isinstance(r, Succ):
        return f"s({pretty_num(r.arg)})"
    if isinstance(r, Pred):
        return f"p({pretty_num(r.arg)})"
    return f"{r.symbol}({','.join(pretty_num(a) for a in r.args)})"


def pretty_term(t) -> str:
    if isinstance(t, Const):
        return t.name
    if isinstance(t, VarExpr):
        if t.cls.arity == 0:
            return t.cls.name
        return f"{t.cls.name}({','.join(pretty_num(i) for i in t.indices)})"
    if isinstance(t, App):
        return f"{t.fn}({','.join(pretty_term(a) for a in t.args)})"
    args = [pretty_term(a) for a in t.iargs] + [pretty_num(n) for n in t.nargs]
    return f"{t.fn}{_HAT}({','.join(args)})"


def pretty_formula(f, prec: int = 0) -> str:
    if isinstance(f, FormulaVar):
        return "ξ"
    if isinstance(f, Atom):
        if not f.args:
            return f.pred
        return f"{f.pred}({','.join(pretty_term(a) for a in f.args)})"
    if isinstance(f, HatAtom):
        args = [c.name for c in f.classes] + [pretty_num(n) for n in f.nargs]
        return f"{_symbol_name(f.pred)}{_HAT}({','.join(args)})"
    if isinstance(f, Not):
        return "¬" + pretty_formula(f.arg, 3)
    if isinstance(f, And):
        s = f"{pretty_formula(f.left, 3)} ∧ {pretty_formula(f.right, 2)}"
        return f"({s})" if prec > 2 else s
    s = f"{pretty_formula(f.left, 2)} ∨ {pretty_formula(f.right, 1)}"
    return f"({s})" if prec > 1 else s


def pretty(x) -> str:
    """Mathematical rendering with numerals as k̄ and hatted symbols."""
    from .calculus import ProofVariable, Sequent

    if isinstance(x, (Num, Succ, Pred, Param, NumApp)):
        return pretty_num(x)
    if isinstance(x, (Const, VarExpr, App, HatApp)):
        return pretty_term(x)
    if isinstance(x, Formula):
        return pretty_formula(x)
    if isinstance(x, SSubstitution):
        return "{" + ", ".join(f"{pretty_term(l)} ← {pretty_term(r)}" for l, r in x.bindings) + "}"
    if isinstance(x, Sequent):
        left = ", ".join(pretty_formula(f) for f in x.ante)
        right = ", ".join(pretty_formula(f) for f in x.succ)
        return " ".join(s for s in (left, "⊢", right) if s)
    if isinstance(x, ProofVariable):
        return f"{x.name}:{pretty_formula(x.type)}"
    return show(x)


# ---------------------------------------------------------------- source printer


def _show_def_head(d: DefEq) -> str:
    if d.kind == "pred":
        left = ", ".join(c.name for c in d.iargs)
    else:
        left = ", ".join(v.cls.name for v in d.iargs)
    right = ", ".join(show_num(n) for n in d.nargs)
    return f"^{d.symbol}({left}; {right})" if left else f"^{d.symbol}(; {right})"


def _show_node(node, indent: int, out: list):
    from .calculus import Axiom, Inference, ProofVariable, VarLeaf

    pad = "  " * indent
    if isinstance(node, VarLeaf):
        out.append(f"{pad}var {show_proof_var(node.var)}")
        return
    if isinstance(node, Axiom):
        out.append(f"{pad}axiom ; {show_sequent(node.sequent)}")
        return
    arg = f" {show_subst(node.subst)}" if node.subst is not None else ""
    concl = show_proof_var(node.conclusion) if isinstance(node.conclusion, ProofVariable) else show_sequent(node.conclusion)
    out.append(f"{pad}{node.rule}{arg} ; {concl}")
    for p in node.premises:
        _show_node(p, indent + 1, out)


def show_derivation(root, indent: int = 1) -> str:
    out: list = []
    _show_node(root, indent, out)
    return "\n".join(out)


def show_schema_expr(e) -> str:
    from .schemata import SCases, SClosure, SCompose, SLeaf

    if isinstance(e, SchemaRef):
        return e.name
    if isinstance(e, SCompose):
        return f"compose({show_schema_expr(e.first)}, {show_schema_expr(e.second)})"
    if isinstance(e, SClosure):
        return f"closure({show_schema_expr(e.body)}; {e.param}; {e.var})"
    if isinstance(e, SCases):
        parts = []
        for cond, sub in e.branches:
            if cond is None:
                parts.append(show_schema_expr(sub))
            else:
                parts.append(f"if {show_condition(cond)} then {show_schema_expr(sub)} else")
        return " ".join(parts)
    if isinstance(e, SLeaf):
        return e.name or "<derivation>"
    raise KernelError(f"cannot print schema {e!r}")


def show_statement(s) -> str:
    if isinstance(s, ParamsDecl):
        return f"params {', '.join(s.names)};"
    if isinstance(s, ClassDecl):
        parts = [c.name + (f"({', '.join(c.params)})" if c.params else "") for c in s.classes]
        return f"class {', '.join(parts)};"
    if isinstance(s, VarDecl):
        return f"var {', '.join(s.names)};"
    if isinstance(s, NumDefEq):
        return f"defnum {s.symbol}({', '.join(show_num(a) for a in s.args)}) = {show_num(s.body)};"
    if isinstance(s, DefEq):
        body = show_formula(s.body) if s.kind == "pred" else show_term(s.body)
        kw = "defpred" if s.kind == "pred" and not any(c.arity > 0 for c in s.iargs) else "def"
        return f"{kw} {_show_def_head(s)} = {body};"
    if isinstance(s, OrderDecl):
        return f"order {' < '.join(s.chain)};"
    if isinstance(s, MainDecl):
        return f"main {s.symbol};"
    if isinstance(s, GoalDecl):
        return f"goal {show_formula(s.atom)};"
    if isinstance(s, LetDecl):
        v = s.value
        if s.kind == "term":
            body = show_term(v)
        elif s.kind == "formula":
            body = show_formula(v)
        elif s.kind == "subst":
            body = show_subst(v)
        elif s.kind == "terms":
            body = ", ".join(show_term(t) for t in v)
        elif s.kind == "sequent":
            body = show_sequent(v)
        else:
            body = ", ".join(f"{k}={x}" for k, x in v.items())
        return f"{s.kind} {s.name} = {body};"
    if isinstance(s, DerivationDecl):
        ctx = f" context {show_condition(s.context)}" if s.context is not None else ""
        return f"derivation {s.name}{ctx}:\n{show_derivation(s.root)}\nend"
    if isinstance(s, SchemaDecl):
        return f"schema {s.name} = {show_schema_expr(s.expr)};"
    raise KernelError(f"cannot print statement {s!r}")


def show_source(sf: SourceFile) -> str:
    return "\n".join(show_statement(s) for s in sf.statements) + "\n"
