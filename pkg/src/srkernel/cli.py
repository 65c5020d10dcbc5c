"""Command line interface: `sr SUBCOMMAND ...`.

Exit codes: 0 success, 1 logical failure (no unifier, violation, satisfiable), 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import dataclasses
import itertools
import os
import re
import sys
from typing import Optional, Sequence

from .calculus import Derivation, check_derivation
from .formulas import eval_formula
from .herbrand import extract, instantiate_hs, verify_unsat
from .schemata import instantiate, is_refutation_schema
from .substitution import ap, compose, eval_subst, subst_params_list
from .syntax import (
    Parser,
    SrSyntaxError,
    show,
    show_casemap,
    show_derivation,
    show_schema_expr,
    show_subst,
)
from .terms import DepthExceeded, KernelError, eval_iota, eval_num, term_params
from .unification import BOTTOM, unify_standard
from .workspace import Workspace, load, loads

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- argument helpers


def _binding(text: str) -> tuple:
    m = re.fullmatch(r"\s*([^\W\d]\w*)\s*=\s*(\d+)\s*", text)
    if m is None:
        raise argparse.ArgumentTypeError(f"expected NAME=NUMBER, got {text!r}")
    return m.group(1), int(m.group(2))


def _range(text: str) -> range:
    m = re.fullmatch(r"\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?", text)
    if m is None:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}")
    lo = int(m.group(1))
    hi = int(m.group(2)) if m.group(2) is not None else lo
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return range(lo, hi + 1)


def _named_range(text: str) -> tuple:
    name, _, rest = text.partition("=")
    if not name.strip() or not rest:
        raise argparse.ArgumentTypeError(f"expected NAME=A..B, got {text!r}")
    return name.strip(), _range(rest)


_HAT_SUGAR = re.compile(r"(?<![\w^])([^\W\d_][^\W_]*)hat\(")


def desugar(text: str) -> str:
    """Accept `phat(...)` as an alias of `^p(...)`."""
    return _HAT_SUGAR.sub(lambda m: f"^{m.group(1)}(", text)


def _sigma(args) -> dict:
    return dict(args.set or [])


# ---------------------------------------------------------------- tree dump


def tree_dump(x, indent: int = 0) -> str:
    """A stable line-oriented dump of a syntax object."""
    out: list = []
    _dump(x, indent, None, out)
    return "\n".join(out)


def _dump(x, indent, label, out):
    pad = "  " * indent
    head = f"{pad}{label}: " if label else pad
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        fields = [f for f in dataclasses.fields(x) if not f.name.startswith("_") and f.repr]
        atoms = []
        nested = []
        for f in fields:
            v = getattr(x, f.name)
            if isinstance(v, (str, int, bool)) or v is None:
                atoms.append(f"{f.name}={v!r}")
            else:
                nested.append((f.name, v))
        out.append(head + type(x).__name__ + ("" if not atoms else " " + " ".join(atoms)))
        for name, v in nested:
            _dump(v, indent + 1, name, out)
        return
    if isinstance(x, (tuple, list, frozenset, set)):
        items = list(x)
        if isinstance(x, (frozenset, set)):
            items = sorted(items, key=repr)
        out.append(head + f"{type(x).__name__}[{len(items)}]")
        for v in items:
            _dump(v, indent + 1, None, out)
        return
    if isinstance(x, dict):
        out.append(head + f"dict[{len(x)}]")
        for k in sorted(x, key=repr):
            _dump(x[k], indent + 1, repr(k), out)
        return
    if hasattr(x, "bindings"):
        out.append(head + type(x).__name__)
        for l, r in x.bindings:
            _dump((l, r), indent + 1, "binding", out)
        return
    if hasattr(x, "entries") and hasattr(x, "params"):
        out.append(head + f"CaseMap params={list(x.params)!r}")
        for st, v in x.entries:
            _dump(v, indent + 1, show(st), out)
        return
    out.append(head + repr(x))


def _render(args, x, text: Optional[str] = None) -> str:
    if args.format == "tree":
        return tree_dump(x)
    return text if text is not None else show(x)


# ---------------------------------------------------------------- subcommands


def _workspace(path) -> Workspace:
    return load(path)


def _theory_scope(args):
    if args.theory:
        ws = load(args.theory)
        return ws, ws.scope
    return None, None


def cmd_eval(args) -> int:
    ws, scope = _theory_scope(args)
    psi = ws.psi if ws is not None else None
    text = desugar(args.expr)
    sigma = _sigma(args)
    value = None
    for kind in ("formula", "term", "num"):
        p = Parser(text, scope.copy() if scope is not None else None)
        try:
            obj = getattr(p, kind)()
            p.done()
        except SrSyntaxError as e:
            err = e
            continue
        if kind == "formula":
            value = eval_formula(obj, sigma, psi)
        elif kind == "term":
            value = eval_iota(obj, sigma, psi.iota if psi is not None else None)
        else:
            value = eval_num(obj, sigma, psi.omega if psi is not None else None)
        break
    else:
        raise err
    print(_render(args, value))
    return OK


def _pick(ws: Workspace, kind: str, name: Optional[str]):
    if name is not None:
        return ws.get(name, kind)
    objs = ws.of_kind(kind)
    if not objs:
        raise UsageError(f"no {kind} declared")
    return next(iter(objs.values()))


def _term_arg(ws: Workspace, text: str):
    if text in ws.objects:
        return ws.objects[text][1]
    p = Parser(desugar(text), ws.scope.copy())
    for kind in ("formula", "term"):
        p.i = 0
        try:
            obj = getattr(p, kind)()
            p.done()
            return obj
        except SrSyntaxError as e:
            err = e
    raise err


def _eval_any(x, sigma, psi):
    from .formulas import Formula
    from .substitution import SSubstitution

    if isinstance(x, Formula):
        return eval_formula(x, sigma, psi)
    if isinstance(x, SSubstitution):
        return eval_subst(x, sigma, psi.iota)
    return eval_iota(x, sigma, psi.iota)


def _params_for(ws: Workspace, theta, t) -> list:
    from .formulas import Formula, formula_params

    tp = formula_params(t) if isinstance(t, Formula) else term_params(t)
    return ws.order_params(subst_params_list(theta) + list(tp))


def cmd_subst(args) -> int:
    ws = _workspace(args.file)
    theta = _pick(ws, "subst", args.name)
    iota = ws.psi.iota
    if args.apply is not None:
        t = _term_arg(ws, args.apply)
        cm = ap(theta, t, params=_params_for(ws, theta, t), theory=iota, psi=ws.psi)
        if args.set:
            print(_render(args, _eval_any(cm.at_sigma(_sigma(args)), _sigma(args), ws.psi)))
        else:
            print(_render(args, cm, show_casemap(cm, merged=args.merged)))
        return OK
    if args.set is None:
        print(_render(args, theta))
        return OK
    print(_render(args, eval_subst(theta, _sigma(args), iota)))
    return OK


def cmd_compose(args) -> int:
    ws = _workspace(args.file)
    a = ws.get(args.first, "subst")
    b = ws.get(args.second, "subst")
    params = ws.order_params(subst_params_list(a) + subst_params_list(b))
    cm = compose(a, b, params=params, theory=ws.psi.iota)
    if args.set:
        print(_render(args, _eval_any(cm.at_sigma(_sigma(args)), _sigma(args), ws.psi)))
    else:
        print(_render(args, cm, show_casemap(cm, merged=args.merged)))
    return OK


def cmd_unify(args) -> int:
    ws = _workspace(args.file)
    T = _pick(ws, "terms", args.name)
    params = ws.order_params(p for t in T for p in term_params(t))
    res = unify_standard(list(T), params=params)
    if res.cases is None:
        text = "BOT" if res.single is BOTTOM else show(res.single)
        print(_render(args, res.single, text))
    else:
        print(_render(args, res.cases, show_casemap(res.cases, merged=args.merged)))
    return OK if res.unifiable else FAIL


def cmd_check(args) -> int:
    ws = _workspace(args.file)
    psi = ws.psi
    targets = []
    names = [args.name] if args.name else list(ws.derivations) + list(ws.schemas)
    for name in names:
        kind, obj = ws.objects.get(name, (None, None))
        if kind == "derivation":
            targets.append((name, check_derivation(obj, psi)))
        elif kind == "schema":
            if ws.goal is None:
                raise UsageError("schema checking needs a goal declaration")
            targets.append((name, is_refutation_schema(ws.schema(name), ws.goal, psi)))
        else:
            raise UsageError(f"no derivation or schema named {name}")
    bad = 0
    for name, vs in targets:
        if vs:
            bad += 1
            for v in vs:
                print(f"{name}: {v.kind} at {list(v.path)}: {v.message}")
        else:
            print(f"{name}: ok")
    return FAIL if bad else OK


def _schema_name(ws: Workspace, name: Optional[str]) -> Optional[str]:
    if name is None and not ws.schemas:
        raise UsageError("no schema declared")
    return name


def cmd_instantiate(args) -> int:
    ws = _workspace(args.file)
    s = ws.schema(_schema_name(ws, args.name))
    root = instantiate(s, _sigma(args))
    print(_render(args, root, show_derivation(root)))
    if args.check:
        vs = check_derivation(root, ws.psi)
        for v in vs:
            print(f"{v.kind} at {list(v.path)}: {v.message}")
        return FAIL if vs else OK
    return OK


def _show_h(h, indent=0) -> list:
    from .herbrand import HBase, HCases, HClosure, HCompose

    pad = "  " * indent
    if isinstance(h, HBase):
        lines = [f"{pad}base -> {show(h.end)}"]
        for e in h.entries:
            chain = " . ".join(show_subst(t) for t in e.chain) or "id"
            lines.append(f"{pad}  {chain} @ {show(e.target)}")
        return lines
    if isinstance(h, HCompose):
        return [f"{pad}compose"] + _show_h(h.first, indent + 1) + _show_h(h.second, indent + 1)
    if isinstance(h, HClosure):
        return [f"{pad}closure over {h.param} on {h.var.name}"] + _show_h(h.body, indent + 1)
    if isinstance(h, HCases):
        out = [f"{pad}cases"]
        for c, b in h.branches:
            out.append(f"{pad}  {'otherwise' if c is None else show(c)}:")
            out += _show_h(b, indent + 2)
        return out
    return [pad + repr(h)]


def cmd_herbrand(args) -> int:
    ws = _workspace(args.file)
    h = extract(ws.schema(_schema_name(ws, args.name)))
    if not args.set:
        print(_render(args, h, "\n".join(_show_h(h))))
        return OK
    subs = instantiate_hs(h, _sigma(args), ws.psi, literal=args.literal)
    lines = sorted(show(t) for t in subs)
    print(_render(args, subs, "\n".join(lines)))
    return OK


def cmd_verify(args) -> int:
    ws = _workspace(args.file)
    if ws.goal is None:
        raise UsageError("verification needs a goal declaration")
    h = extract(ws.schema(_schema_name(ws, args.name)))
    ranges = dict(args.range or [])
    if args.n is not None:
        ranges["n"] = args.n
    if args.m is not None:
        ranges["m"] = args.m
    if not ranges:
        raise UsageError("give at least one parameter range")
    names = list(ranges)
    bad = 0
    for values in itertools.product(*(ranges[k] for k in names)):
        sigma = dict(zip(names, values))
        res = verify_unsat(ws.goal, h, sigma, ws.psi, literal=args.literal)
        point = ", ".join(f"{k}={v}" for k, v in sigma.items())
        if res.unsat:
            if args.verbose:
                print(f"{point}: unsat")
        else:
            bad += 1
            true_atoms = sorted(show(a) for a, v in (res.model or {}).items() if v)
            print(f"{point}: sat, model true on {{{', '.join(true_atoms)}}}")
    total = 1
    for r in ranges.values():
        total *= len(r)
    print(f"{total - bad}/{total} grid points unsatisfiable")
    return FAIL if bad else OK


def cmd_print(args) -> int:
    from .syntax import show_source

    ws = _workspace(args.file)
    if args.format == "tree":
        print(tree_dump(ws.source))
    else:
        sys.stdout.write(show_source(ws.source))
    return OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="sr", description="Schematic resolution kernel.")
    top.add_argument("--bound", type=int, help="recursion bound (overrides SR_RECURSION_BOUND)")
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--format", choices=("text", "tree"), default="text")
        p.set_defaults(fn=fn)
        return p

    p = add("eval", cmd_eval, "evaluate a numeric term, term or formula")
    p.add_argument("expr")
    p.add_argument("--theory")
    p.add_argument("--set", type=_binding, action="append")

    p = add("subst", cmd_subst, "evaluate or apply a named substitution")
    p.add_argument("file")
    p.add_argument("name", nargs="?")
    p.add_argument("--set", type=_binding, action="append")
    p.add_argument("--apply", metavar="TERM")
    p.add_argument("--merged", action="store_true")

    p = add("compose", cmd_compose, "state-wise composition of two named substitutions")
    p.add_argument("file")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--set", type=_binding, action="append")
    p.add_argument("--merged", action="store_true")

    p = add("unify", cmd_unify, "unify a named term list")
    p.add_argument("file")
    p.add_argument("name", nargs="?")
    p.add_argument("--merged", action="store_true")

    p = add("check", cmd_check, "check derivations and refutation schemata")
    p.add_argument("file")
    p.add_argument("name", nargs="?")

    p = add("instantiate", cmd_instantiate, "instantiate a proof schema")
    p.add_argument("file")
    p.add_argument("name", nargs="?")
    p.add_argument("--set", type=_binding, action="append", required=True)
    p.add_argument("--check", action="store_true")

    p = add("herbrand", cmd_herbrand, "extract a Herbrand schema")
    p.add_argument("file")
    p.add_argument("name", nargs="?")
    p.add_argument("--set", type=_binding, action="append")
    p.add_argument("--literal", action="store_true", help="read composition as Θ1Θ2 ∘ Θ2")

    p = add("verify", cmd_verify, "check Herbrand instances for unsatisfiability on a grid")
    p.add_argument("file")
    p.add_argument("name", nargs="?")
    p.add_argument("--n", type=_range)
    p.add_argument("--m", type=_range)
    p.add_argument("--range", type=_named_range, action="append", metavar="P=A..B")
    p.add_argument("--literal", action="store_true")
    p.add_argument("--verbose", action="store_true")

    p = add("print", cmd_print, "parse and print a source file")
    p.add_argument("file")
    return top


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code not in (0, None) else OK
    if args.bound is not None:
        os.environ["SR_RECURSION_BOUND"] = str(args.bound)
    try:
        return args.fn(args)
    except SrSyntaxError as e:
        print(f"syntax error: {e}", file=sys.stderr)
        return USAGE
    except (UsageError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except DepthExceeded as e:
        print(f"depth exceeded: {e}", file=sys.stderr)
        return FAIL
    except KernelError as e:
        print(f"error: {e}", file=sys.stderr)
        return FAIL


def main() -> None:
    sys.exit(run_cli())
