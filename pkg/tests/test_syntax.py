import pytest

from srkernel.syntax import (
    SrSyntaxError,
    parse,
    parse_formula,
    parse_subst,
    show,
    show_source,
)
from srkernel.workspace import fixture_names, fixture_path, loads
from conftest import fixture, formula, subst, term


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_round_trip(name):
    sf = parse(fixture_path(name).read_text())
    assert parse(show_source(sf)) == sf


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_loads(name):
    assert fixture(name) is not None


@pytest.mark.parametrize(
    "name,text",
    [
        ("ual_example", "^f(x, y; n, m)"),
        ("ual_example", "f(^g(v; n), ^f(^g(x; n), u; s(n), 0))"),
        ("standard_unification", "g(X[s(n1), 0], Y[n1, n2])"),
    ],
)
def test_term_round_trip(name, text):
    ws = fixture(name)
    t = term(ws, text)
    assert term(ws, show(t)) == t


def test_formula_and_subst_round_trip():
    ws = fixture("omegaiotao")
    f = formula(ws, "^p(X; 3)")
    assert formula(ws, show(f)) == f
    ws = fixture("s_substitution")
    th = ws.get("Theta")
    assert subst(ws, show(th)) == th


def test_numeral_sugar():
    ws = fixture("omegaiotao")
    assert formula(ws, "^p(X; 2)") == formula(ws, "^p(X; s(s(0)))")


@pytest.mark.parametrize(
    "src,line,col",
    [
        ("params n;\nvar x\nterm t = x;\n", 3, 1),
        ("params n;\nterm t = f(x;\n", 2, 13),
        ("params n;\nclass X(n);\nterm t = X[n;\n", 3, 13),
    ],
)
def test_syntax_errors_are_positioned(src, line, col):
    with pytest.raises(SrSyntaxError) as e:
        loads(src)
    assert (e.value.line, e.value.col) == (line, col)


def test_undeclared_variable_rejected():
    with pytest.raises(SrSyntaxError):
        loads("params n;\nsubst T = {w <- a};\n")


def test_unknown_character():
    with pytest.raises(SrSyntaxError):
        parse_formula("P(a) $ Q(a)")


def test_subst_needs_arrow():
    with pytest.raises(SrSyntaxError):
        parse_subst("{x = a}")
