import functools

import pytest

from srkernel.syntax import parse_formula, parse_subst, parse_term
from srkernel.workspace import load_fixture


@functools.lru_cache(maxsize=None)
def fixture(name):
    return load_fixture(name)


def term(ws, text):
    return parse_term(text, ws.scope.copy())


def formula(ws, text):
    return parse_formula(text, ws.scope.copy())


def subst(ws, text):
    return parse_subst(text, ws.scope.copy())


@pytest.fixture
def ws():
    return fixture


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[i])
