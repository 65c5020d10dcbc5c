import pytest

from srkernel.cli import run_cli
from srkernel.workspace import fixture_path


def fx(name):
    return str(fixture_path(name))


def run(capsys, *argv):
    code = run_cli(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_phat_with_theory(capsys):
    code, out, _ = run(capsys, "eval", "phat(X;3)", "--theory", "fixtures/omegaiotao.sr")
    assert code == 0
    assert out.strip() == r"Q(f(f(X[2])), Y[2]) \/ Q(f(X[1]), Y[1]) \/ Q(X[0], Y[0]) \/ ~P(X[0])"


def test_eval_numeral(capsys):
    assert run(capsys, "eval", "s(s(0))")[:2] == (0, "2\n")


def test_unify_prints_unifier(capsys):
    code, out, _ = run(capsys, "unify", "fixtures/ual_example.sr")
    assert code == 0
    assert out.strip() == "{u <- ^f(x, y; n, m), z <- ^g(v; n)}"


def test_unify_uniform_lists_states(capsys):
    code, out, _ = run(capsys, "unify", fx("uniform"))
    assert code == 0
    assert out.strip().splitlines()[0] == "n=0: {X1[0] <- X2[0]}"
    assert len(out.strip().splitlines()) == 3


def test_unify_failure_exits_one(capsys):
    code, out, _ = run(capsys, "unify", fx("standard_unification"), "Tocc")
    assert code == 1


@pytest.mark.parametrize("name", ["unifalg1", "unifalg2", "unifalg3"])
def test_unifalg_bottom(capsys, name):
    assert run(capsys, "unify", fx(name))[0] == 1


def test_verify_grid(capsys):
    code, out, _ = run(capsys, "verify", "fixtures/ex_proofschema.sr", "--n", "0..5", "--m", "0..3")
    assert code == 0
    assert out.strip().endswith("24/24 grid points unsatisfiable")


def test_verify_needs_range(capsys):
    assert run(capsys, "verify", fx("ex_proofschema"))[0] == 2


def test_check(capsys):
    code, out, _ = run(capsys, "check", fx("ex_proofschema"))
    assert code == 0
    assert "rho0: ok" in out


def test_herbrand_set(capsys):
    code, out, _ = run(capsys, "herbrand", fx("ex_proofschema"), "--set", "n=1", "--set", "m=0")
    assert code == 0
    assert out.strip().splitlines() == [
        "{X[0] <- Y[0], Z[0] <- a}",
        "{X[1] <- Y[0], Z[0] <- f(a), X[0] <- Y[0]}",
    ]


def test_instantiate_check(capsys):
    code, out, _ = run(capsys, "instantiate", fx("ex_proofschema"), "--set", "n=2", "--set", "m=1", "--check")
    assert code == 0
    assert out.splitlines()[0].endswith("; |-")


def test_bound_exceeded(capsys, monkeypatch):
    monkeypatch.setenv("SR_RECURSION_BOUND", "100")
    code, _, err = run(capsys, "--bound", "2", "instantiate", fx("ex_proofschema"), "--set", "n=5", "--set", "m=0")
    assert code == 1
    assert "depth exceeded" in err


def test_subst_eval(capsys):
    code, out, _ = run(capsys, "subst", fx("s_substitution"), "Theta", "--set", "n1=1", "--set", "n2=2")
    assert code == 0
    assert out.strip() == "{u <- h(g(g(x2, h(x1)), h(x1))), v <- h(g(x1, x2))}"


def test_tree_format(capsys):
    code, out, _ = run(capsys, "eval", "^f(a;1)", "--theory", fx("termschema"), "--format", "tree")
    assert code == 0
    assert out.splitlines()[0] == "App fn='f'"


def test_print_round_trips(capsys, tmp_path):
    code, out, _ = run(capsys, "print", fx("ex_proofschema"))
    assert code == 0
    p = tmp_path / "again.sr"
    p.write_text(out)
    assert run(capsys, "print", str(p))[1] == out


def test_bad_flag(capsys):
    assert run(capsys, "unify", fx("uniform"), "--nope")[0] == 2


def test_parse_error(capsys, tmp_path):
    p = tmp_path / "bad.sr"
    p.write_text("params n;\nterm t = f(;\n")
    code, _, err = run(capsys, "print", str(p))
    assert code == 2
    assert err.startswith("syntax error: 2:")


def test_missing_file(capsys):
    assert run(capsys, "check", "no/such/file.sr")[0] == 2
