"""Term and formula schemata: evaluation under a parameter assignment."""
from srkernel.formulas import eval_formula
from srkernel.substitution import eval_subst
from srkernel.syntax import parse_formula, parse_term, show
from srkernel.terms import eval_iota
from srkernel.workspace import load_fixture

# a theory with a defined predicate ^p and a defined term symbol ^f
ws = load_fixture("omegaiotao")
p3 = ws.get("p3")
print("schema:     ", show(p3))
print("normal form:", show(eval_formula(p3, {}, ws.psi)))

# the same schema with a free parameter, evaluated at a few points
p_n = parse_formula("^p(X; n)", ws.scope.copy())
for n in range(3):
    print(f"  n={n}:", show(eval_formula(p_n, {"n": n}, ws.psi)))

# iterated term symbol
ws = load_fixture("termschema")
t = parse_term("^f(a; n)", ws.scope.copy())
for n in range(4):
    print(f"^f(a; {n}) =", show(eval_iota(t, {"n": n}, ws.psi.iota)))

# s-substitutions evaluate to first-order substitutions
ws = load_fixture("s_substitution")
theta = ws.get("Theta")
print("Theta       =", show(theta))
print("Theta[2, 1] =", show(eval_subst(theta, {"n1": 2, "n2": 1}, ws.psi.iota)))
