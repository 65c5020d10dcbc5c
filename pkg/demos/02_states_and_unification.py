"""States, state-wise application and schematic unification."""
from srkernel.substitution import ap, compose, state_of
from srkernel.syntax import show, show_casemap
from srkernel.unification import BOTTOM, unify_standard
from srkernel.workspace import load_fixture

ws = load_fixture("appl_viota2")
theta = ws.get("Theta1")
print("Theta1 =", show(theta))

# application splits on the nine states of (n, m)
print(show_casemap(ap(theta, ws.get("x_nm"), params=["n", "m"])))

# on X[s(n), s(m)] nothing applies in any state
print(show_casemap(ap(theta, ws.get("x_snsm"), params=["n", "m"]), merged=True))

# composition is state-wise too; pick the state of one assignment
comp = compose(theta, ws.get("Theta2"), params=["n", "m", "k"], theory=ws.psi.iota)
print("at n=m=k=0:", show(comp.at_sigma({"n": 0, "m": 0, "k": 0})))

# syntactic unification with defined symbols kept opaque
ws = load_fixture("ual_example")
print("unifier:", show(unify_standard(ws.get("T")).single))

# parameter-unifiable variable expressions force a case split
ws = load_fixture("uniform")
res = unify_standard(ws.get("T"), params=["n"])
for st, u in res.cases:
    print(" ", show(st), "->", show(u))

# the occurs-check variant fails in the all-zero state
ws = load_fixture("standard_unification")
res = unify_standard(ws.get("Tocc"), params=["n1", "n2"])
print("Tocc at n1=n2=0:", "bottom" if res.at(state_of({"n1": 0, "n2": 0}, ["n1", "n2"])) is BOTTOM else "unifiable")
