"""A refutation schema, its instances and its Herbrand substitution sets."""
from srkernel.calculus import check_derivation, count_rule
from srkernel.herbrand import extract, instantiate_hs, verify_unsat
from srkernel.schemata import instantiate, is_refutation_schema
from srkernel.syntax import show, show_derivation
from srkernel.workspace import load_fixture

ws = load_fixture("ex_proofschema")
rho0 = ws.schema()
print("goal:", show(ws.goal))
print("refutation schema violations:", is_refutation_schema(rho0, ws.goal, ws.psi))

# unroll the closure at n=2, m=1 and check the concrete derivation
inst = instantiate(rho0, {"n": 2, "m": 1})
print(show_derivation(inst))
print("violations:", check_derivation(inst, ws.psi), "res steps:", count_rule(inst, "res"))

# Herbrand schema and its substitution set at (1, 0)
h = extract(rho0)
hs = instantiate_hs(h, {"n": 1, "m": 0}, ws.psi)
for th in sorted(hs, key=show):
    print("  ", show(th))

# the instance sequents are propositionally unsatisfiable on a grid
ok = all(verify_unsat(ws.goal, h, {"n": n, "m": m}, ws.psi).unsat for n in range(6) for m in range(4))
print("unsat on 0..5 x 0..3:", ok)

# removing one substitution leaves a satisfiable set
drop = next(iter(hs))
res = verify_unsat(ws.goal, h, {"n": 1, "m": 0}, ws.psi, subs=hs - {drop})
print("without", show(drop), "->", "unsat" if res.unsat else "sat")
