"""
Reduction and strong normalisation
==================================

Every expression with an arity has a finite reduction graph.  The
explorer walks the whole graph, so "terminates" here means every path.
"""

from mlfarity import RuleSet, all_builtins, normalize, parse_term, show, sn_explore

sig = all_builtins()
rules = RuleSet(sig=sig)
names = sig.names()

# signature rules fire like beta
for text in ("pi1 A B (pair A B a b)", "E_Bool P p1 p2 false", "uo bool"):
    nf, trace = normalize(parse_term(text, names), rules)
    print(f"{text}  ~>  {show(nf)}")

# a full trace
_, trace = normalize(parse_term(r"(\x:Type.(\y:Type.y) x) a"), rules)
print("\n".join(trace.lines()))

# the whole graph of a small term
r = sn_explore(parse_term(r"(\f:(x:Type)Type.f ((\y:Type.y) a)) (\z:Type.z)"), rules)
print(f"nodes {r.nodes}, longest path {r.longest_path}, normal forms",
      [show(t) for t in r.normal_forms])

# without an arity, reduction can run forever
omega2 = parse_term(r"(\x:El(z).x x) (\x:El(z).x x)")
r = sn_explore(omega2, rules, fuel=50)
print("omega omega: cyclic", r.cyclic, "fuel exhausted", r.fuel_exhausted)

# normal forms need not be unique: eta and beta disagree on the annotation
r = sn_explore(parse_term(r"\x:Type.(\y:El(a).pair) x", names), rules)
print("two normal forms:", [show(t) for t in r.normal_forms])
