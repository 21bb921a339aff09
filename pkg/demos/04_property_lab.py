"""
The property lab
================

Generated cases exercise the lemmas behind strong normalisation.  Each
case is seeded by (seed, lemma, index), so any failure can be rerun alone.
"""

import random

from mlfarity import Sig, all_builtins, show
from mlfarity.generate import GenConfig, gen_term, grammar_for, plant
from mlfarity.lemmas import bounded_interp_member
from mlfarity.suite import default_lab, exhaustive_sweep, run_case, run_suite
from mlfarity.surface import parse_arity, parse_arity_context, parse_term

ctx = parse_arity_context("f:(0,0), a:0, b:0")
g = grammar_for(ctx)
print("expressions of size 1..8:", [g.count("term", n) + g.count("kind", n) for n in range(1, 9)])

# uniform generation with a certificate
e, judgement = gen_term(GenConfig(size=9, seed=3, ctx=ctx, target=parse_arity("(0,0)")))
print(show(e), ":", judgement.arity)

# a projection redex planted into a random host
lab = default_lab()
rng = random.Random(1)
host = lab.grammar.sample(rng, "term", None, 6)
planted, pos = plant(lab.grammar, rng, host, Sig("pi1"))
print("planted at", list(pos), ":", show(planted))

# a short run of the suite
report = run_suite(seed=42, cases=50)
print("\n".join(report.lines()))

# one case, replayed
print(run_case(lab, "commute-pi1-beta", 42, 7))

# sampled membership in the interpretation of an arity
omega = parse_term(r"\x:El(z).x x")
for a in ("0", "(0,0)"):
    print(f"omega at {a}:", bounded_interp_member(omega, parse_arity(a)).member)

# every expression up to size 6, explored to the end
sweep = exhaustive_sweep(6)
print(sweep.subjects, "subjects;", len(sweep.fuel_exhausted), "diverge;",
      sweep.divergent_total, "have two normal forms")
