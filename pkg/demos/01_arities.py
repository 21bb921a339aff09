"""
Arities
=======

Arities forget everything about a kind except its shape: a term either
has arity 0 or it takes an argument of one arity and returns another.
"""

from mlfarity import NoArity, infer_arity, parse_arity_context, parse_kind, parse_term
from mlfarity.arity import enumerate_derivations

# f takes something of arity 0; b is of arity 0
ctx = parse_arity_context("A:0, B:0, C:0, f:(0,0), b:0")
print("f b :", infer_arity(ctx, parse_term("f b")))

# kinds get arities too, and a kind application is checked like a term one
print("(x:Type)El(x) :", infer_arity(ctx, parse_kind("(x:Type)El(x)")))
print("((x:Type)El(x)) b :", infer_arity(ctx, parse_kind("((x:Type)El(x)) b")))

# self-application never gets an arity: x would need two different ones
omega = parse_term(r"\x:El(z).x x")
try:
    infer_arity(parse_arity_context("z:0"), omega)
except NoArity as exc:
    print("omega:", exc)

# derivations are unique; the search below tries every rule at every node
for d in enumerate_derivations(ctx, parse_term(r"\y:El(b).f y"), 8):
    print(d.rule, "=>", d.conclusion.arity)
