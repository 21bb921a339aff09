"""
Kinds, conversion and the arity bridge
======================================

The typechecker works with full kinds.  Translating a kind to its arity
and checking the term's arity directly must always agree.
"""

from mlfarity import (
    TypeContext, TypingError, all_builtins, arity_translate, infer_type, parse_term,
    parse_type_context, show, theorem2_bridge,
)


def context(text, sig=None, active=None):
    sig = sig or all_builtins()
    return TypeContext(tuple(parse_type_context(text, sig.names())), sig, active)


gamma = context("assume A : Type;")
res = infer_type(gamma, parse_term(r"\x:El(A).x"))
print("identity :", show(res.kind), " arity", arity_translate(res.kind))

# the arity check is coarser than typing: f b has arity 0 but no kind
gamma = context("assume A : Type; assume B : Type; assume C : Type;"
                "assume f : (x:El(A))El(C); assume b : El(B);")
try:
    infer_type(gamma, parse_term("f b"))
except TypingError as exc:
    print("f b :", exc)

# conversion sees through signature rules only when they are active
projection_ctx = ("assume A : Type; assume B : (x:El(A))Type; assume C : Type;"
          "assume a : El(A); assume b : El(B a); assume f : (x:El(B a))El(C);"
          "assume y : El(B (pi1 A B (pair A B a b)));")
for active in (set(), {"pi1"}):
    g = context(projection_ctx, active=active)
    try:
        print(f"f y with rules {sorted(active)} :", show(infer_type(g, parse_term("f y")).kind))
    except TypingError as exc:
        print(f"f y with rules {sorted(active)} : rejected ({exc.reason})")

# bridge: typing result and arity agree
sig = all_builtins()
g = context("assume A : Type; assume B : (x:El(A))Type; assume a : El(A); assume b : El(B a);")
t = parse_term("pi2 A B (pair A B a b)", sig.names())
print(show(t), ":", show(infer_type(g, t).kind), " arity", theorem2_bridge(g, t).arity)
