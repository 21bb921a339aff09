import pytest
from hypothesis import given, strategies as st

from mlfarity.arity import infer_arity
from mlfarity.generate import Unsatisfiable, grammar_for
from mlfarity.mlf import arity_translate, check_signature
from mlfarity.surface import ParseError, parse_arity_context, parse_term
from mlfarity.signatures import (
    ArityMismatch, NonLinearPattern, RewriteRule, Signature, SignatureError,
    UndeclaredConstant, builtin, builtin_bool, builtin_sigma, builtin_universe,
    finite_type, parse_signature, validate_rule,
)
from mlfarity.syntax import ZERO, App, Const, Var, subst_many

from strategies import LAB_CTX, SIG


def arities(sig):
    return {name: str(a) for name, a in sig.arities.items()}


def test_sigma_constants():
    assert arities(builtin_sigma()) == {
        "Sigma": "(0,((0,0),0))",
        "pair": "(0,((0,0),(0,(0,0))))",
        "pi1": "(0,((0,0),(0,0)))",
        "pi2": "(0,((0,0),(0,0)))",
    }


def test_sigma_rules():
    sig = builtin_sigma()
    names = sig.names()
    r1, r2 = sig.rule("pi1"), sig.rule("pi2")
    assert r1.lhs == parse_term("pi1 A B (pair A B a b)", names) and r1.rhs == Var("a")
    assert r2.lhs == parse_term("pi2 A B (pair A B a b)", names) and r2.rhs == Var("b")
    assert r1.arity == r2.arity == ZERO
    assert r1.context == parse_arity_context("A:0, B:(0,0), a:0, b:0")


def test_universe_constants_and_rule():
    sig = builtin_universe()
    assert arities(sig) == {"U": "0", "Bool": "0", "bool": "0", "uo": "(0,0)"}
    r = sig.rule("u")
    assert (r.lhs, r.rhs, r.arity) == (App(Const("uo"), Const("bool")), Const("Bool"), ZERO)


def test_bool_eliminator():
    sig = builtin_bool()
    assert str(sig.arities["E_Bool"]) == "((0,0),(0,(0,(0,0))))"
    names = sig.names()
    assert sig.rule("b1").lhs == parse_term("E_Bool P p1 p2 true", names)
    assert sig.rule("b1").rhs == Var("p1")
    assert sig.rule("b2").rhs == Var("p2")


def test_declared_kinds_match_arities():
    sig = SIG
    for name, k in sig.kinds.items():
        assert arity_translate(k) == sig.arities[name]
    check_signature(sig)


def test_unit():
    sig = finite_type("Unit", ["star"])
    assert len(sig.rules) == 1
    r = sig.rules[0]
    assert r.lhs == App(App(App(Const("E_Unit"), Var("P")), Var("p1")), Const("star"))
    assert r.rhs == Var("p1")
    assert str(sig.arities["E_Unit"]) == "((0,0),(0,(0,0)))"


def test_three_constructors():
    sig = finite_type("Three", ["c1", "c2", "c3"])
    assert str(sig.arities["E_Three"]) == "((0,0),(0,(0,(0,(0,0)))))"
    assert [r.rhs for r in sig.rules] == [Var("p1"), Var("p2"), Var("p3")]
    check_signature(sig)


def test_duplicate_constructors():
    with pytest.raises(SignatureError):
        finite_type("T", ["c", "c"])
    with pytest.raises(SignatureError):
        finite_type("T", [])


def test_broken_rule_rejected():
    sig = builtin_sigma()
    bad = RewriteRule("bad", parse_arity_context("A:0, B:(0,0), a:0, b:0"),
                      sig.rule("pi1").lhs, Var("B"), ZERO)
    with pytest.raises(ArityMismatch):
        validate_rule(sig, bad)


def test_undeclared_constant():
    ctx = parse_arity_context("x:0")
    with pytest.raises(UndeclaredConstant):
        validate_rule(Signature(), RewriteRule("r", ctx, App(Const("h"), Var("x")), Var("x"), ZERO))


def test_linearity_is_optional():
    sig = builtin_sigma()
    validate_rule(sig, sig.rule("pi1"))
    with pytest.raises(NonLinearPattern):
        validate_rule(sig, sig.rule("pi1"), require_linear=True)


def test_nonlinear_match_needs_equal_arguments():
    r = builtin_sigma().rule("pi1")
    names = SIG.names()
    assert r.match(parse_term("pi1 A B (pair A B a b)", names)) is not None
    assert r.match(parse_term("pi1 A B (pair C B a b)", names)) is None


def test_merge():
    assert builtin("bool").merge(builtin("universe")).arities["Bool"] == ZERO
    with pytest.raises(SignatureError):
        builtin("sigma").merge(parse_signature("const pair : arity 0 ;"))
    with pytest.raises(SignatureError):
        builtin("nope")


def test_signature_file():
    sig = parse_signature("""
        const N : arity 0 kind Type ;
        const zero : arity 0 kind N ;
        const id : arity (0,0) kind (x:N)N ;
        rule idz [] id zero --> zero : 0 ;
        finite Two = yes | no ;
    """)
    assert set(sig.arities) >= {"N", "zero", "id", "Two", "yes", "no", "E_Two"}
    assert len(sig.rules) == 3
    check_signature(sig)
    with pytest.raises(ParseError, match="arity"):
        parse_signature("const g : arity (0,0) ; rule [x:0] g x --> g : 0 ;")


@given(st.sampled_from(SIG.rules), st.randoms(use_true_random=False))
def test_instances_preserve_arity(rule, rnd):
    g = grammar_for(LAB_CTX, SIG)
    binding = {}
    for x, a in rule.context.entries:
        try:
            binding[x] = g.sample(rnd, "term", a, 6)
        except Unsatisfiable:
            return
    lhs, rhs = subst_many(rule.lhs, binding), subst_many(rule.rhs, binding)
    assert infer_arity(LAB_CTX, lhs, SIG) == infer_arity(LAB_CTX, rhs, SIG) == rule.arity
    assert rule.contract(lhs) == rhs


@given(st.lists(st.sampled_from("abcdefgh"), min_size=1, max_size=6, unique=True))
def test_finite_types_validate(cs):
    sig = finite_type("T", [f"k{c}" for c in cs])
    for r in sig.rules:
        validate_rule(sig, r)
    assert len(sig.rules) == len(cs)
