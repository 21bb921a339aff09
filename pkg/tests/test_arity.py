import random

import pytest
from hypothesis import given, strategies as st

from mlfarity.arity import (
    RULES, NoArity, ctx_valid, enumerate_derivations, has_arity, infer_arity,
)
from mlfarity.surface import parse_arity_context as actx, parse_kind, parse_term
from mlfarity.syntax import ZERO, App, ArityContext, El, Pair, Type, Var, size

from strategies import LAB_CTX, SIG, correct, exprs

CONSTS = SIG.names()


def test_context_validity():
    assert ctx_valid(ArityContext())
    assert ctx_valid(actx("x:0, y:(0,0)"))
    assert not ctx_valid(actx("x:0, x:0"))


def test_application_in_first_context():
    assert infer_arity(actx("A:0,B:0,C:0,f:(0,0),b:0"), parse_term("f b")) == ZERO


def test_application_in_second_context():
    ctx = actx("A:0,B:(0,0),f:(0,(0,0)),x1:0,x2:0,b:0")
    assert infer_arity(ctx, parse_term("f x1 b")) == ZERO


def test_type():
    assert infer_arity(ArityContext(), Type()) == ZERO


def test_omega_has_no_arity():
    with pytest.raises(NoArity) as exc:
        infer_arity(actx("z:0"), parse_term(r"\x:El(z).x x"))
    assert exc.value.position == (1, 0)


def test_el_of_type_has_no_arity():
    with pytest.raises(NoArity):
        infer_arity(ArityContext(), El(Type()))


def test_errors_locate_the_culprit():
    with pytest.raises(NoArity) as exc:
        infer_arity(actx("f:(0,0), g:(0,0)"), parse_term("f g"))
    assert exc.value.position == (1,)
    with pytest.raises(NoArity) as exc:
        infer_arity(ArityContext(), parse_term("q"))
    assert "unbound" in exc.value.reason


def test_constants_use_signature_arities():
    t = parse_term("pi1 A B (pair A B a b)", CONSTS)
    assert infer_arity(actx("A:0, B:(0,0), a:0, b:0"), t, SIG) == ZERO


def test_kind_application_arity():
    k = parse_kind("((x:Type)El(x)) y")
    assert infer_arity(actx("y:0"), k) == ZERO


def test_derivations_of_type():
    ds = enumerate_derivations(ArityContext(), Type(), 5)
    assert len(ds) == 1 and ds[0].conclusion.arity == ZERO


def test_no_derivation_of_self_application():
    assert enumerate_derivations(actx("x:0"), parse_term("x x"), 10) == []


def test_one_derivation_of_application():
    ds = enumerate_derivations(actx("f:(0,0), b:0"), parse_term("f b"), 10)
    assert len(ds) == 1 and ds[0].rule == "App" and ds[0].height() == 2


@given(correct(max_size=7))
def test_uniqueness(pair):
    e, a = pair
    ds = enumerate_derivations(LAB_CTX, e, size(e) + 1, SIG)
    assert {d.conclusion.arity for d in ds} == {a}


@given(correct(max_size=7), st.randoms(use_true_random=False))
def test_rule_order_does_not_matter(pair, rnd):
    e, a = pair
    order = list(RULES)
    rnd.shuffle(order)
    ds = enumerate_derivations(LAB_CTX, e, size(e) + 1, SIG, rule_order=order)
    assert [d.conclusion.arity for d in ds] == [a]


@given(exprs(sort="term"))
def test_self_application_never_has_an_arity(m):
    assert not has_arity(LAB_CTX, App(m, m), SIG)


@given(correct())
def test_weakening(pair):
    e, a = pair
    bigger = LAB_CTX.extend("fresh1", ZERO).extend("fresh2", Pair(ZERO, ZERO))
    assert infer_arity(bigger, e, SIG) == a
