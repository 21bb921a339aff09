import pytest
from hypothesis import given, strategies as st

from mlfarity.arity import infer_arity
from mlfarity.generate import lab_type_context, well_typed_corpus
from mlfarity.mlf import (
    IllFormedKind, NotMlfGrammar, TypeContext, TypingError, arity_translate,
    arity_translate_ctx, check_kind, check_signature, conv_kind, infer_type,
    theorem2_bridge,
)
from mlfarity.reduction import sn_explore
from mlfarity.signatures import all_builtins, builtin_sigma
from mlfarity.surface import parse_kind, parse_term, parse_type_context
from mlfarity.syntax import App, El, KApp, Pi, Type, Var, lam

SIG = all_builtins()
NAMES = SIG.names()


def ctx(text, sig=SIG, active=None):
    return TypeContext(tuple(parse_type_context(text, sig.names())), sig, active)


def k(text):
    return parse_kind(text, NAMES)


def t(text):
    return parse_term(text, NAMES)


def test_check_kind_examples():
    assert check_kind(ctx(""), Type()) == Type()
    check_kind(ctx("assume A : Type;"), k("(x:El(A))Type"))
    with pytest.raises(NotMlfGrammar):
        check_kind(ctx(""), KApp(Pi(Type(), Type()), Var("y")))


def test_ill_formed_kinds():
    with pytest.raises(IllFormedKind):
        check_kind(ctx(""), El(Type()))
    with pytest.raises(TypingError):
        check_kind(ctx("assume A : Type; assume a : El(A);"), El(Var("a")))
    with pytest.raises(TypingError):
        ctx("assume a : El(A);")
    with pytest.raises(TypingError):
        ctx("assume A : Type; assume A : Type;")


def test_identity():
    res = infer_type(ctx("assume A : Type;"), t(r"\x:El(A).x"))
    assert res.kind == k("(x:El(A))El(A)")


def test_ill_typed_application():
    g = ctx("assume A : Type; assume B : Type; assume C : Type;"
            "assume f : (x:El(A))El(C); assume b : El(B);")
    with pytest.raises(TypingError) as exc:
        infer_type(g, t("f b"))
    assert exc.value.position == (1,)
    # the same term has an arity: arities are coarser than kinds
    assert str(infer_arity(arity_translate_ctx(g), t("f b"))) == "0"


def test_pair():
    g = ctx("assume A : Type; assume B : (x:El(A))Type; assume a : El(A); assume b : El(B a);")
    assert infer_type(g, t("pair A B a b")).kind == k("El(Sigma A B)")


def test_errors():
    g = ctx("assume A : Type; assume a : El(A);")
    for bad, pos in (("q", ()), ("a a", (0,)), (r"\x:El(a).x", (0,))):
        with pytest.raises(TypingError) as exc:
            infer_type(g, t(bad))
        assert exc.value.position == pos


def test_conversion_examples():
    g = ctx("assume A : Type; assume B : (x:El(A))Type; assume a : El(A); assume b : El(B a);")
    assert conv_kind(g, k(r"El((\x:Type.x) A)"), k("El(A)"))
    assert conv_kind(g, k("El(pi1 A B (pair A B a b))"), k("El(a)"))
    assert not conv_kind(ctx("assume A : Type; assume B : Type;"), k("El(A)"), k("El(B)"))
    inactive = ctx("assume A : Type; assume B : (x:El(A))Type; assume a : El(A); assume b : El(B a);",
                   active=set())
    assert not conv_kind(inactive, k("El(pi1 A B (pair A B a b))"), k("El(a)"))


def test_translate():
    assert arity_translate(Type()) == arity_translate(El(Var("M")))
    assert str(arity_translate(Type())) == "0"
    assert str(arity_translate(k("(A:Type)(B:(x:El(A))Type)Type"))) == "(0,((0,0),0))"
    with pytest.raises(NotMlfGrammar):
        arity_translate(KApp(Pi(Type(), Type()), Var("y")))


def test_bridge_examples():
    j = theorem2_bridge(ctx("assume A : Type;"), t(r"\x:El(A).x"))
    assert str(j.arity) == "(0,0)" == str(arity_translate(k("(x:El(A))El(A)")))
    sig = builtin_sigma()
    assert arity_translate(sig.kinds["Sigma"]) == sig.arities["Sigma"]
    check_signature(SIG)


PROJECTION_CTX = ("assume A : Type; assume B : (x:El(A))Type; assume C : Type;"
          "assume a : El(A); assume b : El(B a); assume f : (x:El(B a))El(C);"
          "assume y : El(B (pi1 A B (pair A B a b)));")


def test_conversion_needs_the_projection_rule():
    with pytest.raises(TypingError):
        infer_type(ctx(PROJECTION_CTX, active=set()), t("f y"))
    assert infer_type(ctx(PROJECTION_CTX, active={"pi1"}), t("f y")).kind == k("El(C)")


GAMMA = lab_type_context(SIG)
CORPUS = well_typed_corpus(GAMMA, 150, seed=7)
TYPES = [m for m, kind in CORPUS if kind == Type()]


def kinds():
    """El of Type-terms, optionally hidden under a redex."""
    base = st.sampled_from(TYPES)
    wrapped = base.map(lambda m: App(lam("q", Type(), Var("q")), m))
    return st.one_of(base, wrapped).map(El)


def test_corpus_is_rich():
    assert len(CORPUS) == 150 and len(TYPES) >= 10


@given(st.sampled_from(CORPUS))
def test_bridge_on_corpus(entry):
    m, kind = entry
    assert theorem2_bridge(GAMMA, m).arity == arity_translate(kind)


@given(st.sampled_from(CORPUS))
def test_well_typed_terms_normalise(entry):
    m, _ = entry
    assert not sn_explore(m, GAMMA.checker().rules, 20_000).fuel_exhausted


@given(kinds(), kinds(), kinds())
def test_conversion_is_an_equivalence(k1, k2, k3):
    assert conv_kind(GAMMA, k1, k1)
    assert conv_kind(GAMMA, k1, k2) == conv_kind(GAMMA, k2, k1)
    if conv_kind(GAMMA, k1, k2) and conv_kind(GAMMA, k2, k3):
        assert conv_kind(GAMMA, k1, k3)
