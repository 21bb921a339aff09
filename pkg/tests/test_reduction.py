from functools import lru_cache

import pytest
from hypothesis import given

from mlfarity.arity import NoArity
from mlfarity.reduction import (
    BETA, BETA2, ETA, FuelExhausted, NotARedex, RuleSet, Sig, is_normal, normalize,
    redexes, reducts, sn_explore, step, successors,
)
from mlfarity.surface import parse_arity_context, parse_kind, parse_term, show
from mlfarity.syntax import El, Var, is_kind, is_term, subterm_at

from strategies import LAB_CTX, SIG, correct

ALL = RuleSet(sig=SIG)
NAMES = SIG.names()


def t(text):
    return parse_term(text, NAMES)


def test_redexes():
    assert redexes(t(r"(\x:Type.x) y"), ALL) == [((), BETA)]
    assert redexes(parse_kind("((x:Type)El(x)) y"), ALL) == [((), BETA2)]
    assert redexes(t(r"\x:El(a).f x"), ALL) == [((), ETA)]
    assert redexes(t(r"\x:El(a).x x"), ALL) == []


def test_redexes_inside_annotations():
    e = t(r"\x:El((\y:Type.y) a).x")
    assert redexes(e, ALL) == [((0, 0), BETA)]


def test_step():
    assert step(t(r"(\x:Type.x) y"), (), BETA) == Var("y")
    assert step(parse_kind("((x:Type)El(x)) y"), (), BETA2, ALL) == El(Var("y"))
    assert step(t("pi1 A B (pair A B a b)"), (), Sig("pi1"), ALL) == Var("a")
    with pytest.raises(NotARedex):
        step(t("f a"), (), BETA)


def test_ruleset_selection():
    e = t("pi1 A B (pair A B a b)")
    assert redexes(e, RuleSet()) == []
    assert redexes(e, RuleSet.parse("sig:pi1", SIG)) == [((), Sig("pi1"))]
    assert RuleSet.parse("beta,eta", SIG).tags == [BETA, ETA]


def test_normalize_examples():
    assert normalize(t("E_Bool P p1 p2 true"), ALL)[0] == Var("p1")
    assert normalize(t("uo bool"), ALL)[0] == t("Bool")
    target = t(r"\y:El(a).y")
    subject = t(r"\x:El(a).(\y:El(a).y) x")
    for strategy in ("outermost", "innermost"):
        assert normalize(subject, ALL, strategy)[0] == target
    assert sn_explore(subject, ALL).normal_forms == (target,)


def test_eta_before_beta_at_one_position():
    # outermost picks the root eta redex first
    _, trace = normalize(t(r"\x:El(a).(\y:El(a).y) x"), ALL)
    assert trace.steps[0].tag == ETA


def test_normalize_checks_arity_first():
    with pytest.raises(NoArity):
        normalize(t(r"(\x:El(z).x x) (\x:El(z).x x)"), ALL, ctx=parse_arity_context("z:0"))


def test_omega_runs_out_of_fuel():
    omega = t(r"(\x:El(z).x x) (\x:El(z).x x)")
    with pytest.raises(FuelExhausted) as exc:
        normalize(omega, ALL, fuel=50)
    assert len(exc.value.trace.steps) == 50


def test_trace_lines_and_replay():
    e, trace = normalize(t(r"(\x:Type.(\y:Type.y) x) a"), ALL)
    assert e == Var("a")
    assert trace.lines() == [r"step 1: beta at [] => (\y:Type.y) a", "step 2: beta at [] => a"]
    assert trace.replay(ALL) == e
    doc = trace.to_json()
    assert doc["normalForm"] == "a" and doc["stats"] == {"steps": 2}


def test_sn_examples():
    r = sn_explore(t(r"(\x:Type.x) y"), ALL)
    assert (r.nodes, r.longest_path, r.normal_forms, r.fuel_exhausted) == (2, 1, (Var("y"),), False)
    r = sn_explore(t(r"\x:El(a).f x"), ALL)
    assert (r.nodes, r.longest_path, r.normal_forms) == (2, 1, (Var("f"),))


@pytest.mark.parametrize("fuel", [1, 2, 10, 1000])
def test_omega_omega_exhausts_every_fuel(fuel):
    r = sn_explore(t(r"(\x:El(z).x x) (\x:El(z).x x)"), ALL, fuel)
    assert r.fuel_exhausted and r.cyclic


def test_sn_report_json():
    doc = sn_explore(t(r"(\x:Type.x) y"), ALL).to_json()
    assert doc["normalForms"] == ["y"] and doc["longestPath"] == 1


def longest(e, rules):
    """Longest reduction sequence by plain recursion (small graphs only)."""
    @lru_cache(maxsize=None)
    def go(x):
        return max((1 + go(y) for y in reducts(x, rules)), default=0)
    return go(e)


def normal_forms(e, rules):
    seen, stack, out = {e}, [e], set()
    while stack:
        x = stack.pop()
        rs = reducts(x, rules)
        if not rs:
            out.add(x)
        for y in rs - seen:
            seen.add(y)
            stack.append(y)
    return out


@given(correct(max_size=10))
def test_correct_arity_terms_are_sn(pair):
    e, _ = pair
    r = sn_explore(e, ALL, 20_000)
    assert not r.fuel_exhausted
    assert r.longest_path == longest(e, ALL)
    assert set(r.normal_forms) == normal_forms(e, ALL)


@given(correct(max_size=10))
def test_steps_preserve_class(pair):
    e, _ = pair
    for _, _, s in successors(e, ALL):
        assert is_term(s) == is_term(e) and is_kind(s) == is_kind(e)


@given(correct(max_size=10))
def test_normalize_output_is_normal(pair):
    e, _ = pair
    for strategy in ("outermost", "innermost"):
        n, trace = normalize(e, ALL, strategy, ctx=LAB_CTX)
        assert is_normal(n, ALL)
        assert trace.replay(ALL) == n


@given(correct(max_size=10))
def test_beta2_only_at_kinds(pair):
    e, _ = pair
    for pos, tag in redexes(e, ALL):
        sub = subterm_at(e, pos)
        assert is_kind(sub) if tag == BETA2 else is_term(sub)
