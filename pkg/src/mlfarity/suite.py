"""The property suite: every lemma checker over generated cases.

Case `i` of lemma `L` at seed `s` draws from its own generator seeded with
"s/L/i", so a case can be replayed alone and the report does not depend
on how cases are spread over worker processes.
"""
from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .arity import infer_arity
from .generate import Grammar, Unsatisfiable, grammar_for, make_redex, plant, sites
from .lemmas import (
    BOUND, FAIL, PASS, SKIP, LemmaVerdict, Verdict, check_commutation, check_fv_beta,
    check_subject_reduction, check_subst, check_subst_arg, check_uniqueness, _case,
)
from .reduction import BETA, BETA2, ETA, NotARedex, RuleSet, RuleTag, Sig, sn_explore, step, successors
from .signatures import Signature, all_builtins
from .surface import parse_arity_context, show
from .syntax import App, ArityContext, Bound, Lam, fv, replace_at, shift, subterm_at

LAB_CONTEXT = "f:(0,0), g:(0,(0,0)), F:((0,0),0), a:0, b:0, x:0, y:(0,0)"


@dataclass(frozen=True)
class Lab:
    """Everything a case needs: arity context, signature, rules."""
    ctx: ArityContext
    rules: RuleSet

    @property
    def sig(self) -> Signature:
        return self.rules.sig

    @property
    def grammar(self) -> Grammar:
        return grammar_for(self.ctx, self.sig)


def default_lab(sig: Signature | None = None) -> Lab:
    return Lab(parse_arity_context(LAB_CONTEXT), RuleSet(sig=sig if sig is not None else all_builtins()))


# -- case generators -------------------------------------------------------
# each takes (lab, rng) and returns (Verdict, inputs)

def _host(lab, rng, max_size=6, sort="any"):
    return lab.grammar.sample(rng, sort, None, max_size)


def _with_redex(lab, rng, tag, max_size=6, sort="any"):
    for _ in range(20):
        try:
            return plant(lab.grammar, rng, _host(lab, rng, max_size, sort), tag)
        except Unsatisfiable:
            continue
    raise Unsatisfiable(f"could not plant {tag}")


def _lam_host(lab, rng, max_size=7):
    for _ in range(50):
        t = lab.grammar.sample(rng, "term", None, max_size, min_size=3)
        if isinstance(t, Lam):
            return t
    raise Unsatisfiable("no abstraction sampled")


def case_subst(tag):
    def run(lab, rng):
        g = lab.grammar
        m1, pos = _with_redex(lab, rng, tag)
        m2 = step(m1, pos, tag, lab.rules)
        x, ax = rng.choice(lab.ctx.entries)
        n = g.sample(rng, "term", ax, 5)
        v1 = check_subst(tag, lab.rules, m1, m2, n, x)
        m = _host(lab, rng, 6)
        n1, p1 = _planted(lab, rng, tag, ax)
        n2 = step(n1, p1, tag, lab.rules)
        v2 = check_subst_arg(tag, lab.rules, m, n1, n2, x)
        inputs = {"m1": show(m1), "m2": show(m2), "n": show(n), "x": x,
                  "m": show(m), "n1": show(n1), "n2": show(n2)}
        return _combine(v1, v2), inputs
    return run


def _planted(lab, rng, tag, arity):
    """A term of the given arity containing a `tag` redex."""
    for _ in range(20):
        try:
            return plant(lab.grammar, rng, lab.grammar.sample(rng, "term", arity, 5), tag)
        except Unsatisfiable:
            continue
    raise Unsatisfiable(f"no term of arity {arity} holds a {tag} redex")


def _combine(*vs: Verdict) -> Verdict:
    for status in (FAIL, BOUND):
        bad = [v for v in vs if v.status == status]
        if bad:
            return Verdict(status, "; ".join(v.explanation for v in bad))
    if all(v.status == SKIP for v in vs):
        return Verdict(SKIP, "; ".join(v.explanation for v in vs))
    return Verdict(PASS)


def case_fv_beta(lab, rng):
    m1, pos = _with_redex(lab, rng, BETA, 7, "any")
    if not isinstance(subterm_at(m1, pos), App):
        return Verdict(SKIP, "planted a kind redex"), {}
    m2 = step(m1, pos, BETA, lab.rules)
    names = [x for x in lab.ctx.names() if x not in fv(m1)] or lab.ctx.names()
    x = rng.choice(names)
    return check_fv_beta(m1, m2, x, lab.rules), {"m1": show(m1), "m2": show(m2), "x": x}


def case_lam_target(tag, allow_root):
    def run(lab, rng):
        g = lab.grammar
        host = _lam_host(lab, rng)
        if allow_root and rng.random() < 0.3:
            a = infer_arity(lab.ctx, host, lab.sig)
            k = g.sample(rng, "kind", a.left, 3)
            m1 = Lam(k, App(shift(host, 1), Bound(0)), "y")
            target = host
        else:
            m1, pos = plant(g, rng, host, tag)
            target = step(m1, pos, tag, lab.rules)
        v = _case(tag, lab.rules, m1, target, allow_root)
        return v, {"m1": show(m1), "target": show(target)}
    return run


def case_commute(tag):
    def run(lab, rng):
        g = lab.grammar
        m1, _ = _with_redex(lab, rng, BETA, 5, "term")
        m1, pos = plant(g, rng, m1, tag)
        if rng.random() < 0.5:
            # a beta redex inside the pattern instance as well
            local = next(l for p, l, _, _ in sites(lab.ctx, m1, lab.sig) if p == pos)
            try:
                inner, ipos = plant(g, rng, subterm_at(m1, pos), BETA, 3, local)
                cand = replace_at(m1, pos, inner)
                step(cand, pos, tag, lab.rules)
                m1 = cand
            except (Unsatisfiable, NotARedex):
                pass
        m2 = step(m1, pos, tag, lab.rules)
        betas = [t for _, tg, t in successors(m2, lab.rules.only(BETA))]
        if not betas:
            return Verdict(SKIP, "m2 has no beta redex"), {"m1": show(m1), "m2": show(m2)}
        m3 = rng.choice(betas)
        v = check_commutation(m1, tag, m2, m3, lab.rules)
        return v, {"m1": show(m1), "m2": show(m2), "m3": show(m3)}
    return run


def _any_tag(lab, rng):
    return rng.choice([BETA, BETA2, ETA] + [Sig(r.name) for r in lab.sig.rules])


def case_subject_reduction(lab, rng):
    m = _host(lab, rng, 7)
    for _ in range(rng.randrange(1, 3)):
        try:
            m, _ = plant(lab.grammar, rng, m, _any_tag(lab, rng), 3)
        except Unsatisfiable:
            pass
    return check_subject_reduction(lab.ctx, m, lab.rules), {"m": show(m)}


def case_uniqueness(lab, rng):
    m = _host(lab, rng, 7)
    return check_uniqueness(lab.ctx, m, lab.sig), {"m": show(m)}


def case_sn(lab, rng):
    m = _host(lab, rng, 6)
    for _ in range(rng.randrange(1, 3)):
        try:
            m, _ = plant(lab.grammar, rng, m, _any_tag(lab, rng), 3)
        except Unsatisfiable:
            pass
    r = sn_explore(m, lab.rules, fuel=20_000)
    if r.cyclic:
        v = Verdict(FAIL, "reduction graph has a cycle")
    elif r.fuel_exhausted:
        v = Verdict(BOUND, "more than 20000 reducts")
    else:
        v = Verdict(PASS)
    return v, {"m": show(m)}


def case_bridge(lab, rng):
    from .generate import WellTypedGen, lab_type_context
    from .mlf import BridgeViolation, TypingError, infer_type, theorem2_bridge
    gamma = _gamma(lab.sig)
    gen = WellTypedGen(gamma, rng)
    t, _ = gen.any_term()
    try:
        infer_type(gamma, t)
    except TypingError as exc:
        return Verdict(SKIP, f"generated term is ill-typed: {exc}"), {"m": show(t)}
    try:
        theorem2_bridge(gamma, t)
    except BridgeViolation as exc:
        return Verdict(FAIL, str(exc)), {"m": show(t)}
    return Verdict(PASS), {"m": show(t)}


_GAMMAS: dict = {}


def _gamma(sig):
    from .generate import lab_type_context
    key = id(sig)
    if key not in _GAMMAS:
        _GAMMAS[key] = (sig, lab_type_context(sig))
    return _GAMMAS[key][1]


def lemma_table(sig: Signature) -> dict:
    """Lemma name -> case function, in report order."""
    sig_tags = [Sig(r.name) for r in sig.rules]
    table = {"subst-eta": case_subst(ETA)}
    table.update({f"subst-{t.rule_name}": case_subst(t) for t in sig_tags})
    table["fv-beta"] = case_fv_beta
    table["eta-case"] = case_lam_target(ETA, True)
    table.update({f"{t.rule_name}-case": case_lam_target(t, False) for t in sig_tags})
    table["commute-eta-beta"] = case_commute(ETA)
    table.update({f"commute-{t.rule_name}-beta": case_commute(t) for t in sig_tags})
    table["subject-reduction"] = case_subject_reduction
    table["arity-uniqueness"] = case_uniqueness
    table["sn"] = case_sn
    if {"Sigma", "E_Bool", "U"} <= sig.names():
        table["bridge"] = case_bridge
    return table


# -- running ---------------------------------------------------------------

def run_case(lab: Lab, lemma: str, seed: int, i: int) -> tuple[str, str, dict]:
    """(status, explanation, inputs) for case `i`; deterministic."""
    rng = random.Random(f"{seed}/{lemma}/{i}")
    fn = lemma_table(lab.sig)[lemma]
    try:
        v, inputs = fn(lab, rng)
    except Unsatisfiable as exc:
        return SKIP, f"generator: {exc}", {}
    return v.status, v.explanation, inputs


def _run_chunk(args):
    lab, lemma, seed, lo, hi = args
    return [run_case(lab, lemma, seed, i) for i in range(lo, hi)]


@dataclass(frozen=True)
class SuiteReport:
    seed: int
    cases: int
    verdicts: tuple[LemmaVerdict, ...]
    elapsed: float | None = None

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)

    def to_json(self) -> dict:
        out = {
            "seed": self.seed,
            "cases": self.cases,
            "ok": self.ok,
            "lemmas": [
                {
                    "lemma": v.lemma,
                    "cases": v.cases,
                    "passed": v.passed,
                    "skipped": v.skipped,
                    "boundExceeded": v.bound_exceeded,
                    "failures": [{"case": c, "inputs": inp, "explanation": why}
                                 for c, inp, why in v.counterexamples],
                }
                for v in self.verdicts
            ],
        }
        if self.elapsed is not None:
            out["elapsed"] = round(self.elapsed, 3)
        return out

    def lines(self) -> list[str]:
        out = []
        for v in self.verdicts:
            mark = "ok  " if v.ok else "FAIL"
            out.append(f"{mark} {v.lemma:<22} passed {v.passed:>5}  skipped {v.skipped:>5}"
                       f"  bound {v.bound_exceeded}  failures {len(v.counterexamples)}")
            for c, inp, why in v.counterexamples[:3]:
                out.append(f"       case {c}: {why}  {inp}")
        return out


def run_suite(seed: int = 42, cases: int = 1000, workers: int = 1, lemmas=None,
              sig: Signature | None = None, timing: bool = False) -> SuiteReport:
    lab = default_lab(sig)
    table = lemma_table(lab.sig)
    names = list(table) if lemmas is None else list(lemmas)
    for n in names:
        if n not in table:
            raise KeyError(f"unknown lemma {n!r}; have {', '.join(table)}")
    start = time.perf_counter()
    chunk = max(1, cases // (4 * max(1, workers)))
    jobs = [(lab, n, seed, lo, min(cases, lo + chunk)) for n in names for lo in range(0, cases, chunk)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_chunk, jobs))
    else:
        results = [_run_chunk(j) for j in jobs]
    per: dict[str, list] = {n: [] for n in names}
    for job, res in zip(jobs, results):
        per[job[1]].extend(res)
    verdicts = []
    for n in names:
        rs = per[n]
        counter = tuple((i, inp, why) for i, (st, why, inp) in enumerate(rs) if st == FAIL)
        verdicts.append(LemmaVerdict(
            lemma=n, cases=len(rs),
            passed=sum(st == PASS for st, _, _ in rs),
            skipped=sum(st == SKIP for st, _, _ in rs),
            bound_exceeded=sum(st == BOUND for st, _, _ in rs),
            counterexamples=counter,
        ))
    elapsed = time.perf_counter() - start if timing else None
    return SuiteReport(seed, cases, tuple(verdicts), elapsed)


# -- exhaustive small-scope sweep ------------------------------------------

SWEEP_CONTEXT = "f:(0,0), a:0, b:0"


@dataclass(frozen=True)
class SweepReport:
    """Every correct-arity expression up to `max_size` explored to the end.

    `divergent` lists subjects with more than one normal form, each with
    two replayable traces ending in different normal forms.
    """
    max_size: int
    subjects: int
    fuel_exhausted: tuple
    longest_path: int
    longest_subject: object
    subject_reduction_failures: tuple
    uniqueness_failures: tuple
    divergent: tuple
    divergent_total: int

    def to_json(self) -> dict:
        return {
            "maxSize": self.max_size,
            "subjects": self.subjects,
            "fuelExhausted": [show(t) for t in self.fuel_exhausted],
            "longestPath": self.longest_path,
            "longestSubject": show(self.longest_subject) if self.longest_subject is not None else None,
            "subjectReductionFailures": [{"subject": show(t), "explanation": w}
                                         for t, w in self.subject_reduction_failures],
            "uniquenessFailures": [{"subject": show(t), "explanation": w}
                                   for t, w in self.uniqueness_failures],
            "divergentTotal": self.divergent_total,
            "divergent": [{"subject": show(t), "traces": [tr.to_json() for tr in trs]}
                          for t, trs in self.divergent],
        }


def trace_to(subject, target, rules: RuleSet):
    """A shortest reduction trace from `subject` to `target`, or None."""
    from collections import deque

    from .reduction import ReductionTrace, Step
    parent = {subject: None}
    queue = deque([subject])
    while queue:
        e = queue.popleft()
        if e == target:
            steps = []
            while parent[e] is not None:
                prev, pos, tag = parent[e]
                steps.append(Step(pos, tag, e))
                e = prev
            return ReductionTrace(subject, tuple(reversed(steps)))
        for pos, tag, t in successors(e, rules):
            if t not in parent:
                parent[t] = (e, pos, tag)
                queue.append(t)
    return None


def exhaustive_sweep(max_size: int = 8, ctx: ArityContext | None = None, rules: RuleSet | None = None,
                     fuel: int = 100_000, keep: int = 25, sort: str = "any") -> SweepReport:
    from .signatures import builtin
    ctx = ctx or parse_arity_context(SWEEP_CONTEXT)
    rules = rules or RuleSet(sig=builtin("sigma"))
    g = grammar_for(ctx, rules.sig)
    n = 0
    exhausted, sr_fail, un_fail, divergent = [], [], [], []
    div_total = 0
    longest, longest_subject = -1, None
    for s in range(1, max_size + 1):
        for e, _ in g.enumerate(sort, s):
            n += 1
            r = sn_explore(e, rules, fuel)
            if r.fuel_exhausted:
                exhausted.append(e)
            elif r.longest_path > longest:
                longest, longest_subject = r.longest_path, e
            v = check_subject_reduction(ctx, e, rules)
            if v.status == FAIL:
                sr_fail.append((e, v.explanation))
            v = check_uniqueness(ctx, e, rules.sig)
            if v.status == FAIL:
                un_fail.append((e, v.explanation))
            if len(r.normal_forms) > 1 and not r.fuel_exhausted:
                div_total += 1
                if len(divergent) < keep:
                    traces = tuple(trace_to(e, t, rules) for t in r.normal_forms[:2])
                    divergent.append((e, traces))
    return SweepReport(max_size, n, tuple(exhausted), longest, longest_subject,
                       tuple(sr_fail), tuple(un_fail), tuple(divergent), div_total)
