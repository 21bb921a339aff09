"""Command-line front end.

Exit status: 0 success, 1 the judgement failed, 2 unreadable input,
3 fuel or search bound exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .arity import NoArity, infer_arity
from .mlf import NotMlfGrammar, TypeContext, TypingError, arity_translate, infer_type
from .reduction import STRATEGIES, FuelExhausted, RuleSet, normalize, sn_explore
from .signatures import Signature, SignatureError, builtin, parse_signature
from .surface import (
    ParseError, parse_arity_context, parse_kind, parse_term, parse_type_context, show,
)
from .syntax import ArityContext

OK, FAILED, BAD_INPUT, EXHAUSTED = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _source(args, name: str = "input") -> tuple[str, str]:
    """(text, file label) from -e or a path argument."""
    inline = getattr(args, "expr", None)
    path = getattr(args, name, None)
    if inline is not None:
        return inline, "<expr>"
    if path is None:
        raise InputError(f"give a file or -e TEXT")
    return _read(path), path


def load_signature(specs: list[str] | None) -> Signature:
    sig = Signature()
    for item in specs or ():
        if item.startswith("sig:"):
            try:
                sig = sig.merge(builtin(item[4:]))
            except SignatureError as exc:
                raise InputError(str(exc)) from None
        else:
            sig = parse_signature(_read(item), item, sig)
    return sig


def _subject(text: str, file: str, sig: Signature):
    """A term, or a kind if the text only parses as one."""
    try:
        return parse_term(text, sig.names(), file)
    except ParseError as first:
        try:
            return parse_kind(text, sig.names(), file)
        except ParseError:
            raise first from None


def _arity_ctx(args) -> ArityContext:
    if args.ctx_text is not None:
        return parse_arity_context(args.ctx_text, "<ctx>")
    if args.ctx is not None:
        return parse_arity_context(_read(args.ctx), args.ctx)
    return ArityContext()


def _type_ctx(args, sig: Signature, active) -> TypeContext:
    if args.ctx_text is not None:
        text, file = args.ctx_text, "<ctx>"
    elif args.ctx is not None:
        text, file = _read(args.ctx), args.ctx
    else:
        text, file = "", "<ctx>"
    return TypeContext(tuple(parse_type_context(text, sig.names(), file)), sig, active)


def _rules(args, sig: Signature) -> RuleSet:
    try:
        return RuleSet.parse(args.rules, sig)
    except (ValueError, KeyError, SignatureError) as exc:
        raise InputError(f"--rules: {exc}") from None


class Output:
    """Collects a result and prints it as text or as one JSON document."""

    def __init__(self, as_json: bool):
        self.as_json = as_json

    def emit(self, doc: dict, text: str | list[str]):
        if self.as_json:
            print(json.dumps(doc, indent=2, sort_keys=True))
        else:
            print(text if isinstance(text, str) else "\n".join(text))


# -- commands --------------------------------------------------------------

def cmd_arity(args, out: Output) -> int:
    sig = load_signature(args.sig)
    ctx = _arity_ctx(args)
    text, file = _source(args)
    subject = _subject(text, file, sig)
    try:
        a = infer_arity(ctx, subject, sig)
    except NoArity as exc:
        out.emit({"subject": show(subject), "error": {"position": list(exc.position), "reason": exc.reason}},
                 f"no arity: {exc}")
        return FAILED
    out.emit({"subject": show(subject), "arity": str(a)}, str(a))
    return OK


def cmd_check(args, out: Output) -> int:
    sig = load_signature(args.sig)
    active = None
    if args.rules is not None:
        active = {t.rule_name for t in _rules(args, sig).tags if t.rule_name}
    gamma = _type_ctx(args, sig, active)
    text, file = _source(args)
    subject = parse_term(text, sig.names(), file)
    try:
        res = infer_type(gamma, subject)
    except TypingError as exc:
        out.emit({"subject": show(subject), "error": {"position": list(exc.position), "reason": exc.reason}},
                 f"type error: {exc}")
        return FAILED
    out.emit({"subject": show(subject), "kind": show(res.kind), "arity": str(arity_translate(res.kind))},
             show(res.kind))
    return OK


def _normalize(args, out: Output, traced: bool) -> int:
    sig = load_signature(args.sig)
    rules = _rules(args, sig)
    text, file = _source(args)
    subject = _subject(text, file, sig)
    ctx = _arity_ctx(args) if (args.ctx or args.ctx_text) else None
    try:
        nf, trace = normalize(subject, rules, args.strategy, args.fuel, ctx)
    except NoArity as exc:
        out.emit({"error": {"position": list(exc.position), "reason": exc.reason}}, f"no arity: {exc}")
        return FAILED
    except FuelExhausted as exc:
        doc = {"error": {"reason": str(exc)}, "trace": exc.trace.to_json() if exc.trace else None}
        out.emit(doc, f"fuel exhausted: {exc}")
        return EXHAUSTED
    if traced:
        out.emit(trace.to_json(), trace.lines() + [f"normal form: {show(nf)}"])
    else:
        out.emit({"normalForm": show(nf), "steps": len(trace.steps)}, show(nf))
    return OK


def cmd_normalize(args, out: Output) -> int:
    return _normalize(args, out, traced=False)


def cmd_trace(args, out: Output) -> int:
    return _normalize(args, out, traced=True)


def cmd_sn(args, out: Output) -> int:
    sig = load_signature(args.sig)
    rules = _rules(args, sig)
    text, file = _source(args)
    subject = _subject(text, file, sig)
    r = sn_explore(subject, rules, args.fuel)
    lines = [
        f"nodes {r.nodes}  edges {r.edges}  frontier {r.frontier}",
        f"longest path {r.longest_path}" + ("  (lower bound)" if r.fuel_exhausted else ""),
        "cyclic" if r.cyclic else ("fuel exhausted" if r.fuel_exhausted else "terminating"),
    ] + [f"normal form: {show(t)}" for t in r.normal_forms]
    out.emit(r.to_json(), lines)
    return EXHAUSTED if r.fuel_exhausted else OK


def cmd_props(args, out: Output) -> int:
    from .suite import exhaustive_sweep, run_suite
    sig = load_signature(args.sig) if args.sig else None
    if args.exhaustive:
        rules = RuleSet(sig=sig) if sig is not None else None
        r = exhaustive_sweep(args.exhaustive, rules=rules, fuel=args.fuel)
        doc = r.to_json()
        lines = [f"{r.subjects} subjects up to size {r.max_size}",
                 f"fuel exhausted: {len(r.fuel_exhausted)}",
                 f"longest path: {r.longest_path}",
                 f"subject reduction failures: {len(r.subject_reduction_failures)}",
                 f"uniqueness failures: {len(r.uniqueness_failures)}",
                 f"subjects with several normal forms: {r.divergent_total}"]
        for t, traces in r.divergent[:5]:
            lines.append(f"  {show(t)}  ->  " + "  |  ".join(show(tr.final) for tr in traces))
        if r.fuel_exhausted:
            status = EXHAUSTED
        elif r.subject_reduction_failures or r.uniqueness_failures or r.divergent_total:
            status = FAILED
        else:
            status = OK
        out.emit(doc, lines)
        return status
    try:
        r = run_suite(args.seed, args.cases, args.workers, args.lemma or None, sig, args.timing)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    out.emit(r.to_json(), r.lines() + [f"seed {r.seed}, {r.cases} cases per lemma: "
                                        + ("all passed" if r.ok else "FAILED")])
    if any(v.counterexamples for v in r.verdicts):
        return FAILED
    return OK if r.ok else EXHAUSTED


def cmd_translate(args, out: Output) -> int:
    sig = load_signature(args.sig)
    text, file = _source(args)
    k = parse_kind(text, sig.names(), file)
    try:
        a = arity_translate(k)
    except NotMlfGrammar as exc:
        out.emit({"kind": show(k), "error": {"reason": exc.reason}}, f"not an MLF kind: {exc.reason}")
        return FAILED
    out.emit({"kind": show(k), "arity": str(a)}, str(a))
    return OK


# -- argument parsing ------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mlfarity",
        description="Arities, reduction and typing for Martin-Löf's logical framework.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, source=True, ctx=False, rules=None, fuel=None):
        sp.add_argument("--sig", action="append", metavar="SIG",
                        help="sig:sigma, sig:bool, sig:universe or a signature file (repeatable)")
        sp.add_argument("--json", action="store_true", help="print one JSON document")
        if source:
            sp.add_argument("input", nargs="?", help="file holding the subject")
            sp.add_argument("-e", dest="expr", metavar="TEXT", help="subject given inline")
        if ctx:
            sp.add_argument("--ctx", metavar="FILE", help="context file")
            sp.add_argument("--ctx-text", metavar="TEXT", help="context given inline")
        if rules is not None:
            sp.add_argument("--rules", default=rules,
                            help="comma list of beta, beta2, eta, sig, sig:<rule>, all")
        if fuel is not None:
            sp.add_argument("--fuel", type=int, default=fuel)

    sp = sub.add_parser("arity", help="infer the arity of a term or kind")
    common(sp, ctx=True)
    sp.set_defaults(func=cmd_arity)

    sp = sub.add_parser("check", help="infer the MLF kind of a term")
    common(sp, ctx=True)
    sp.add_argument("--rules", default=None,
                    help="signature rules active in conversion (default: all loaded)")
    sp.set_defaults(func=cmd_check)

    for name, func, doc in (("normalize", cmd_normalize, "print the normal form"),
                            ("trace", cmd_trace, "print every reduction step")):
        sp = sub.add_parser(name, help=doc)
        common(sp, ctx=True, rules="all", fuel=10_000)
        sp.add_argument("--strategy", choices=STRATEGIES, default="outermost")
        sp.set_defaults(func=func)

    sp = sub.add_parser("sn", help="explore the whole reduction graph")
    common(sp, rules="all", fuel=100_000)
    sp.set_defaults(func=cmd_sn)

    sp = sub.add_parser("props", help="run the lemma suite on generated cases")
    common(sp, source=False, fuel=100_000)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--cases", type=int, default=1000)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--lemma", action="append", help="run only this lemma (repeatable)")
    sp.add_argument("--timing", action="store_true", help="include elapsed seconds")
    sp.add_argument("--exhaustive", type=int, metavar="N",
                    help="instead sweep every correct-arity expression up to size N")
    sp.set_defaults(func=cmd_props)

    sp = sub.add_parser("translate", help="the arity of an MLF kind")
    common(sp)
    sp.set_defaults(func=cmd_translate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Output(args.json)
    try:
        return args.func(args, out)
    except (ParseError, InputError) as exc:
        span = getattr(exc, "span", None)
        doc = {"error": {"kind": "input", "message": str(exc)}}
        if span is not None:
            doc["error"]["span"] = {"file": span.file, "line": span.line,
                                    "colStart": span.col_start, "colEnd": span.col_end}
        if args.json:
            print(json.dumps(doc, indent=2, sort_keys=True))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except TypingError as exc:
        # raised while validating the typing context
        out.emit({"error": {"position": list(exc.position), "reason": exc.reason}},
                 f"context error: {exc}")
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
