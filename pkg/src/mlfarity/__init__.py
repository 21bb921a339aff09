"""Arities for Martin-Löf's logical framework: an arity checker, a reduction
engine with beta, beta2, eta and signature rules, an MLF typechecker and a
property laboratory that exercises the normalisation argument on generated
terms."""
from .syntax import (
    ZERO, TYPE, App, Arity, ArityContext, Bound, Const, El, KApp, Lam, Pair,
    Pi, Type, Var, Zero, fv, subst,
)
from .surface import (
    ParseError, parse_arity, parse_arity_context, parse_kind, parse_term,
    parse_type_context, show,
)
from .arity import NoArity, enumerate_derivations, has_arity, infer_arity
from .signatures import Signature, all_builtins, builtin, parse_signature
from .reduction import BETA, BETA2, ETA, RuleSet, Sig, normalize, sn_explore
from .mlf import (
    TypeContext, TypingError, arity_translate, check_kind, conv_kind, infer_type,
    theorem2_bridge,
)
