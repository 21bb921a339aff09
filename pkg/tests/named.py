"""An independent named-variable model of terms.

Expressions are nested tuples with explicit names; substitution renames
binders to avoid capture in the textbook way.  Used as an oracle against
the de Bruijn implementation.
"""
import itertools

from mlfarity.syntax import App, Bound, Const, El, KApp, Lam, Pi, Type, Var

_names = itertools.count()


def fresh():
    return f"n{next(_names)}"


def to_named(e, env=()):
    match e:
        case Var(x):
            return ("var", x)
        case Bound(i):
            return ("var", env[i])
        case Const(c):
            return ("const", c)
        case Type():
            return ("Type",)
        case El(t):
            return ("El", to_named(t, env))
        case Lam(k, b) | Pi(k, b):
            x = fresh()
            tag = "lam" if isinstance(e, Lam) else "pi"
            return (tag, x, to_named(k, env), to_named(b, (x,) + env))
        case App(f, a) | KApp(f, a):
            tag = "app" if isinstance(e, App) else "kapp"
            return (tag, to_named(f, env), to_named(a, env))
    raise TypeError(e)


def free(n):
    match n:
        case ("var", x):
            return {x}
        case ("const", _) | ("Type",):
            return set()
        case ("El", t):
            return free(t)
        case (("lam" | "pi"), x, k, b):
            return free(k) | (free(b) - {x})
        case (_, f, a):
            return free(f) | free(a)
    raise TypeError(n)


def subst(n, x, v):
    """Capture-avoiding [v/x]n."""
    match n:
        case ("var", y):
            return v if y == x else n
        case ("const", _) | ("Type",):
            return n
        case ("El", t):
            return ("El", subst(t, x, v))
        case (("lam" | "pi") as tag, y, k, b):
            k2 = subst(k, x, v)
            if y == x:
                return (tag, y, k2, b)
            if y in free(v):
                z = fresh()
                b = subst(b, y, ("var", z))
                y = z
            return (tag, y, k2, subst(b, x, v))
        case (tag, f, a):
            return (tag, subst(f, x, v), subst(a, x, v))
    raise TypeError(n)


def from_named(n, env=()):
    match n:
        case ("var", x):
            return Bound(env.index(x)) if x in env else Var(x)
        case ("const", c):
            return Const(c)
        case ("Type",):
            return Type()
        case ("El", t):
            return El(from_named(t, env))
        case ("lam", x, k, b):
            return Lam(from_named(k, env), from_named(b, (x,) + env))
        case ("pi", x, k, b):
            return Pi(from_named(k, env), from_named(b, (x,) + env))
        case ("app", f, a):
            return App(from_named(f, env), from_named(a, env))
        case ("kapp", f, a):
            return KApp(from_named(f, env), from_named(a, env))
    raise TypeError(n)


def beta_root(e):
    """Contract a root beta or beta2 redex through the named model."""
    n = to_named(e)
    _, (_, x, _, body), arg = n
    return from_named(subst(body, x, arg))
