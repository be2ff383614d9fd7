"""Independent reference implementations used as test oracles.

``nameless`` converts a named term to a locally nameless tree: bound
variables become their distance to the binder, counting every binder on
the way out; free variables keep their names.  Inside ``box`` the impure
binders in scope are hidden, so a variable there resolves past them.
``nl_subst`` substitutes on that representation, where capture cannot
happen, so it is a check on the renaming done by ``apply_subst``.
"""
from capcalc.syntax import (
    IMPURE, SAFE, App, BoxE, ChanLit, Fst, Lam, LetBox, Pair, Print, Snd, StrLit, UnitLit, Var,
)


def nameless(e, scope=()):
    # scope: innermost last, entries (name, qualifier, visible)
    if isinstance(e, Var):
        for k, (n, _, vis) in enumerate(reversed(scope)):
            if vis and n == e.name:
                return ("B", k)
        return ("F", e.name)
    if isinstance(e, UnitLit):
        return ("unit",)
    if isinstance(e, StrLit):
        return ("str", e.text)
    if isinstance(e, ChanLit):
        return ("chan", e.name)
    if isinstance(e, Lam):
        return ("lam", e.ty, nameless(e.body, scope + ((e.var, IMPURE, True),)))
    if isinstance(e, LetBox):
        return ("letbox", nameless(e.bound, scope), nameless(e.body, scope + ((e.var, SAFE, True),)))
    if isinstance(e, BoxE):
        return ("box", nameless(e.body, tuple((n, q, v and q is SAFE) for n, q, v in scope)))
    if isinstance(e, Pair):
        return ("pair", nameless(e.left, scope), nameless(e.right, scope))
    if isinstance(e, App):
        return ("app", nameless(e.fn, scope), nameless(e.arg, scope))
    if isinstance(e, Print):
        return ("print", nameless(e.chan, scope), nameless(e.msg, scope))
    if isinstance(e, Fst):
        return ("fst", nameless(e.body, scope))
    if isinstance(e, Snd):
        return ("snd", nameless(e.body, scope))
    raise TypeError(e)


def nl_subst(theta, t):
    """``theta``: list of (name, nameless replacement, qualifier), rightmost wins."""
    tag = t[0]
    if tag == "F":
        for name, rep, _ in reversed(theta):
            if name == t[1]:
                return rep
        raise KeyError(t[1])
    if tag in ("B", "unit", "str", "chan"):
        return t
    if tag == "box":
        return ("box", nl_subst([s for s in theta if s[2] is SAFE], t[1]))
    if tag == "lam":
        return ("lam", t[1], nl_subst(theta, t[2]))
    return (tag,) + tuple(nl_subst(theta, c) for c in t[1:])


def oracle_apply(theta_entries, e):
    return nl_subst([(s.name, nameless(s.term), s.qual) for s in theta_entries], nameless(e))


def subterms(g, e):
    """Every subterm of a well-typed ``e`` paired with the context it is
    typed in; under ``box`` that context is purified."""
    from capcalc.typecheck import infer

    yield g, e
    if isinstance(e, Lam):
        yield from subterms(g.extend(e.var, e.ty, IMPURE), e.body)
    elif isinstance(e, LetBox):
        yield from subterms(g, e.bound)
        yield from subterms(g.extend(e.var, infer(g, e.bound).body, SAFE), e.body)
    elif isinstance(e, BoxE):
        yield from subterms(g.purify(), e.body)
    elif isinstance(e, (App, Pair, Print)):
        for child in vars(e).values():
            yield from subterms(g, child)
    elif isinstance(e, (Fst, Snd)):
        yield from subterms(g, e.body)
