"""Capture-avoiding application of substitutions to raw terms.

Binders are always renamed, even when no capture could happen, so results
are compared up to alpha-equivalence.
"""
from __future__ import annotations

from .syntax import (
    IMPURE, SAFE, App, BoxE, ChanLit, Context, Fst, Lam, LetBox, Pair, Print,
    Qualifier, Snd, StrLit, Subst, Term, UnitLit, Var, all_names, free_vars,
    fresh_name, identity_subst,
)


class UnboundInSubst(LookupError):
    def __init__(self, name: str):
        super().__init__(f"variable {name!r} not bound by the substitution")
        self.name = name


def subst_lookup(t: Subst, x: str) -> Term:
    for s in reversed(t.entries):
        if s.name == x:
            return s.term
    raise UnboundInSubst(x)


def apply_subst(t: Subst, e: Term) -> Term:
    avoid = set()
    for s in t.entries:
        avoid.add(s.name)
        avoid |= free_vars(s.term)
    avoid |= all_names(e)
    return _apply(t, e, avoid)


def _apply(t: Subst, e: Term, avoid: set) -> Term:
    if isinstance(e, Var):
        return subst_lookup(t, e.name)
    if isinstance(e, (UnitLit, StrLit, ChanLit)):
        return e
    if isinstance(e, Pair):
        return Pair(_apply(t, e.left, avoid), _apply(t, e.right, avoid))
    if isinstance(e, Fst):
        return Fst(_apply(t, e.body, avoid))
    if isinstance(e, Snd):
        return Snd(_apply(t, e.body, avoid))
    if isinstance(e, Print):
        return Print(_apply(t, e.chan, avoid), _apply(t, e.msg, avoid))
    if isinstance(e, App):
        return App(_apply(t, e.fn, avoid), _apply(t, e.arg, avoid))
    if isinstance(e, Lam):
        y = fresh_name(e.var, avoid)
        avoid.add(y)
        return Lam(y, e.ty, _apply(t.extend(e.var, Var(y), IMPURE), e.body, avoid))
    if isinstance(e, BoxE):
        return BoxE(_apply(t.purify(), e.body, avoid))
    if isinstance(e, LetBox):
        bound = _apply(t, e.bound, avoid)
        y = fresh_name(e.var, avoid)
        avoid.add(y)
        return LetBox(y, bound, _apply(t.extend(e.var, Var(y), SAFE), e.body, avoid))
    raise TypeError(f"not a term: {e!r}")


def single_subst(v: Term, q: Qualifier, x: str, e: Term, g: Context) -> Term:
    """``[v/x]e``: the identity substitution on ``g`` extended with ``v^q/x``."""
    return apply_subst(identity_subst(g).extend(x, v, q), e)
