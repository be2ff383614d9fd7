"""Type synthesis for the capability calculus.

Every binder is annotated, so the rules are syntax-directed.  A ``box``
body is checked in the purified context; a variable that exists but was
dropped by purification is reported as :class:`ImpureInSafe`.
"""
from __future__ import annotations

from typing import Optional

from .syntax import (
    CAP, IMPURE, SAFE, STR, UNIT, App, Arrow, Binding, Box, BoxE, ChanLit, Context,
    Fst, Lam, LetBox, Pair, Print, Prod, Qualifier, Snd, StrLit, Subst, Term, Type,
    UnitLit, Var, is_value,
)


class CapTypeError(Exception):
    """Base class of all typing failures."""


class Unbound(CapTypeError):
    def __init__(self, name: str, at: Optional[Term] = None):
        super().__init__(f"unbound variable {name!r}")
        self.name, self.at = name, at


class Mismatch(CapTypeError):
    def __init__(self, expected: Type, got: Type, at: Term):
        from .parser import show, show_type
        super().__init__(f"expected {show_type(expected)}, got {show_type(got)} in {show(at)}")
        self.expected, self.got, self.at = expected, got, at


class ImpureInSafe(CapTypeError):
    def __init__(self, name: str, at: Term):
        super().__init__(f"impure variable {name!r} used inside box")
        self.name, self.at = name, at


class NotFunction(CapTypeError):
    def __init__(self, ty: Type, at: Optional[Term] = None):
        from .parser import show_type
        super().__init__(f"not a function type: {show_type(ty)}")
        self.ty, self.at = ty, at


class NotProduct(CapTypeError):
    def __init__(self, ty: Type, at: Optional[Term] = None):
        from .parser import show_type
        super().__init__(f"not a product type: {show_type(ty)}")
        self.ty, self.at = ty, at


class NotBox(CapTypeError):
    def __init__(self, ty: Type, at: Optional[Term] = None):
        from .parser import show_type
        super().__init__(f"not a box type: {show_type(ty)}")
        self.ty, self.at = ty, at


class IllFormedSubst(CapTypeError):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def lookup(g: Context, x: str) -> tuple:
    b = g.lookup(x)
    if b is None:
        raise Unbound(x)
    return b.ty, b.qual


def infer(g: Context, e: Term) -> Type:
    return _infer(g, g, e)


def infer_safe(g: Context, e: Term) -> Type:
    return _infer(g.purify(), g, e)


def _infer(g: Context, full: Context, e: Term) -> Type:
    # `full` shadows `g` without purification, only for diagnostics
    if isinstance(e, UnitLit):
        return UNIT
    if isinstance(e, StrLit):
        return STR
    if isinstance(e, ChanLit):
        return CAP
    if isinstance(e, Var):
        b = g.lookup(e.name)
        if b is None:
            if full.lookup(e.name) is not None:
                raise ImpureInSafe(e.name, e)
            raise Unbound(e.name, e)
        return b.ty
    if isinstance(e, Print):
        _expect(CAP, _infer(g, full, e.chan), e.chan)
        _expect(STR, _infer(g, full, e.msg), e.msg)
        return UNIT
    if isinstance(e, Pair):
        return Prod(_infer(g, full, e.left), _infer(g, full, e.right))
    if isinstance(e, (Fst, Snd)):
        t = _infer(g, full, e.body)
        if not isinstance(t, Prod):
            raise NotProduct(t, e)
        return t.left if isinstance(e, Fst) else t.right
    if isinstance(e, Lam):
        body = _infer(g.extend(e.var, e.ty, IMPURE), full.extend(e.var, e.ty, IMPURE), e.body)
        return Arrow(e.ty, body)
    if isinstance(e, App):
        tf = _infer(g, full, e.fn)
        if not isinstance(tf, Arrow):
            raise NotFunction(tf, e)
        _expect(tf.dom, _infer(g, full, e.arg), e.arg)
        return tf.cod
    if isinstance(e, BoxE):
        return Box(_infer(g.purify(), full, e.body))
    if isinstance(e, LetBox):
        tb = _infer(g, full, e.bound)
        if not isinstance(tb, Box):
            raise NotBox(tb, e)
        return _infer(g.extend(e.var, tb.body, SAFE), full.extend(e.var, tb.body, SAFE), e.body)
    raise TypeError(f"not a term: {e!r}")


def _expect(expected: Type, got: Type, at: Term):
    if expected != got:
        raise Mismatch(expected, got, at)


def check_weakening(g: Context, d: Context) -> bool:
    """``g ⊇ d``: ``d`` is a subsequence of ``g``."""
    j = len(d.entries)
    for b in reversed(g.entries):
        if j and d.entries[j - 1] == b:
            j -= 1
    return j == 0


def subst_problem(g: Context, t: Subst, d: Context) -> Optional[str]:
    """Why ``g ⊢ t : d`` fails, or None when it holds."""
    if len(t.entries) != len(d.entries):
        return f"substitution has {len(t.entries)} entries, context has {len(d.entries)}"
    for s, b in zip(t.entries, d.entries):
        if s.name != b.name or s.qual is not b.qual:
            return f"entry {s.name}^{s.qual} does not match binding {b.name}^{b.qual}"
        if s.qual is IMPURE and not is_value(s.term):
            return f"impure entry for {s.name} is not a value"
        try:
            ty = infer_safe(g, s.term) if s.qual is SAFE else infer(g, s.term)
        except CapTypeError as exc:
            return f"entry for {s.name}: {exc}"
        if ty != b.ty:
            return f"entry for {s.name} has the wrong type"
    return None


def check_subst(g: Context, t: Subst, d: Context) -> bool:
    return subst_problem(g, t, d) is None


def ensure_subst(g: Context, t: Subst, d: Context) -> None:
    problem = subst_problem(g, t, d)
    if problem:
        raise IllFormedSubst(problem)


def typechecks(g: Context, e: Term, ty: Optional[Type] = None) -> bool:
    try:
        t = infer(g, e)
    except CapTypeError:
        return False
    return ty is None or t == ty


def is_safe(g: Context, e: Term) -> bool:
    try:
        infer_safe(g, e)
    except CapTypeError:
        return False
    return True
