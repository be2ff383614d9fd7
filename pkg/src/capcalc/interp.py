"""Call-by-value evaluation into the per-channel writer monad.

``eval_term`` returns a value together with the output it produced.
Pairs, applications and ``print`` evaluate their right operand first.  A
``box`` body runs in the environment with impure bindings dropped and its
output is thrown away; in strict mode that output is asserted empty.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Optional, Union

from .syntax import (
    CAP, IMPURE, SAFE, App, BoxE, ChanLit, Context, Fst, Lam, LetBox, Pair, Print,
    Qualifier, Snd, StrLit, Term, Type, UnitLit, Var, free_vars,
)

# ---------------------------------------------------------------- values


@dataclass(frozen=True)
class VUnit:
    pass


@dataclass(frozen=True)
class VStr:
    text: str


@dataclass(frozen=True)
class VChan:
    name: str


@dataclass(frozen=True)
class VPair:
    left: "Value"
    right: "Value"


@dataclass(frozen=True)
class VClosure:
    env: "Env"
    param: str
    param_type: Type
    body: Term


@dataclass(frozen=True)
class VBox:
    payload: "Value"


Value = Union[VUnit, VStr, VChan, VPair, VClosure, VBox]


@dataclass(frozen=True)
class EnvEntry:
    name: str
    value: Value
    qual: Qualifier


@dataclass(frozen=True)
class Env:
    entries: tuple = ()

    def extend(self, name: str, value: Value, qual: Qualifier) -> "Env":
        return Env(self.entries + (EnvEntry(name, value, qual),))

    def lookup(self, name: str) -> Optional[EnvEntry]:
        for b in reversed(self.entries):
            if b.name == name:
                return b
        return None

    def purify(self) -> "Env":
        return Env(tuple(b for b in self.entries if b.qual is SAFE))

    def restrict(self, names) -> "Env":
        """Keep, for each name in ``names``, the visible binding and the one
        that becomes visible again once impure bindings are purged."""
        keep, seen, seen_safe = [], set(), set()
        for b in reversed(self.entries):
            if b.name not in names:
                continue
            if b.name not in seen or (b.qual is SAFE and b.name not in seen_safe):
                keep.append(b)
            seen.add(b.name)
            if b.qual is SAFE:
                seen_safe.add(b.name)
        return Env(tuple(reversed(keep)))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @classmethod
    def of(cls, *triples) -> "Env":
        return cls(tuple(EnvEntry(n, v, q) for n, v, q in triples))


# ---------------------------------------------------------------- output monoid

Output = Mapping  # channel name -> non-empty string

EMPTY: Output = MappingProxyType({})


def out_unit() -> Output:
    return EMPTY


def out_single(chan: str, text: str) -> Output:
    return MappingProxyType({chan: text}) if text else EMPTY


def out_append(first: Output, then: Output) -> Output:
    """Channel-wise concatenation; ``first`` happened earlier."""
    if not then:
        return first
    if not first:
        return then
    merged = dict(first)
    for c, s in then.items():
        merged[c] = merged.get(c, "") + s
    return MappingProxyType(merged)


def render_output(o: Output) -> str:
    return "".join(f"{c}: {o[c]}\n" for c in sorted(o))


# ---------------------------------------------------------------- evaluation


class RuntimeTypeError(Exception):
    """Evaluation went wrong in a way typechecking rules out."""


class StrictPurityViolation(Exception):
    def __init__(self, term: Term, output: Output):
        super().__init__(f"box body produced output {dict(output)!r}")
        self.term, self.output = term, output


def eval_term(env: Env, e: Term, strict: bool = True) -> tuple:
    return _Evaluator(strict).eval(env, e)


class _Evaluator:
    def __init__(self, strict: bool):
        self.strict = strict

    def eval(self, env: Env, e: Term) -> tuple:
        if isinstance(e, UnitLit):
            return VUnit(), EMPTY
        if isinstance(e, StrLit):
            return VStr(e.text), EMPTY
        if isinstance(e, ChanLit):
            return VChan(e.name), EMPTY
        if isinstance(e, Var):
            b = env.lookup(e.name)
            if b is None:
                raise RuntimeTypeError(f"unbound variable {e.name!r}")
            return b.value, EMPTY
        if isinstance(e, Pair):
            right, o2 = self.eval(env, e.right)
            left, o1 = self.eval(env, e.left)
            return VPair(left, right), out_append(o2, o1)
        if isinstance(e, (Fst, Snd)):
            v, o = self.eval(env, e.body)
            if not isinstance(v, VPair):
                raise RuntimeTypeError("projection from a non-pair")
            return (v.left if isinstance(e, Fst) else v.right), o
        if isinstance(e, Lam):
            captured = env.restrict(free_vars(e))
            return VClosure(captured, e.var, e.ty, e.body), EMPTY
        if isinstance(e, App):
            a, o1 = self.eval(env, e.arg)
            f, o2 = self.eval(env, e.fn)
            r, o3 = self.apply(f, a)
            return r, out_append(out_append(o1, o2), o3)
        if isinstance(e, Print):
            s, o1 = self.eval(env, e.msg)
            c, o2 = self.eval(env, e.chan)
            if not isinstance(s, VStr) or not isinstance(c, VChan):
                raise RuntimeTypeError("print needs a channel and a string")
            return VUnit(), out_append(out_append(o1, o2), out_single(c.name, s.text))
        if isinstance(e, BoxE):
            v, o = self.eval(env.purify(), e.body)
            if self.strict and o:
                raise StrictPurityViolation(e, o)
            return VBox(v), EMPTY
        if isinstance(e, LetBox):
            b, o1 = self.eval(env, e.bound)
            if not isinstance(b, VBox):
                raise RuntimeTypeError("let box of a non-box")
            r, o2 = self.eval(env.extend(e.var, b.payload, SAFE), e.body)
            return r, out_append(o1, o2)
        raise TypeError(f"not a term: {e!r}")

    def apply(self, f: Value, a: Value) -> tuple:
        if not isinstance(f, VClosure):
            raise RuntimeTypeError("application of a non-function")
        return self.eval(f.env.extend(f.param, a, IMPURE), f.body)


def apply_value(f: Value, a: Value, strict: bool = True) -> tuple:
    return _Evaluator(strict).apply(f, a)


# ---------------------------------------------------------------- programs


class MissingBinding(Exception):
    def __init__(self, name: str):
        super().__init__(f"no channel bound for capability {name!r}")
        self.name = name


class NoMain(Exception):
    pass


def program_context(src) -> Context:
    """Typing context of ``main``: caps impure, then lets in order."""
    from .typecheck import Mismatch, infer

    g = Context()
    for c in src.caps:
        g = g.extend(c.name, CAP, IMPURE)
    for d in src.lets:
        ty = infer(g, d.term)
        if d.ty is not None and d.ty != ty:
            raise Mismatch(d.ty, ty, d.term)
        g = g.extend(d.name, ty, IMPURE)
    return g


def check_program(src) -> Type:
    from .typecheck import infer

    if src.main is None:
        raise NoMain("program has no main")
    return infer(program_context(src), src.main)


def run(src, bindings: Mapping, strict: bool = True) -> tuple:
    check_program(src)
    env, out = Env(), EMPTY
    for c in src.caps:
        if c.name not in bindings:
            raise MissingBinding(c.name)
        env = env.extend(c.name, VChan(bindings[c.name]), IMPURE)
    ev = _Evaluator(strict)
    for d in src.lets:
        v, o = ev.eval(env, d.term)
        env = env.extend(d.name, v, IMPURE)
        out = out_append(out, o)
    v, o = ev.eval(env, src.main)
    return v, out_append(out, o)


# ---------------------------------------------------------------- reification


def reify(v: Value) -> Term:
    """A closed term denoting ``v``; channels become ``ChanLit``."""
    if isinstance(v, VUnit):
        return UnitLit()
    if isinstance(v, VStr):
        return StrLit(v.text)
    if isinstance(v, VChan):
        return ChanLit(v.name)
    if isinstance(v, VPair):
        return Pair(reify(v.left), reify(v.right))
    if isinstance(v, VBox):
        return BoxE(reify(v.payload))
    if isinstance(v, VClosure):
        closed = {b.name: reify(b.value) for b in v.env}
        return Lam(v.param, v.param_type, _plug_closed(v.body, closed, ((v.param, IMPURE),)))
    raise TypeError(f"not a value: {v!r}")


def _plug_closed(e: Term, closed: dict, scope: tuple) -> Term:
    # the replacements are closed, so no renaming is needed; `scope` lists
    # the enclosing binders with their qualifiers
    if isinstance(e, Var):
        if any(n == e.name for n, _ in scope) or e.name not in closed:
            return e
        return closed[e.name]
    if isinstance(e, (UnitLit, StrLit, ChanLit)):
        return e
    if isinstance(e, Lam):
        return Lam(e.var, e.ty, _plug_closed(e.body, closed, scope + ((e.var, IMPURE),)))
    if isinstance(e, LetBox):
        return LetBox(e.var, _plug_closed(e.bound, closed, scope),
                      _plug_closed(e.body, closed, scope + ((e.var, SAFE),)))
    if isinstance(e, BoxE):
        return BoxE(_plug_closed(e.body, closed, tuple(b for b in scope if b[1] is SAFE)))
    if isinstance(e, Pair):
        return Pair(_plug_closed(e.left, closed, scope), _plug_closed(e.right, closed, scope))
    if isinstance(e, App):
        return App(_plug_closed(e.fn, closed, scope), _plug_closed(e.arg, closed, scope))
    if isinstance(e, Print):
        return Print(_plug_closed(e.chan, closed, scope), _plug_closed(e.msg, closed, scope))
    if isinstance(e, (Fst, Snd)):
        return type(e)(_plug_closed(e.body, closed, scope))
    raise TypeError(f"not a term: {e!r}")
