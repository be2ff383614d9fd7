"""Seeded, type-directed random generators for types, terms, values and environments.

Generators return ``None`` when they cannot build an inhabitant within the
depth budget (``cap`` has no introduction form, so some goals are empty in
a purified context).  Callers retry with a different seed or goal.
"""
from __future__ import annotations

import random
from typing import Optional

from .interp import Env, VChan, eval_term
from .syntax import (
    CAP, IMPURE, SAFE, STR, UNIT, App, Arrow, Binding, Box, BoxE, CapT, Context, Fst, Lam,
    LetBox, Pair, Print, Prod, Snd, StrLit, StrT, Subst, Term, Type, UnitLit, UnitT, Var, seq,
)

CHANNELS = ("c0", "c1", "c2", "c3")
BINDERS = ("x", "y", "z", "f", "g", "u")
WORDS = ("a", "b", "hi", "")


def channel_context(chans=CHANNELS) -> Context:
    """``c0 .. c3 : cap`` bound impure, the ambient context of generated programs."""
    return Context.of(*((c, CAP, IMPURE) for c in chans))


def channel_env(chans=CHANNELS) -> Env:
    return Env.of(*((c, VChan(c), IMPURE) for c in chans))


def gen_type(rng: random.Random, depth: int = 2, caps: bool = True) -> Type:
    bases = [UNIT, STR, CAP] if caps else [UNIT, STR]
    if depth <= 0 or rng.random() < 0.35:
        return rng.choice(bases)
    k = rng.random()
    if k < 0.3:
        return Prod(gen_type(rng, depth - 1, caps), gen_type(rng, depth - 1, caps))
    if k < 0.7:
        return Arrow(gen_type(rng, depth - 1, caps), gen_type(rng, depth - 1, caps))
    return Box(gen_type(rng, depth - 1, caps))


def gen_first_order_type(rng: random.Random, depth: int = 2) -> Type:
    """Like ``gen_type`` but without arrows, so values compare structurally."""
    if depth <= 0 or rng.random() < 0.4:
        return rng.choice([UNIT, STR, CAP])
    if rng.random() < 0.6:
        return Prod(gen_first_order_type(rng, depth - 1), gen_first_order_type(rng, depth - 1))
    return Box(gen_first_order_type(rng, depth - 1))


def _visible(g: Context) -> list:
    seen, out = set(), []
    for b in reversed(g.entries):
        if b.name not in seen:
            seen.add(b.name)
            out.append(b)
    return out


def _paths(e: Term, ty: Type, goal: Type, depth: int):
    """Projection chains from ``e : ty`` reaching ``goal``."""
    if ty == goal:
        yield e
    if depth > 0 and isinstance(ty, Prod):
        yield from _paths(Fst(e), ty.left, goal, depth - 1)
        yield from _paths(Snd(e), ty.right, goal, depth - 1)


class TermGen:
    """Well-typed term generator.

    ``binders`` is the pool bound names are drawn from; a small pool makes
    shadowing common, which is what substitution tests want.
    """

    def __init__(self, rng: random.Random, binders=BINDERS, words=WORDS):
        self.rng = rng
        self.binders = binders
        self.words = words

    def name(self) -> str:
        return self.rng.choice(self.binders)

    def small_type(self, depth: int = 1) -> Type:
        return gen_type(self.rng, depth)

    # -- variables and projections of variables

    def _from_vars(self, g: Context, ty: Type) -> list:
        out = []
        for b in _visible(g):
            out.extend(_paths(Var(b.name), b.ty, ty, 2))
        return out

    def term(self, g: Context, ty: Type, depth: int) -> Optional[Term]:
        rng = self.rng
        heads = self._from_vars(g, ty)
        options = ["intro"]
        if heads:
            options += ["var", "var"]
        if depth > 0:
            options += ["app", "letbox", "proj"]
            if ty == UNIT:
                options += ["print", "print", "seq"]
        rng.shuffle(options)
        for opt in options:
            e = self._try(opt, g, ty, depth, heads)
            if e is not None:
                return e
        return None

    def _try(self, opt, g, ty, depth, heads) -> Optional[Term]:
        rng = self.rng
        if opt == "var":
            return rng.choice(heads)
        if opt == "intro":
            return self.intro(g, ty, depth)
        if opt == "print":
            c = self.term(g, CAP, depth - 1)
            s = self.term(g, STR, depth - 1) if c is not None else None
            return Print(c, s) if s is not None else None
        if opt == "seq":
            a = self.term(g, UNIT, depth - 1)
            b = self.term(g, UNIT, depth - 1) if a is not None else None
            return seq(a, b) if b is not None else None
        if opt == "app":
            dom = self.small_type()
            f = self.term(g, Arrow(dom, ty), depth - 1)
            a = self.term(g, dom, depth - 1) if f is not None else None
            return App(f, a) if a is not None else None
        if opt == "proj":
            other = self.small_type(0)
            if rng.random() < 0.5:
                p = self.term(g, Prod(ty, other), depth - 1)
                return Fst(p) if p is not None else None
            p = self.term(g, Prod(other, ty), depth - 1)
            return Snd(p) if p is not None else None
        if opt == "letbox":
            inner = self.small_type()
            b = self.term(g, Box(inner), depth - 1)
            if b is None:
                return None
            x = self.name()
            body = self.term(g.extend(x, inner, SAFE), ty, depth - 1)
            return LetBox(x, b, body) if body is not None else None
        raise ValueError(opt)

    def intro(self, g: Context, ty: Type, depth: int) -> Optional[Term]:
        if isinstance(ty, UnitT):
            return UnitLit()
        if isinstance(ty, StrT):
            return StrLit(self.rng.choice(self.words))
        if isinstance(ty, CapT):
            return None
        d = max(depth - 1, 0)
        if isinstance(ty, Prod):
            a = self.term(g, ty.left, d)
            b = self.term(g, ty.right, d) if a is not None else None
            return Pair(a, b) if b is not None else None
        if isinstance(ty, Arrow):
            x = self.name()
            body = self.term(g.extend(x, ty.dom, IMPURE), ty.cod, d)
            return Lam(x, ty.dom, body) if body is not None else None
        if isinstance(ty, Box):
            body = self.term(g.purify(), ty.body, d)
            return BoxE(body) if body is not None else None
        raise TypeError(ty)

    def value(self, g: Context, ty: Type, depth: int) -> Optional[Term]:
        """A syntactic value of type ``ty``."""
        vs = [h for h in self._from_vars(g, ty) if isinstance(h, Var)]
        if vs and self.rng.random() < 0.4:
            return self.rng.choice(vs)
        if isinstance(ty, Prod):
            a = self.value(g, ty.left, depth)
            b = self.value(g, ty.right, depth) if a is not None else None
            return Pair(a, b) if b is not None else None
        if isinstance(ty, CapT):
            return self.rng.choice(vs) if vs else None
        e = self.intro(g, ty, depth)
        if e is None and vs:
            return self.rng.choice(vs)
        return e


def gen_term(rng: random.Random, g: Context, ty: Type, depth: int = 3, **kw) -> Optional[Term]:
    return TermGen(rng, **kw).term(g, ty, depth)


def gen_value(rng: random.Random, g: Context, ty: Type, depth: int = 2, **kw) -> Optional[Term]:
    return TermGen(rng, **kw).value(g, ty, depth)


def gen_program(rng: random.Random, depth: int = 4, tries: int = 20):
    """A term of random type in the channel context, with its type."""
    g = channel_context()
    for _ in range(tries):
        ty = gen_type(rng, 2)
        e = gen_term(rng, g, ty, depth)
        if e is not None:
            return e, ty
    return UnitLit(), UNIT


def gen_context(rng: random.Random, size: int = 3, prefix: str = "v") -> Context:
    """Channels plus a few distinct extra bindings of random type and qualifier."""
    g = channel_context(CHANNELS[: rng.randint(1, len(CHANNELS))])
    for k in range(size):
        q = SAFE if rng.random() < 0.5 else IMPURE
        g = g.extend(f"{prefix}{k}", gen_type(rng, 1), q)
    return g


def gen_subst(rng: random.Random, g: Context, d: Context, depth: int = 2) -> Optional[Subst]:
    """A well-formed ``g |- theta : d``: safe slots get safe expressions,
    impure slots get values."""
    gen = TermGen(rng)
    theta = Subst()
    for b in d.entries:
        e = gen.term(g.purify(), b.ty, depth) if b.qual is SAFE else gen.value(g, b.ty, depth)
        if e is None:
            return None
        theta = theta.extend(b.name, e, b.qual)
    return theta


def gen_weakening(rng: random.Random, d: Context, extra: int = 3) -> Context:
    """``d`` with fresh bindings interleaved, so that the result contains ``d``."""
    out = list(d.entries)
    for k in range(extra):
        q = SAFE if rng.random() < 0.5 else IMPURE
        out.insert(rng.randint(0, len(out)), Binding(f"wk{k}", gen_type(rng, 1), q))
    return Context(tuple(out))


# ---------------------------------------------------------------- runtime closing data


def closed_value(rng: random.Random, ty: Type, safe: bool, depth: int = 2):
    """A runtime value of ``ty``.

    Impure slots draw from terms over the channel context, so they may hold
    channels; safe slots draw from closed terms, which own nothing.
    """
    g = Context() if safe else channel_context()
    env = Env() if safe else channel_env()
    for _ in range(8):
        e = gen_value(rng, g, ty, depth)
        if e is None:
            e = gen_term(rng, g, ty, depth)
        if e is not None:
            v, _ = eval_term(env, e)
            return v
    return None


def closing_env(rng: random.Random, g: Context, depth: int = 2) -> Optional[Env]:
    """Values for every binding of ``g``; channels map to themselves."""
    env = Env()
    for b in g.entries:
        if isinstance(b.ty, CapT) and b.qual is IMPURE and b.name in CHANNELS:
            v = VChan(b.name)
        else:
            v = closed_value(rng, b.ty, b.qual is SAFE, depth)
            if v is None:
                return None
        env = env.extend(b.name, v, b.qual)
    return env
