"""Abstract syntax of the capability calculus.

Types, terms, qualifiers, typing contexts, substitutions and evaluation
contexts.  Everything here is an immutable value; binding is by name.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class UnitT:
    def __str__(self):
        return "unit"


@dataclass(frozen=True)
class StrT:
    def __str__(self):
        return "str"


@dataclass(frozen=True)
class CapT:
    def __str__(self):
        return "cap"


@dataclass(frozen=True)
class Prod:
    left: "Type"
    right: "Type"


@dataclass(frozen=True)
class Arrow:
    dom: "Type"
    cod: "Type"


@dataclass(frozen=True)
class Box:
    body: "Type"


Type = Union[UnitT, StrT, CapT, Prod, Arrow, Box]

UNIT, STR, CAP = UnitT(), StrT(), CapT()


class Qualifier(enum.Enum):
    SAFE = "s"
    IMPURE = "i"

    def __str__(self):
        return self.value


SAFE, IMPURE = Qualifier.SAFE, Qualifier.IMPURE


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class UnitLit:
    pass


@dataclass(frozen=True)
class StrLit:
    text: str


@dataclass(frozen=True)
class Print:
    chan: "Term"
    msg: "Term"


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Fst:
    body: "Term"


@dataclass(frozen=True)
class Snd:
    body: "Term"


@dataclass(frozen=True)
class Var:
    name: str
    # byte offset in the source text, when parsed; ignored by equality
    pos: Optional[int] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Lam:
    var: str
    ty: Type
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class BoxE:
    body: "Term"


@dataclass(frozen=True)
class LetBox:
    var: str
    bound: "Term"
    body: "Term"


@dataclass(frozen=True)
class ChanLit:
    """A channel injected by the runtime; never produced by the parser."""

    name: str


Term = Union[UnitLit, StrLit, Print, Pair, Fst, Snd, Var, Lam, App, BoxE, LetBox, ChanLit]


def is_value(e: Term) -> bool:
    if isinstance(e, (UnitLit, StrLit, Var, Lam, BoxE, ChanLit)):
        return True
    if isinstance(e, Pair):
        return is_value(e.left) and is_value(e.right)
    return False


def free_vars(e: Term) -> frozenset:
    """Free variables, honouring that ``box`` hides impure binders.

    Inside ``box`` a variable skips over enclosing lambda binders, so in
    ``fun x: A -> box x`` the inner ``x`` is free.
    """
    out = set()

    def go(t, scope):
        # scope: names bound around t, each with its qualifier
        if isinstance(t, Var):
            if not any(n == t.name for n, _ in scope):
                out.add(t.name)
        elif isinstance(t, Lam):
            go(t.body, scope + ((t.var, IMPURE),))
        elif isinstance(t, LetBox):
            go(t.bound, scope)
            go(t.body, scope + ((t.var, SAFE),))
        elif isinstance(t, BoxE):
            go(t.body, tuple(b for b in scope if b[1] is SAFE))
        else:
            for c in children(t):
                go(c, scope)

    go(e, ())
    return frozenset(out)


def children(e: Term) -> tuple:
    if isinstance(e, (Print,)):
        return (e.chan, e.msg)
    if isinstance(e, Pair):
        return (e.left, e.right)
    if isinstance(e, App):
        return (e.fn, e.arg)
    if isinstance(e, (Fst, Snd, BoxE, Lam)):
        return (e.body,)
    if isinstance(e, LetBox):
        return (e.bound, e.body)
    return ()


def all_names(e: Term) -> set:
    """Every variable name occurring in ``e``, bound or free."""
    names = set()

    def go(t):
        if isinstance(t, Var):
            names.add(t.name)
        elif isinstance(t, (Lam, LetBox)):
            names.add(t.var)
        for c in children(t):
            go(c)

    go(e)
    return names


def contains_chan(e: Term) -> bool:
    if isinstance(e, ChanLit):
        return True
    return any(contains_chan(c) for c in children(e))


def size(e: Term) -> int:
    return 1 + sum(size(c) for c in children(e))


_SUFFIX = re.compile(r"^(.*?)('(\d+))?$")


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """``base'n`` with n one past the largest suffix of ``base`` in ``avoid``."""
    stem = _SUFFIX.match(base).group(1) or "x"
    top = 0
    for name in avoid:
        m = _SUFFIX.match(name)
        if m.group(1) == stem:
            top = max(top, int(m.group(3) or 0))
    return f"{stem}'{top + 1}"


def alpha_equal(a: Term, b: Term) -> bool:
    """Equality up to renaming of bound variables."""

    def resolve(scope, name):
        for n, q, k in reversed(scope):
            if n == name:
                return k
        return None

    def go(x, y, sx, sy, depth):
        # sx, sy: (name, qualifier, binder index) stacks
        if type(x) is not type(y):
            return False
        if isinstance(x, Var):
            ix, iy = resolve(sx, x.name), resolve(sy, y.name)
            if ix is None and iy is None:
                return x.name == y.name
            return ix == iy
        if isinstance(x, Lam):
            return x.ty == y.ty and go(x.body, y.body, sx + ((x.var, IMPURE, depth),),
                                       sy + ((y.var, IMPURE, depth),), depth + 1)
        if isinstance(x, LetBox):
            return go(x.bound, y.bound, sx, sy, depth) and go(
                x.body, y.body, sx + ((x.var, SAFE, depth),), sy + ((y.var, SAFE, depth),), depth + 1)
        if isinstance(x, BoxE):
            return go(x.body, y.body, tuple(b for b in sx if b[1] is SAFE),
                      tuple(b for b in sy if b[1] is SAFE), depth)
        if isinstance(x, StrLit):
            return x.text == y.text
        if isinstance(x, ChanLit):
            return x.name == y.name
        return all(go(p, q, sx, sy, depth) for p, q in zip(children(x), children(y)))

    return go(a, b, (), (), 0)


# ---------------------------------------------------------------- contexts


@dataclass(frozen=True)
class Binding:
    name: str
    ty: Type
    qual: Qualifier


@dataclass(frozen=True)
class Context:
    """Ordered variable bindings; the rightmost binding of a name wins."""

    entries: tuple = ()

    def extend(self, name: str, ty: Type, qual: Qualifier) -> "Context":
        return Context(self.entries + (Binding(name, ty, qual),))

    def lookup(self, name: str) -> Optional[Binding]:
        for b in reversed(self.entries):
            if b.name == name:
                return b
        return None

    def names(self) -> list:
        return [b.name for b in self.entries]

    def purify(self) -> "Context":
        return purify_ctx(self)

    def __iter__(self) -> Iterator[Binding]:
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @classmethod
    def of(cls, *triples) -> "Context":
        return cls(tuple(Binding(n, t, q) for n, t, q in triples))


def purify_ctx(g: Context) -> Context:
    return Context(tuple(b for b in g.entries if b.qual is SAFE))


@dataclass(frozen=True)
class SubstEntry:
    name: str
    term: Term
    qual: Qualifier


@dataclass(frozen=True)
class Subst:
    entries: tuple = ()

    def extend(self, name: str, term: Term, qual: Qualifier) -> "Subst":
        return Subst(self.entries + (SubstEntry(name, term, qual),))

    def purify(self) -> "Subst":
        return purify_subst(self)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @classmethod
    def of(cls, *triples) -> "Subst":
        return cls(tuple(SubstEntry(n, e, q) for n, e, q in triples))


def purify_subst(t: Subst) -> Subst:
    return Subst(tuple(s for s in t.entries if s.qual is SAFE))


def identity_subst(g: Context) -> Subst:
    return Subst(tuple(SubstEntry(b.name, Var(b.name), b.qual) for b in g.entries))


# ---------------------------------------------------------------- evaluation contexts


class CtxKind(enum.Enum):
    SAFE = "C"
    IMPURE = "E"


# Frames, listed outermost first in an EvalCtx.  Field names say what
# surrounds the hole.


@dataclass(frozen=True)
class AppLeft:
    arg: Term  # hole is the function


@dataclass(frozen=True)
class AppRight:
    fn: Term  # hole is the argument


@dataclass(frozen=True)
class LamBody:
    var: str
    ty: Type


@dataclass(frozen=True)
class FstF:
    pass


@dataclass(frozen=True)
class SndF:
    pass


@dataclass(frozen=True)
class PairLeft:
    right: Term  # hole is the left component


@dataclass(frozen=True)
class PairRight:
    left: Term  # hole is the right component


@dataclass(frozen=True)
class BoxF:
    pass


@dataclass(frozen=True)
class LetBoxScrut:
    var: str
    body: Term


@dataclass(frozen=True)
class LetBoxBody:
    var: str
    bound: Term


Frame = Union[AppLeft, AppRight, LamBody, FstF, SndF, PairLeft, PairRight, BoxF, LetBoxScrut, LetBoxBody]


class BadContext(ValueError):
    pass


@dataclass(frozen=True)
class EvalCtx:
    kind: CtxKind
    frames: tuple = ()

    def __post_init__(self):
        if self.kind is CtxKind.IMPURE:
            for f in self.frames:
                problem = _impure_frame_problem(f)
                if problem:
                    raise BadContext(problem)

    def bound_names(self) -> set:
        return {f.var for f in self.frames if isinstance(f, (LamBody, LetBoxScrut, LetBoxBody))}


def _impure_frame_problem(f) -> Optional[str]:
    if isinstance(f, (LamBody, BoxF)):
        return f"{type(f).__name__} frame is not an impure evaluation position"
    if isinstance(f, AppLeft) and not is_value(f.arg):
        return "function-position hole needs a value argument"
    if isinstance(f, PairLeft) and not is_value(f.right):
        return "left-component hole needs a value on the right"
    if isinstance(f, LetBoxBody) and not is_value(f.bound):
        return "let-box body hole needs a value scrutinee"
    return None


def plug(c: EvalCtx, e: Term) -> Term:
    for f in reversed(c.frames):
        e = _plug_frame(f, e)
    return e


def _plug_frame(f: Frame, e: Term) -> Term:
    if isinstance(f, AppLeft):
        return App(e, f.arg)
    if isinstance(f, AppRight):
        return App(f.fn, e)
    if isinstance(f, LamBody):
        return Lam(f.var, f.ty, e)
    if isinstance(f, FstF):
        return Fst(e)
    if isinstance(f, SndF):
        return Snd(e)
    if isinstance(f, PairLeft):
        return Pair(e, f.right)
    if isinstance(f, PairRight):
        return Pair(f.left, e)
    if isinstance(f, BoxF):
        return BoxE(e)
    if isinstance(f, LetBoxScrut):
        return LetBox(f.var, e, f.body)
    if isinstance(f, LetBoxBody):
        return LetBox(f.var, f.bound, e)
    raise TypeError(f"not a frame: {f!r}")


def hole() -> EvalCtx:
    return EvalCtx(CtxKind.IMPURE)


def seq(e1: Term, e2: Term) -> Term:
    """``e1; e2`` as ``(fun _: unit -> e2) e1``."""
    x = fresh_name("_", free_vars(e2))
    return App(Lam(x, UNIT, e2), e1)
