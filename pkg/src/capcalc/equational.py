"""Directed equational rules, instance generators and a denotational oracle.

``try_rule`` rewrites a term by one rule at the root.  ``denot_equal``
decides nothing: it closes the context with generated values, runs both
sides and compares what comes out, applying functions to generated
arguments.  ``Equal`` therefore means "no counterexample found".
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Any, Optional

from .gen import TermGen, closed_value, closing_env, gen_context, gen_type
from .interp import VBox, VPair, apply_value, eval_term
from .subst import UnboundInSubst, single_subst
from .syntax import (
    IMPURE, SAFE, AppLeft, AppRight, App, Arrow, Box, BoxE, BoxF, CapT, Context, CtxKind,
    EvalCtx, Fst, FstF, Lam, LamBody, LetBox, LetBoxBody, LetBoxScrut, Pair, PairLeft,
    PairRight, Prod, Snd, SndF, StrT, Term, Type, UnitT, Var, all_names, free_vars,
    fresh_name, is_value, plug,
)
from .typecheck import CapTypeError, infer, infer_safe


class Rule(enum.Enum):
    BETA_PROD1 = "x1-beta"
    BETA_PROD2 = "x2-beta"
    ETA_PROD = "x-eta"
    BETA_ARROW = "=>-beta"
    ETA_ARROW_IMPURE = "=>-eta-impure"
    ETA_ARROW_SAFE = "=>-eta-safe"
    BETA_BOX = "box-beta"
    ETA_BOX_SAFE = "box-eta-safe"
    ETA_BOX_IMPURE = "box-eta-impure"

    def __str__(self):
        return self.value


BETA_RULES = (Rule.BETA_PROD1, Rule.BETA_PROD2, Rule.BETA_ARROW, Rule.BETA_BOX)


@dataclass(frozen=True)
class EqInstance:
    ctx: Context
    lhs: Term
    rhs: Term
    ty: Type
    rule: Rule
    witness: Any = None  # the evaluation context for box-eta instances


class EtaBoxError(ValueError):
    """A box-eta precondition failed."""


def _try_infer(g, e, safe=False) -> Optional[Type]:
    try:
        return infer_safe(g, e) if safe else infer(g, e)
    except CapTypeError:
        return None


# ---------------------------------------------------------------- contexts


def hole_context(c: EvalCtx, g: Context) -> Context:
    """The typing context in force at the hole of ``c``."""
    for f in c.frames:
        if isinstance(f, LamBody):
            g = g.extend(f.var, f.ty, IMPURE)
        elif isinstance(f, BoxF):
            g = g.purify()
        elif isinstance(f, LetBoxBody):
            tb = infer(g, f.bound)
            if not isinstance(tb, Box):
                raise EtaBoxError("let-box frame scrutinee is not boxed")
            g = g.extend(f.var, tb.body, SAFE)
    return g


def unplug(c: EvalCtx, t: Term) -> Optional[Term]:
    """The subterm of ``t`` sitting at the hole of ``c``, if ``t`` has that shape."""
    for f in c.frames:
        if isinstance(f, AppLeft) and isinstance(t, App) and t.arg == f.arg:
            t = t.fn
        elif isinstance(f, AppRight) and isinstance(t, App) and t.fn == f.fn:
            t = t.arg
        elif isinstance(f, LamBody) and isinstance(t, Lam) and (t.var, t.ty) == (f.var, f.ty):
            t = t.body
        elif isinstance(f, FstF) and isinstance(t, Fst):
            t = t.body
        elif isinstance(f, SndF) and isinstance(t, Snd):
            t = t.body
        elif isinstance(f, PairLeft) and isinstance(t, Pair) and t.right == f.right:
            t = t.left
        elif isinstance(f, PairRight) and isinstance(t, Pair) and t.left == f.left:
            t = t.right
        elif isinstance(f, BoxF) and isinstance(t, BoxE):
            t = t.body
        elif isinstance(f, LetBoxScrut) and isinstance(t, LetBox) and (t.var, t.body) == (f.var, f.body):
            t = t.bound
        elif isinstance(f, LetBoxBody) and isinstance(t, LetBox) and (t.var, t.bound) == (f.var, f.bound):
            t = t.body
        else:
            return None
    return t


def eta_box_expand(kind: CtxKind, c: EvalCtx, e: Term, g: Context) -> Term:
    """``let box x = e in c<box x>``, after checking the rule's premises."""
    if kind is CtxKind.IMPURE and c.kind is not CtxKind.IMPURE:
        raise EtaBoxError("impure box-eta needs an impure evaluation context")
    te = _try_infer(g, e, safe=kind is CtxKind.SAFE)
    if not isinstance(te, Box):
        why = "safe" if kind is CtxKind.SAFE else "well-typed"
        raise EtaBoxError(f"expanded expression must be {why} at a box type")
    clash = free_vars(e) & c.bound_names()
    if clash:
        raise EtaBoxError(f"context binds {sorted(clash)} free in the expression")
    lhs = plug(c, e)
    ty = _try_infer(g, lhs)
    if ty is None:
        raise EtaBoxError("plugged context does not typecheck")
    x = fresh_name("x", all_names(lhs) | set(g.names()))
    rhs = LetBox(x, e, plug(c, BoxE(Var(x))))
    if _try_infer(g, rhs) != ty:
        raise EtaBoxError("expanded term does not typecheck at the same type")
    return rhs


# ---------------------------------------------------------------- rules


def try_rule(r: Rule, e: Term, g: Context, ctx: Optional[EvalCtx] = None,
             check_side_conditions: bool = True) -> Optional[Term]:
    """Rewrite ``e`` by ``r`` at the root, or None if it does not apply.

    With ``check_side_conditions=False`` the value and safety premises are
    skipped; the result is then not necessarily an equation.
    """
    chk = check_side_conditions
    if r in (Rule.BETA_PROD1, Rule.BETA_PROD2):
        if isinstance(e, (Fst if r is Rule.BETA_PROD1 else Snd)) and isinstance(e.body, Pair):
            p = e.body
            if chk and not (is_value(p.left) and is_value(p.right)):
                return None
            return p.left if r is Rule.BETA_PROD1 else p.right
        return None
    if r is Rule.ETA_PROD:
        if chk and not is_value(e):
            return None
        return Pair(Fst(e), Snd(e)) if isinstance(_try_infer(g, e), Prod) else None
    if r is Rule.BETA_ARROW:
        if not (isinstance(e, App) and isinstance(e.fn, Lam)):
            return None
        if chk and not is_value(e.arg):
            return None
        try:
            return single_subst(e.arg, IMPURE, e.fn.var, e.fn.body, g)
        except UnboundInSubst:
            return None
    if r in (Rule.ETA_ARROW_IMPURE, Rule.ETA_ARROW_SAFE):
        if chk and r is Rule.ETA_ARROW_IMPURE and not is_value(e):
            return None
        ty = _try_infer(g, e, safe=chk and r is Rule.ETA_ARROW_SAFE)
        if not isinstance(ty, Arrow):
            return None
        x = fresh_name("x", all_names(e) | set(g.names()))
        return Lam(x, ty.dom, App(e, Var(x)))
    if r is Rule.BETA_BOX:
        if not (isinstance(e, LetBox) and isinstance(e.bound, BoxE)):
            return None
        if chk and _try_infer(g.purify(), e.bound.body) is None:
            return None
        try:
            return single_subst(e.bound.body, SAFE, e.var, e.body, g)
        except UnboundInSubst:
            return None
    if r in (Rule.ETA_BOX_SAFE, Rule.ETA_BOX_IMPURE):
        if ctx is None:
            return None
        focus = unplug(ctx, e)
        if focus is None:
            return None
        kind = CtxKind.SAFE if r is Rule.ETA_BOX_SAFE else CtxKind.IMPURE
        if not chk:
            x = fresh_name("x", all_names(e) | set(g.names()))
            return LetBox(x, focus, plug(ctx, BoxE(Var(x))))
        try:
            return eta_box_expand(kind, ctx, focus, g)
        except (EtaBoxError, CapTypeError):
            return None
    raise ValueError(r)


# ---------------------------------------------------------------- oracle


class Verdict(enum.Enum):
    EQUAL = "Equal"
    DISTINGUISHED = "Distinguished"
    EXHAUSTED = "Exhausted"


@dataclass
class Witness:
    env: Any
    trail: list = field(default_factory=list)  # arguments applied, outermost first
    left: Any = None
    right: Any = None

    def describe(self) -> str:
        from .interp import reify
        from .parser import show

        binds = ", ".join(f"{b.name}={show(reify(b.value))}" for b in self.env)
        args = " ".join(show(reify(a), 3) for a in self.trail)
        return f"env[{binds}] args[{args}] left={self.left!r} right={self.right!r}"


@dataclass
class EqResult:
    verdict: Verdict
    witness: Optional[Witness] = None

    def __bool__(self):
        return self.verdict is Verdict.EQUAL


def _differ(ty: Type, r1, r2, rng, budget, trail) -> Optional[tuple]:
    """First observable difference between two (value, output) results."""
    (v1, o1), (v2, o2) = r1, r2
    if dict(o1) != dict(o2):
        return dict(o1), dict(o2)
    return _differ_value(ty, v1, v2, rng, budget, trail)


def _differ_value(ty, v1, v2, rng, budget, trail) -> Optional[tuple]:
    if isinstance(ty, (UnitT, StrT, CapT)):
        return None if v1 == v2 else (v1, v2)
    if isinstance(ty, Prod):
        assert isinstance(v1, VPair) and isinstance(v2, VPair)
        return (_differ_value(ty.left, v1.left, v2.left, rng, budget, trail)
                or _differ_value(ty.right, v1.right, v2.right, rng, budget, trail))
    if isinstance(ty, Box):
        assert isinstance(v1, VBox) and isinstance(v2, VBox)
        return _differ_value(ty.body, v1.payload, v2.payload, rng, budget, trail)
    if isinstance(ty, Arrow):
        for _ in range(budget):
            a = closed_value(rng, ty.dom, safe=False)
            if a is None:
                continue
            trail.append(a)
            d = _differ(ty.cod, apply_value(v1, a), apply_value(v2, a), rng, budget, trail)
            if d is not None:
                return d
            trail.pop()
        return None
    raise TypeError(ty)


def denot_equal(g: Context, e1: Term, e2: Term, ty: Type, budget: int = 4,
                rng: Optional[random.Random] = None, seed: int = 0) -> EqResult:
    rng = rng or random.Random(seed)
    closed = 0
    for _ in range(budget):
        env = closing_env(rng, g)
        if env is None:
            continue
        closed += 1
        trail: list = []
        d = _differ(ty, eval_term(env, e1), eval_term(env, e2), rng, budget, trail)
        if d is not None:
            return EqResult(Verdict.DISTINGUISHED, Witness(env, trail, d[0], d[1]))
    return EqResult(Verdict.EQUAL if closed else Verdict.EXHAUSTED)


# ---------------------------------------------------------------- normalization


@dataclass(frozen=True)
class Normalized:
    term: Term
    steps: int
    exhausted: bool  # fuel ran out before a normal form was reached


def _beta_step(g: Context, e: Term) -> Optional[Term]:
    # innermost first, visiting subterms in evaluation order
    if isinstance(e, App):
        r = _beta_step(g, e.arg)
        if r is not None:
            return App(e.fn, r)
        if is_value(e.arg):
            r = _beta_step(g, e.fn)
            if r is not None:
                return App(r, e.arg)
    elif isinstance(e, Pair):
        r = _beta_step(g, e.right)
        if r is not None:
            return Pair(e.left, r)
        if is_value(e.right):
            r = _beta_step(g, e.left)
            if r is not None:
                return Pair(r, e.right)
    elif isinstance(e, (Fst, Snd)):
        r = _beta_step(g, e.body)
        if r is not None:
            return type(e)(r)
    elif isinstance(e, LetBox):
        r = _beta_step(g, e.bound)
        if r is not None:
            return LetBox(e.var, r, e.body)
        tb = _try_infer(g, e.bound) if is_value(e.bound) else None
        if isinstance(tb, Box):
            r = _beta_step(g.extend(e.var, tb.body, SAFE), e.body)
            if r is not None:
                return LetBox(e.var, e.bound, r)
    for rule in BETA_RULES:
        r = try_rule(rule, e, g)
        if r is not None:
            return r
    return None


def rewrite_normalize(g: Context, e: Term, fuel: int = 1000, check: bool = False,
                      rng: Optional[random.Random] = None) -> Normalized:
    """Apply beta rules at impure evaluation positions until none fires.

    With ``check`` every step is compared against the previous term with
    :func:`denot_equal` and a difference raises ``AssertionError``.
    """
    ty = infer(g, e) if check else None
    rng = rng or random.Random(0)
    steps = 0
    while steps < fuel:
        nxt = _beta_step(g, e)
        if nxt is None:
            return Normalized(e, steps, False)
        if check:
            res = denot_equal(g, e, nxt, ty, budget=2, rng=rng)
            assert res.verdict is not Verdict.DISTINGUISHED, res.witness.describe()
        e, steps = nxt, steps + 1
    return Normalized(e, steps, _beta_step(g, e) is not None)


# ---------------------------------------------------------------- instance generation


def gen_eval_ctx(rng: random.Random, g: Context, kind: CtxKind, hole_ty: Type,
                 depth: int = 2, avoid=frozenset()) -> Optional[tuple]:
    """A random evaluation context of ``kind`` around a hole of type ``hole_ty``.

    Returns ``(ctx, result type)``.  Frames are chosen from the hole outward.
    Binder names are fresh, so subterms generated in ``g`` stay well scoped.
    In a safe context a ``box`` frame may be placed; frames inside it have
    their subterms generated in the purified context.
    """
    tg = TermGen(rng)
    n = rng.randint(1, depth) if depth else 0
    box_at = rng.randrange(n) if kind is CtxKind.SAFE and n and rng.random() < 0.5 else None
    taken = set(avoid) | set(g.names())
    frames, ty = [], hole_ty

    def fresh():
        x = fresh_name("w", taken)
        taken.add(x)
        return x

    for k in range(n):
        inside_box = box_at is not None and k < box_at
        gk = g.purify() if inside_box else g
        if k == box_at:
            frames.append(BoxF())
            ty = Box(ty)
            continue
        choices = ["app_right", "pair_left", "pair_right", "letbox_body"]
        if isinstance(ty, Prod):
            choices += ["fst", "snd"]
        if isinstance(ty, Arrow):
            choices += ["app_left"]
        if isinstance(ty, Box):
            choices += ["letbox_scrut"]
        if kind is CtxKind.SAFE:
            choices += ["lam"]
        pick = rng.choice(choices)
        value_only = kind is CtxKind.IMPURE
        other = gen_type(rng, 1)
        sub = None
        if pick == "fst":
            frame, ty = FstF(), ty.left
        elif pick == "snd":
            frame, ty = SndF(), ty.right
        elif pick == "app_right":
            sub = tg.term(gk, Arrow(ty, other), 2)
            frame, ty = AppRight(sub), other
        elif pick == "app_left":
            sub = tg.value(gk, ty.dom, 1) if value_only else tg.term(gk, ty.dom, 2)
            frame, ty = AppLeft(sub), ty.cod
        elif pick == "pair_left":
            sub = tg.value(gk, other, 1) if value_only else tg.term(gk, other, 2)
            frame, ty = PairLeft(sub), Prod(ty, other)
        elif pick == "pair_right":
            sub = tg.term(gk, other, 2)
            frame, ty = PairRight(sub), Prod(other, ty)
        elif pick == "letbox_scrut":
            x = fresh()
            sub = tg.term(gk.extend(x, ty.body, SAFE), other, 2)
            frame, ty = LetBoxScrut(x, sub), other
        elif pick == "letbox_body":
            inner = gen_type(rng, 1)
            sub = tg.value(gk, Box(inner), 1) if value_only else tg.term(gk, Box(inner), 2)
            frame = LetBoxBody(fresh(), sub)
        else:  # lam
            frame, ty = LamBody(fresh(), other), Arrow(other, ty)
        if pick in ("app_right", "app_left", "pair_left", "pair_right", "letbox_scrut", "letbox_body") and sub is None:
            return None
        frames.append(frame)
    frames.reverse()
    return EvalCtx(kind, tuple(frames)), ty


def closed_inhabited(ty: Type, caps: bool = False) -> bool:
    """Conservative test for a closed term of ``ty``; ``caps`` allows channels."""
    if isinstance(ty, CapT):
        return caps
    if isinstance(ty, Prod):
        return closed_inhabited(ty.left, caps) and closed_inhabited(ty.right, caps)
    if isinstance(ty, Arrow):
        return closed_inhabited(ty.cod, caps) or ty.dom == ty.cod
    if isinstance(ty, Box):
        return closed_inhabited(ty.body)
    return True


def instance_context(rng: random.Random) -> Context:
    """A random context that the oracle can always close."""
    while True:
        g = gen_context(rng, rng.randint(0, 3))
        if all(closed_inhabited(b.ty, caps=b.qual is IMPURE) for b in g):
            return g


def _gen_once(rule: Rule, rng: random.Random) -> Optional[EqInstance]:
    g = instance_context(rng)
    tg = TermGen(rng)
    a, b = gen_type(rng, 1), gen_type(rng, 1)
    ctx = None
    if rule in (Rule.BETA_PROD1, Rule.BETA_PROD2):
        v1, v2 = tg.value(g, a, 2), tg.value(g, b, 2)
        if v1 is None or v2 is None:
            return None
        lhs = (Fst if rule is Rule.BETA_PROD1 else Snd)(Pair(v1, v2))
    elif rule is Rule.ETA_PROD:
        lhs = tg.value(g, Prod(a, b), 2)
    elif rule is Rule.BETA_ARROW:
        x = tg.name()
        body = tg.term(g.extend(x, a, IMPURE), b, 3)
        v = tg.value(g, a, 2)
        if body is None or v is None:
            return None
        lhs = App(Lam(x, a, body), v)
    elif rule is Rule.ETA_ARROW_IMPURE:
        lhs = tg.value(g, Arrow(a, b), 2)
    elif rule is Rule.ETA_ARROW_SAFE:
        lhs = tg.term(g.purify(), Arrow(a, b), 3)
    elif rule is Rule.BETA_BOX:
        x = tg.name()
        e1 = tg.term(g.purify(), a, 3)
        e2 = tg.term(g.extend(x, a, SAFE), b, 3)
        if e1 is None or e2 is None:
            return None
        lhs = LetBox(x, BoxE(e1), e2)
    else:
        kind = CtxKind.SAFE if rule is Rule.ETA_BOX_SAFE else CtxKind.IMPURE
        e = tg.term(g.purify() if kind is CtxKind.SAFE else g, Box(a), 3)
        if e is None:
            return None
        made = gen_eval_ctx(rng, g, kind, Box(a), 3, avoid=all_names(e))
        if made is None:
            return None
        ctx = made[0]
        lhs = plug(ctx, e)
    if lhs is None:
        return None
    ty = _try_infer(g, lhs)
    if ty is None:
        return None
    rhs = try_rule(rule, lhs, g, ctx=ctx)
    if rhs is None:
        return None
    return EqInstance(g, lhs, rhs, ty, rule, ctx)


def gen_instance(rule: Rule, rng: random.Random, tries: int = 200) -> EqInstance:
    for _ in range(tries):
        inst = _gen_once(rule, rng)
        if inst is not None:
            return inst
    raise RuntimeError(f"could not generate an instance of {rule}")


# ---------------------------------------------------------------- side-condition violations


def print_duplication_instance(rng: random.Random) -> EqInstance:
    """Beta with an effectful operand: ``(fun x: unit -> x; x) (c.print(s))``."""
    from .gen import CHANNELS, channel_context
    from .syntax import UNIT, Print, StrLit, seq

    c = rng.choice(CHANNELS)
    s = rng.choice(["a", "b", "hi"])
    x = "x"
    lhs = App(Lam(x, UNIT, seq(Var(x), Var(x))), Print(Var(c), StrLit(s)))
    g = channel_context()
    rhs = try_rule(Rule.BETA_ARROW, lhs, g, check_side_conditions=False)
    return EqInstance(g, lhs, rhs, UNIT, Rule.BETA_ARROW)


def suspended_print_instance(rng: random.Random) -> EqInstance:
    """Eta on a non-value: ``c.print(s); fun x: unit -> x``."""
    from .gen import CHANNELS, channel_context
    from .syntax import UNIT, Print, StrLit, seq

    c = rng.choice(CHANNELS)
    s = rng.choice(["a", "b", "hi"])
    lhs = seq(Print(Var(c), StrLit(s)), Lam("x", UNIT, Var("x")))
    g = channel_context()
    rhs = try_rule(Rule.ETA_ARROW_IMPURE, lhs, g, check_side_conditions=False)
    return EqInstance(g, lhs, rhs, Arrow(UNIT, UNIT), Rule.ETA_ARROW_IMPURE)


def check_instance(inst: EqInstance, budget: int = 4, seed: int = 0) -> EqResult:
    return denot_equal(inst.ctx, inst.lhs, inst.rhs, inst.ty, budget, seed=seed)
