"""The pure simply-typed lambda calculus over ``unit``, its embedding into the
capability calculus and the reverse translation.

Function arguments are embedded under ``box``; the reverse direction forgets
every box and replaces ``print`` by ``()``.  A normalizer by evaluation
(beta-normal, eta-long) serves as the equality oracle on the STLC side.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Union

from . import syntax as core
from .interp import Env, VBox, VClosure, VUnit, apply_value, eval_term
from .syntax import SAFE, Context, all_names, fresh_name

# ---------------------------------------------------------------- syntax


@dataclass(frozen=True)
class SUnit:
    def __str__(self):
        return "unit"


@dataclass(frozen=True)
class SArrow:
    dom: "StlcType"
    cod: "StlcType"


StlcType = Union[SUnit, SArrow]
SUNIT = SUnit()


@dataclass(frozen=True)
class SUnitLit:
    pass


@dataclass(frozen=True)
class SVar:
    name: str


@dataclass(frozen=True)
class SLam:
    var: str
    ty: StlcType
    body: "StlcTerm"


@dataclass(frozen=True)
class SApp:
    fn: "StlcTerm"
    arg: "StlcTerm"


StlcTerm = Union[SUnitLit, SVar, SLam, SApp]

# contexts are tuples of (name, type); the rightmost binding wins
StlcContext = tuple


class StlcTypeError(Exception):
    pass


class NotStlc(ValueError):
    """A core term or type outside the STLC fragment."""


def _lookup(g: StlcContext, x: str):
    for n, t in reversed(g):
        if n == x:
            return t
    return None


def stlc_infer(g: StlcContext, e: StlcTerm) -> StlcType:
    if isinstance(e, SUnitLit):
        return SUNIT
    if isinstance(e, SVar):
        t = _lookup(g, e.name)
        if t is None:
            raise StlcTypeError(f"unbound variable {e.name!r}")
        return t
    if isinstance(e, SLam):
        return SArrow(e.ty, stlc_infer(g + ((e.var, e.ty),), e.body))
    if isinstance(e, SApp):
        tf = stlc_infer(g, e.fn)
        if not isinstance(tf, SArrow):
            raise StlcTypeError("application of a non-function")
        ta = stlc_infer(g, e.arg)
        if ta != tf.dom:
            raise StlcTypeError("argument type mismatch")
        return tf.cod
    raise TypeError(e)


def stlc_free_vars(e: StlcTerm) -> frozenset:
    if isinstance(e, SVar):
        return frozenset([e.name])
    if isinstance(e, SLam):
        return stlc_free_vars(e.body) - {e.var}
    if isinstance(e, SApp):
        return stlc_free_vars(e.fn) | stlc_free_vars(e.arg)
    return frozenset()


def stlc_names(e: StlcTerm) -> set:
    if isinstance(e, SVar):
        return {e.name}
    if isinstance(e, SLam):
        return {e.var} | stlc_names(e.body)
    if isinstance(e, SApp):
        return stlc_names(e.fn) | stlc_names(e.arg)
    return set()


def stlc_subst(v: StlcTerm, x: str, e: StlcTerm) -> StlcTerm:
    """Capture-avoiding ``[v/x]e``."""
    if isinstance(e, SVar):
        return v if e.name == x else e
    if isinstance(e, SUnitLit):
        return e
    if isinstance(e, SApp):
        return SApp(stlc_subst(v, x, e.fn), stlc_subst(v, x, e.arg))
    if isinstance(e, SLam):
        if e.var == x:
            return e
        if e.var in stlc_free_vars(v):
            y = fresh_name(e.var, stlc_names(e.body) | stlc_free_vars(v) | {x})
            return SLam(y, e.ty, stlc_subst(v, x, stlc_subst(SVar(y), e.var, e.body)))
        return SLam(e.var, e.ty, stlc_subst(v, x, e.body))
    raise TypeError(e)


# ---------------------------------------------------------------- conversion to and from core syntax


def to_core_type(t: StlcType) -> core.Type:
    """The STLC type read literally as a core type (no boxes added)."""
    if isinstance(t, SUnit):
        return core.UNIT
    return core.Arrow(to_core_type(t.dom), to_core_type(t.cod))


def to_core(e: StlcTerm) -> core.Term:
    if isinstance(e, SUnitLit):
        return core.UnitLit()
    if isinstance(e, SVar):
        return core.Var(e.name)
    if isinstance(e, SLam):
        return core.Lam(e.var, to_core_type(e.ty), to_core(e.body))
    return core.App(to_core(e.fn), to_core(e.arg))


def from_core_type(t: core.Type) -> StlcType:
    if isinstance(t, core.UnitT):
        return SUNIT
    if isinstance(t, core.Arrow):
        return SArrow(from_core_type(t.dom), from_core_type(t.cod))
    raise NotStlc(f"type outside the STLC fragment: {t}")


def from_core(e: core.Term) -> StlcTerm:
    if isinstance(e, core.UnitLit):
        return SUnitLit()
    if isinstance(e, core.Var):
        return SVar(e.name)
    if isinstance(e, core.Lam):
        return SLam(e.var, from_core_type(e.ty), from_core(e.body))
    if isinstance(e, core.App):
        return SApp(from_core(e.fn), from_core(e.arg))
    raise NotStlc(f"{type(e).__name__} is outside the STLC fragment")


def parse_stlc(text: str) -> StlcTerm:
    from .parser import parse_term

    return from_core(parse_term(text))


def show_stlc(e: StlcTerm) -> str:
    from .parser import show

    return show(to_core(e))


def stlc_alpha_equal(a: StlcTerm, b: StlcTerm) -> bool:
    return core.alpha_equal(to_core(a), to_core(b))


# ---------------------------------------------------------------- embedding


def embed_type(a: StlcType) -> core.Type:
    if isinstance(a, SUnit):
        return core.UNIT
    return core.Arrow(core.Box(embed_type(a.dom)), embed_type(a.cod))


def embed_ctx(g: StlcContext) -> Context:
    return Context.of(*((n, embed_type(t), SAFE) for n, t in g))


def embed(e: StlcTerm) -> core.Term:
    z = "z" if "z" not in stlc_names(e) else fresh_name("z", stlc_names(e))
    return _embed(e, z)


def _embed(e: StlcTerm, z: str) -> core.Term:
    if isinstance(e, SUnitLit):
        return core.UnitLit()
    if isinstance(e, SVar):
        return core.Var(e.name)
    if isinstance(e, SLam):
        return core.Lam(z, core.Box(embed_type(e.ty)), core.LetBox(e.var, core.Var(z), _embed(e.body, z)))
    return core.App(_embed(e.fn, z), core.BoxE(_embed(e.arg, z)))


def unembed_type(a: core.Type) -> StlcType:
    if isinstance(a, (core.UnitT, core.StrT, core.CapT)):
        return SUNIT
    if isinstance(a, core.Box):
        return unembed_type(a.body)
    if isinstance(a, core.Arrow):
        return SArrow(unembed_type(a.dom), unembed_type(a.cod))
    raise NotStlc("products have no STLC counterpart")


def unembed_ctx(g: Context) -> StlcContext:
    return tuple((b.name, unembed_type(b.ty)) for b in g)


def unembed(e: core.Term, g: Context = Context()) -> StlcTerm:
    """Forget boxes and effects.  ``g`` types the free variables of ``e``;
    it is needed to annotate the lambda a ``let box`` turns into."""
    from .typecheck import infer

    if isinstance(e, (core.UnitLit, core.StrLit, core.Print, core.ChanLit)):
        return SUnitLit()
    if isinstance(e, core.Var):
        return SVar(e.name)
    if isinstance(e, core.Lam):
        return SLam(e.var, unembed_type(e.ty), unembed(e.body, g.extend(e.var, e.ty, core.IMPURE)))
    if isinstance(e, core.App):
        return SApp(unembed(e.fn, g), unembed(e.arg, g))
    if isinstance(e, core.BoxE):
        return unembed(e.body, g.purify())
    if isinstance(e, core.LetBox):
        tb = infer(g, e.bound)
        if not isinstance(tb, core.Box):
            raise NotStlc("let box of a non-box")
        body = unembed(e.body, g.extend(e.var, tb.body, SAFE))
        return SApp(SLam(e.var, unembed_type(tb.body), body), unembed(e.bound, g))
    raise NotStlc(f"{type(e).__name__} has no STLC counterpart")


# ---------------------------------------------------------------- evaluation


class FuelExhausted(RuntimeError):
    pass


def stlc_eval(e: StlcTerm, fuel: int = 100_000) -> StlcTerm:
    """Call-by-value evaluation of a closed term to a value."""
    budget = [fuel]

    def go(t):
        budget[0] -= 1
        if budget[0] < 0:
            raise FuelExhausted("evaluation fuel exhausted")
        if isinstance(t, (SUnitLit, SLam)):
            return t
        if isinstance(t, SApp):
            a = go(t.arg)
            f = go(t.fn)
            if not isinstance(f, SLam):
                raise StlcTypeError("application of a non-function")
            # closed values never capture, so plain substitution suffices
            return go(stlc_subst(a, f.var, f.body))
        raise StlcTypeError(f"free variable {t.name!r}")

    return go(e)


# normalization by evaluation: semantic values are python callables for
# functions, the string "()" for unit, and neutral terms wrapped in _Ne


@dataclass(frozen=True)
class _Ne:
    term: StlcTerm


def _reflect(ty: StlcType, n: StlcTerm, ctr):
    if isinstance(ty, SUnit):
        return _Ne(n)
    return lambda v: _reflect(ty.cod, SApp(n, _reify(ty.dom, v, ctr)), ctr)


class _Counter:
    def __init__(self):
        self.n = 0

    def fresh(self):
        self.n += 1
        return f"n{self.n}"


def _reify(ty: StlcType, v, ctr) -> StlcTerm:
    if isinstance(ty, SUnit):
        return v.term if isinstance(v, _Ne) else SUnitLit()
    x = ctr.fresh()
    return SLam(x, ty.dom, _reify(ty.cod, v(_reflect(ty.dom, SVar(x), ctr)), ctr))


def _sem(env: dict, e: StlcTerm):
    if isinstance(e, SUnitLit):
        return "()"
    if isinstance(e, SVar):
        return env[e.name]
    if isinstance(e, SLam):
        return lambda v: _sem({**env, e.var: v}, e.body)
    return _sem(env, e.fn)(_sem(env, e.arg))


def normalize(g: StlcContext, e: StlcTerm) -> StlcTerm:
    """Beta-normal eta-long form; two terms are beta-eta equal iff their forms
    are alpha-equal."""
    ty = stlc_infer(g, e)
    ctr = _Counter()
    env = {n: _reflect(t, SVar(n), ctr) for n, t in g}
    return _reify(ty, _sem(env, e), ctr)


def beta_eta_equal(g: StlcContext, a: StlcTerm, b: StlcTerm) -> bool:
    return stlc_alpha_equal(normalize(g, a), normalize(g, b))


# ---------------------------------------------------------------- generation


STLC_BINDERS = ("x", "y", "w", "f", "h")


def gen_stlc_type(rng: random.Random, depth: int = 2) -> StlcType:
    if depth <= 0 or rng.random() < 0.4:
        return SUNIT
    return SArrow(gen_stlc_type(rng, depth - 1), gen_stlc_type(rng, depth - 1))


def gen_stlc_term(rng: random.Random, g: StlcContext, ty: StlcType, depth: int = 4) -> StlcTerm:
    """Always succeeds: every STLC type is inhabited."""
    vars_ = [SVar(n) for n, t in _visible(g) if t == ty]
    k = rng.random()
    if vars_ and (depth <= 0 or k < 0.3):
        return rng.choice(vars_)
    if depth > 0 and k < 0.6:
        dom = gen_stlc_type(rng, 1)
        return SApp(gen_stlc_term(rng, g, SArrow(dom, ty), depth - 1), gen_stlc_term(rng, g, dom, depth - 1))
    if isinstance(ty, SUnit):
        return SUnitLit()
    x = rng.choice(STLC_BINDERS)
    return SLam(x, ty.dom, gen_stlc_term(rng, g + ((x, ty.dom),), ty.cod, max(depth - 1, 0)))


def _visible(g):
    seen, out = set(), []
    for n, t in reversed(g):
        if n not in seen:
            seen.add(n)
            out.append((n, t))
    return out


def gen_stlc_context(rng: random.Random, size: int = 2) -> StlcContext:
    return tuple((f"v{k}", gen_stlc_type(rng, 2)) for k in range(size))


def gen_beta_eta_pair(rng: random.Random, g: StlcContext, depth: int = 3):
    """``(e1, e2, A)`` related by one beta or eta step, possibly under a congruence."""
    a, b = gen_stlc_type(rng, 2), gen_stlc_type(rng, 2)
    if rng.random() < 0.5:
        x = rng.choice(STLC_BINDERS)
        body = gen_stlc_term(rng, g + ((x, a),), b, depth)
        arg = gen_stlc_term(rng, g, a, depth)
        lhs, rhs, ty = SApp(SLam(x, a, body), arg), stlc_subst(arg, x, body), b
    else:
        e = gen_stlc_term(rng, g, SArrow(a, b), depth)
        x = fresh_name("x", stlc_names(e) | {n for n, _ in g})
        lhs, rhs, ty = e, SLam(x, a, SApp(e, SVar(x))), SArrow(a, b)
    # wrap in a random congruence position
    k = rng.random()
    if k < 0.25:
        fn = gen_stlc_term(rng, g, SArrow(ty, SUNIT), 2)
        return SApp(fn, lhs), SApp(fn, rhs), SUNIT
    if k < 0.5:
        y = fresh_name("y", stlc_names(lhs) | stlc_names(rhs) | {n for n, _ in g})
        t = gen_stlc_type(rng, 1)
        return SLam(y, t, lhs), SLam(y, t, rhs), SArrow(t, ty)
    return lhs, rhs, ty


# ---------------------------------------------------------------- suite


@dataclass
class CheckLine:
    check: str
    index: int
    ok: bool
    detail: str = ""


@dataclass
class EmbeddingReport:
    lines: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(l.ok for l in self.lines)

    def failures(self):
        return [l for l in self.lines if not l.ok]


def _closed_stlc_value(rng, ty):
    return stlc_eval(gen_stlc_term(rng, (), ty, 3))


def corresponds(v, s: StlcTerm, ty: StlcType, rng: random.Random, budget: int = 3) -> bool:
    """Does calculus value ``v`` match STLC value ``s`` once boxes are forgotten?"""
    if isinstance(ty, SUnit):
        return isinstance(v, VUnit) and isinstance(s, SUnitLit)
    if not (isinstance(v, VClosure) and isinstance(s, SLam)):
        return False
    for _ in range(budget):
        a = _closed_stlc_value(rng, ty.dom)
        boxed, out = eval_term(Env(), core.BoxE(embed(a)))
        if out:
            return False
        r, o = apply_value(v, boxed)
        if o or not corresponds(r, stlc_eval(SApp(s, a)), ty.cod, rng, budget):
            return False
    return True


def check_embedding_suite(seed: int = 0, instances: int = 2000, eq_instances: int = 500,
                          budget: int = 3) -> EmbeddingReport:
    from .equational import Verdict, denot_equal
    from .parser import show
    from .typecheck import CapTypeError, infer

    rng = random.Random(seed)
    rep = EmbeddingReport()
    add = rep.lines.append
    for i in range(instances):
        g = gen_stlc_context(rng, rng.randint(0, 2))
        ty = gen_stlc_type(rng, 2)
        e = gen_stlc_term(rng, g, ty, 4)
        got = None
        try:
            got = infer(embed_ctx(g), embed(e))
        except CapTypeError as exc:
            got = exc
        add(CheckLine("typing", i, got == embed_type(ty), show_stlc(e)))
        add(CheckLine("type-roundtrip", i, unembed_type(embed_type(ty)) == ty))
        add(CheckLine("ctx-roundtrip", i, unembed_ctx(embed_ctx(g)) == g))
        back = unembed(embed(e), embed_ctx(g))
        add(CheckLine("unembed-embed", i, beta_eta_equal(g, e, back), show_stlc(back)))
        # closed programs: run the image and compare with the STLC result
        c = gen_stlc_term(rng, (), ty, 4)
        v, out = eval_term(Env(), embed(c))
        add(CheckLine("no-output", i, not out, show(embed(c))))
        add(CheckLine("forgetful", i, corresponds(v, stlc_eval(c), ty, rng, budget), show_stlc(c)))
        add(CheckLine("eval-roundtrip", i,
                      beta_eta_equal((), stlc_eval(c), stlc_eval(unembed(embed(c)))), show_stlc(c)))
    for i in range(eq_instances):
        g = gen_stlc_context(rng, rng.randint(0, 2))
        e1, e2, ty = gen_beta_eta_pair(rng, g)
        ok_src = beta_eta_equal(g, e1, e2)
        res = denot_equal(embed_ctx(g), embed(e1), embed(e2), embed_type(ty), budget, rng=rng)
        add(CheckLine("equality", i, ok_src and res.verdict is Verdict.EQUAL,
                      f"{show_stlc(e1)} ~ {show_stlc(e2)}: {res.verdict.value}"))
        # conservativity: a separation in the big calculus must separate in STLC too
        a = gen_stlc_term(rng, g, ty, 3)
        res2 = denot_equal(embed_ctx(g), embed(e1), embed(a), embed_type(ty), budget, rng=rng)
        add(CheckLine("conservative", i,
                      res2.verdict is not Verdict.DISTINGUISHED or not beta_eta_equal(g, e1, a)))
    return rep
