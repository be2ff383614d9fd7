import random

import pytest
from hypothesis import given, settings, strategies as st

from capcalc.gen import TermGen, gen_context, gen_subst, gen_term, gen_type, gen_weakening
from capcalc.parser import parse_term, parse_type
from capcalc.subst import apply_subst
from capcalc.syntax import (
    CAP, IMPURE, SAFE, STR, UNIT, Arrow, Box, ChanLit, Context, Subst, UnitLit, Var, purify_ctx,
)
from capcalc.typecheck import (
    CapTypeError, ImpureInSafe, Mismatch, NotBox, NotFunction, NotProduct, Unbound,
    check_subst, check_weakening, infer, infer_safe, lookup, subst_problem,
)

A, B = UNIT, STR


def test_lookup():
    assert lookup(Context.of(("x", UNIT, IMPURE)), "x") == (UNIT, IMPURE)
    assert lookup(Context.of(("x", UNIT, IMPURE), ("y", STR, SAFE)), "x") == (UNIT, IMPURE)
    assert lookup(Context.of(("x", UNIT, IMPURE), ("x", STR, SAFE)), "x") == (STR, SAFE)
    with pytest.raises(Unbound):
        lookup(Context(), "x")


@pytest.mark.parametrize("src,ty", [
    ("fun x: []unit -> let box y = x in box y", "[]unit -> []unit"),
    ("fun f: [](unit -> unit) -> fun x: []unit -> let box g = f in let box y = x in box (g y)",
     "[](unit -> unit) -> []unit -> []unit"),
    ("fun b: []str -> let box x = b in x", "[]str -> str"),
    ("fun b: []str -> let box x = b in box (box x)", "[]str -> [][]str"),
    ('fun c: cap -> c.print("hello")', "cap -> unit"),
    ('box (fun d: cap -> d.print("h"))', "[](cap -> unit)"),
    ("((), fst ((), \"s\"))", "unit * unit"),
])
def test_accepted(src, ty):
    assert infer(Context(), parse_term(src)) == parse_type(ty)


@pytest.mark.parametrize("src,name", [
    ("fun x: unit -> box x", "x"),
    ("fun f: unit -> unit -> fun x: []unit -> let box y = x in box (f y)", "f"),
    ('fun c: cap -> box (c.print("a"))', "c"),
])
def test_impure_in_safe_points_at_the_variable(src, name):
    with pytest.raises(ImpureInSafe) as info:
        infer(Context(), parse_term(src))
    assert info.value.name == name
    assert info.value.at == Var(name)


@pytest.mark.parametrize("src,err", [
    ("x", Unbound),
    ("() ()", NotFunction),
    ("fst ()", NotProduct),
    ("let box x = () in x", NotBox),
    ('(fun x: unit -> x) "s"', Mismatch),
    ('().print("s")', Mismatch),
    ("(); \"s\"", None),
    ('"s"; ()', Mismatch),
])
def test_errors(src, err):
    if err is None:
        assert infer(Context(), parse_term(src)) == STR
    else:
        with pytest.raises(err):
            infer(Context(), parse_term(src))


def test_infer_safe():
    assert infer_safe(Context.of(("x", UNIT, SAFE)), Var("x")) == UNIT
    with pytest.raises(ImpureInSafe):
        infer_safe(Context.of(("x", UNIT, IMPURE)), Var("x"))
    g = Context.of(("c", CAP, IMPURE))
    assert infer_safe(g, parse_term('fun d: cap -> d.print("h")')) == Arrow(CAP, UNIT)


def test_channel_literal_types_at_cap():
    assert infer(Context(), ChanLit("k")) == CAP


def test_shadowed_safe_binding_is_seen_inside_box():
    # the lambda's g is impure and hidden by box, so box g refers to the outer safe g
    g = Context.of(("g", STR, SAFE))
    assert infer(g, parse_term("fun g: unit -> box g")) == Arrow(UNIT, Box(STR))


@pytest.mark.parametrize("g,d,expected", [
    (Context.of(("x", A, SAFE), ("y", B, IMPURE)), Context.of(("x", A, SAFE)), True),
    (Context.of(("x", A, SAFE)), Context.of(("x", A, IMPURE)), False),
    (Context.of(("x", A, SAFE), ("y", B, IMPURE)), Context.of(("y", B, IMPURE), ("x", A, SAFE)), False),
    (Context(), Context(), True),
])
def test_check_weakening(g, d, expected):
    assert check_weakening(g, d) is expected


def test_weakening_is_reflexive():
    g = gen_context(random.Random(3), 4)
    assert check_weakening(g, g)


def test_check_subst_examples():
    c = Context.of(("c", CAP, IMPURE))
    y = Context.of(("y", UNIT, IMPURE))
    assert check_subst(c, Subst(), Context())
    assert not check_subst(c, Subst.of(("y", parse_term('c.print("x")'), IMPURE)), y)
    assert "not a value" in subst_problem(c, Subst.of(("y", parse_term('c.print("x")'), IMPURE)), y)
    assert check_subst(c, Subst.of(("y", UnitLit(), IMPURE)), y)
    # safe slots accept effect-free non-values but not impure variables
    ys = Context.of(("y", UNIT, SAFE))
    assert check_subst(c, Subst.of(("y", parse_term("(fun u: unit -> u) ()"), SAFE)), ys)
    assert not check_subst(Context.of(("u", UNIT, IMPURE)), Subst.of(("y", Var("u"), SAFE)), ys)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_weakening_preserves_types(seed):
    rng = random.Random(seed)
    d = gen_context(rng, 3)
    ty = gen_type(rng, 2)
    e = gen_term(rng, d, ty, 4)
    if e is None:
        return
    assert infer(d, e) == ty
    g = gen_weakening(rng, d)
    assert check_weakening(g, d)
    assert infer(g, e) == ty


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_substitution_preserves_types(seed):
    rng = random.Random(seed)
    d, g = gen_context(rng, 3, "v"), gen_context(rng, 3, "w")
    ty = gen_type(rng, 2)
    e = gen_term(rng, d, ty, 4)
    theta = gen_subst(rng, g, d)
    if e is None or theta is None:
        return
    assert check_subst(g, theta, d)
    assert infer(g, apply_subst(theta, e)) == ty


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_safe_typing_is_stable_under_purification(seed):
    rng = random.Random(seed)
    g = gen_context(rng, 4)
    e = TermGen(rng).term(purify_ctx(g), gen_type(rng, 2), 4)
    if e is None:
        return
    assert infer_safe(g, e) == infer_safe(purify_ctx(g), e)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_qualifier_only_matters_under_box(seed):
    rng = random.Random(seed)
    g = gen_context(rng, 3)
    e = gen_term(rng, g, gen_type(rng, 2), 4)
    if e is None:
        return
    ty = infer(g, e)
    flipped = Context(tuple(type(b)(b.name, b.ty, IMPURE) for b in g.entries))
    try:
        assert infer(flipped, e) == ty
    except ImpureInSafe:
        pass  # a safe variable was used under box


def test_infer_is_deterministic():
    rng = random.Random(11)
    g = gen_context(rng, 3)
    for _ in range(50):
        e = gen_term(rng, g, gen_type(rng, 2), 4)
        if e is not None:
            assert infer(g, e) == infer(g, e)


def test_type_errors_share_a_base_class():
    for cls in (Unbound, Mismatch, ImpureInSafe, NotBox, NotFunction, NotProduct):
        assert issubclass(cls, CapTypeError)
