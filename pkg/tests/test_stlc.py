import random

import pytest
from hypothesis import given, settings, strategies as st

from capcalc.parser import parse_term, parse_type, show
from capcalc.stlc import (
    SUNIT, NotStlc, SApp, SArrow, SLam, SUnitLit, SVar, StlcTypeError, beta_eta_equal,
    check_embedding_suite, embed, embed_ctx, embed_type, from_core, gen_stlc_context,
    gen_stlc_term, gen_stlc_type, normalize, parse_stlc, show_stlc, stlc_alpha_equal,
    stlc_eval, stlc_infer, unembed, unembed_type,
)
from capcalc.syntax import CAP, IMPURE, Context, alpha_equal
from capcalc.typecheck import infer

U2U = SArrow(SUNIT, SUNIT)


def test_type_embedding_boxes_arguments():
    assert embed_type(U2U) == parse_type("[]unit -> unit")
    assert embed_type(SArrow(U2U, SUNIT)) == parse_type("[]([]unit -> unit) -> unit")


@pytest.mark.parametrize("src,expected", [
    ("()", "()"),
    ("fun x: unit -> x", "fun z: []unit -> let box x = z in x"),
    ("(fun x: unit -> x) ()", "(fun z: []unit -> let box x = z in x) (box ())"),
])
def test_embed(src, expected):
    assert alpha_equal(embed(parse_stlc(src)), parse_term(expected))


def test_embedding_avoids_the_argument_name():
    e = embed(parse_stlc("fun z: unit -> z"))
    assert e.var != "z"
    assert infer(Context(), e) == parse_type("[]unit -> unit")


def test_unembed_forgets_boxes_and_effects():
    g = Context.of(("c", CAP, IMPURE))
    e = parse_term('fun b: []unit -> let box x = b in c.print("s")')
    back = unembed(e, g)
    assert stlc_alpha_equal(back, SLam("b", U2U.dom, SApp(SLam("x", SUNIT, SUnitLit()), SVar("b"))))
    assert unembed_type(parse_type("[]str -> cap")) == U2U


def test_unembed_rejects_products():
    with pytest.raises(NotStlc):
        unembed(parse_term("((), ())"))
    with pytest.raises(NotStlc):
        unembed_type(parse_type("unit * unit"))


def test_stlc_typing():
    assert stlc_infer((), parse_stlc("fun f: unit -> unit -> f ()")) == SArrow(U2U, SUNIT)
    with pytest.raises(StlcTypeError):
        stlc_infer((), parse_stlc("() ()"))


def test_parse_rejects_non_stlc():
    with pytest.raises(NotStlc):
        parse_stlc('"s"')


def test_evaluation():
    assert stlc_eval(parse_stlc("(fun f: unit -> unit -> f ()) (fun x: unit -> x)")) == SUnitLit()


@pytest.mark.parametrize("g,src,expected", [
    ((), "(fun x: unit -> x) ()", "()"),
    ((("f", U2U),), "f", "fun x: unit -> f x"),
    ((("f", U2U),), "fun y: unit -> f ((fun w: unit -> w) y)", "fun x: unit -> f x"),
])
def test_normal_forms(g, src, expected):
    assert stlc_alpha_equal(normalize(g, parse_stlc(src)), parse_stlc(expected))


def test_distinct_normal_forms_are_distinguished():
    g = (("f", SArrow(SUNIT, U2U)),)
    assert not beta_eta_equal(g, parse_stlc("f ()"), parse_stlc("fun x: unit -> f () ()"))
    assert beta_eta_equal(g, parse_stlc("f ()"), parse_stlc("fun x: unit -> f () x"))


def test_show_round_trips():
    e = parse_stlc("fun f: unit -> unit -> f ()")
    assert stlc_alpha_equal(parse_stlc(show_stlc(e)), e)
    assert stlc_alpha_equal(from_core(parse_term(show_stlc(e))), e)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_embedding_preserves_types(seed):
    rng = random.Random(seed)
    g = gen_stlc_context(rng, 2)
    ty = gen_stlc_type(rng, 2)
    e = gen_stlc_term(rng, g, ty, 4)
    assert stlc_infer(g, e) == ty
    assert infer(embed_ctx(g), embed(e)) == embed_type(ty)
    assert beta_eta_equal(g, unembed(embed(e), embed_ctx(g)), e)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_normalization_is_idempotent(seed):
    rng = random.Random(seed)
    g = gen_stlc_context(rng, 2)
    e = gen_stlc_term(rng, g, gen_stlc_type(rng, 2), 4)
    n = normalize(g, e)
    assert stlc_alpha_equal(normalize(g, n), n)


def test_small_embedding_suite():
    rep = check_embedding_suite(seed=3, instances=60, eq_instances=30)
    assert rep.ok, [(l.check, l.detail) for l in rep.failures()]
    assert {l.check for l in rep.lines} >= {"typing", "forgetful", "equality", "conservative"}
