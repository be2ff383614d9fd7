import random

import pytest
from hypothesis import given, settings, strategies as st

from capcalc.gen import TermGen, channel_context, channel_env, gen_program, gen_type
from capcalc.interp import Env, VBox, VChan, VPair, VStr, VUnit, apply_value, eval_term
from capcalc.parser import parse, parse_term
from capcalc.syntax import IMPURE, Arrow
from capcalc.weights import BoxWeightViolation, render_capset, weigh_program, weight_of, weight_of_output


def test_value_weights():
    assert weight_of(VUnit()) == set()
    assert weight_of(VStr("s")) == set()
    assert weight_of(VChan("stdout")) == {"stdout"}
    assert weight_of(VPair(VChan("c1"), VChan("c2"))) == {"c1", "c2"}
    assert weight_of(VBox(VUnit())) == set()


def test_box_holding_a_channel_is_a_bug():
    with pytest.raises(BoxWeightViolation):
        weight_of(VBox(VChan("c")))


@pytest.mark.parametrize("src,expected", [
    ("fun c: cap -> c.print(\"hello\")", set()),
    ("fun c: cap -> stdout.print(\"hello\")", {"stdout"}),
    ("fun c: cap -> ()", set()),
    ("fun c: cap -> c", set()),
    ("(c1, c2)", {"c1", "c2"}),
    ("fun u: unit -> fst (c1, c2)", {"c1", "c2"}),
])
def test_closure_weights(src, expected):
    env = Env.of(*((c, VChan(c), IMPURE) for c in ("stdout", "c1", "c2")))
    v, _ = eval_term(env, parse_term(src))
    assert weight_of(v) == expected


@pytest.mark.parametrize("out,expected", [
    ({}, set()),
    ({"c": "a"}, {"c"}),
    ({"c": "a", "d": "b"}, {"c", "d"}),
])
def test_output_weights(out, expected):
    assert weight_of_output(out) == expected


@pytest.mark.parametrize("src,expected", [
    ("main = fun c: cap -> c", (set(), set())),
    ('cap stdout\nmain = stdout.print("x")', (set(), {"stdout"})),
    ("cap stdout\nmain = stdout", ({"stdout"}, set())),
])
def test_weigh_program(src, expected):
    assert weigh_program(parse(src), {"stdout": "stdout"}) == expected


def test_weights_name_bound_channels():
    assert weigh_program(parse("cap stdout\nmain = stdout"), {"stdout": "fd1"}) == ({"fd1"}, set())


def test_render():
    assert render_capset(frozenset({"b", "a"})) == "{a, b}"
    assert render_capset(frozenset()) == "{}"


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_functions_use_only_what_they_own_and_receive(seed):
    rng = random.Random(seed)
    gen = TermGen(rng)
    ty = Arrow(gen_type(rng, 1), gen_type(rng, 1))
    f = gen.term(channel_context(), ty, 4)
    a = gen.value(channel_context(), ty.dom, 2)
    if f is None or a is None:
        return
    fv, _ = eval_term(channel_env(), f)
    av, _ = eval_term(channel_env(), a)
    r, out = apply_value(fv, av)
    assert weight_of(r) | weight_of_output(out) <= weight_of(fv) | weight_of(av)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_safe_terms_weigh_nothing(seed):
    rng = random.Random(seed)
    g = channel_context().extend("s", gen_type(rng, 1), IMPURE)
    e = TermGen(rng).term(g.purify(), gen_type(rng, 2), 4)
    if e is None:
        return
    v, out = eval_term(channel_env(), e)
    assert weight_of(v) == set() and out == {}


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_program_weight_is_bounded_by_the_channels(seed):
    e, _ = gen_program(random.Random(seed))
    v, out = eval_term(channel_env(), e)
    assert weight_of(v) | weight_of_output(out) <= {b.name for b in channel_env()}
