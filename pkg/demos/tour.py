"""A short walk through the toolkit: typing, running, weighing, the box
modality, equational checks and the finite model.

    python demos/tour.py
"""
from capcalc.equational import Verdict, denot_equal
from capcalc.gen import channel_context
from capcalc.interp import render_output, run
from capcalc.modellab import Writer, monoid_by_name, noncommutativity_witness, space_terminal
from capcalc.parser import parse, parse_term, parse_type, show_type
from capcalc.syntax import Context
from capcalc.typecheck import ImpureInSafe, infer
from capcalc.weights import render_capset, weigh_program


def section(title):
    print(f"\n== {title}")


section("capabilities are passed, never conjured")
src = parse('cap log\nmain = (fun c: cap -> c.print("hi")) log')
print("type:", show_type(infer(Context(), parse_term('fun c: cap -> c.print("hi")'))))
value, out = run(src, {"log": "stderr"})
print(render_output(out), end="")

section("weights")
for text in ('cap c\nmain = fun d: cap -> c.print("x")', "main = fun d: cap -> d"):
    vw, ew = weigh_program(parse(text), {"c": "c"})
    print(f"{text.splitlines()[-1]:40} value {render_capset(vw)} effects {render_capset(ew)}")

section("box only admits code that owns nothing")
try:
    infer(Context(), parse_term("fun c: cap -> box c"))
except ImpureInSafe as exc:
    print("rejected:", exc)
print("accepted:", show_type(infer(Context(), parse_term("box (fun c: cap -> c)"))))

section("effect order is observable")
g = channel_context(("c",))
res = denot_equal(g, parse_term('(c.print("a"), c.print("b"))'),
                  parse_term('(c.print("b"), c.print("a"))'), parse_type("unit * unit"))
assert res.verdict is Verdict.DISTINGUISHED
print(res.witness.describe())

section("the same fact in the finite model")
wr = Writer(monoid_by_name("trunc2"), ("c",))
one = space_terminal(("c",))
print(noncommutativity_witness(wr, one, one))
