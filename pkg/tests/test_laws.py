import pytest

from capcalc.equational import Rule
from capcalc.laws import Line, coherence_lines, embed_suite, eq_suite, model_suite, run_suites


def test_line_format():
    assert Line("eq", "x1-beta", 3, True).text() == "PASS eq/x1-beta/0003"
    assert Line("eq", "x1-beta", 3, False, "why").text() == "FAIL eq/x1-beta/0003  why"
    assert '"status": "FAIL"' in Line("m", "g", 0, False).json()


def test_eq_suite_covers_every_rule_and_both_violation_families():
    lines = list(eq_suite(seed=5, instances=3))
    groups = {l.group for l in lines}
    assert {r.value for r in Rule} <= groups
    assert {g for g in groups if g.startswith("violation")} == {
        "violation-print-duplication", "violation-suspended-print"}
    assert all(l.ok for l in lines), [l.text() for l in lines if not l.ok]


def test_embed_suite_small():
    lines = list(embed_suite(seed=2, instances=20, eq_instances=10))
    assert lines and all(l.ok for l in lines)


def test_model_suite_is_clean():
    lines = list(model_suite(seed=1, programs=20))
    bad = [l.text() for l in lines if not l.ok]
    assert not bad
    groups = {l.group for l in lines}
    for g in ("constructions", "ccc-1", "tensor-hom-1", "monad-trunc2", "comonad-2", "exceptions", "state"):
        assert g in groups


def test_trunc2_witness_is_reported():
    lines = [l for l in model_suite(seed=0, monoids=("trunc2",), programs=1) if l.group == "monad-trunc2"]
    assert any("order of effects is observable" in l.detail and l.ok for l in lines)


def test_coherence_with_the_model():
    assert all(l.ok for l in coherence_lines(seed=3, programs=100))


def test_runner_sorts_and_rejects_unknown_suites():
    lines = run_suites(("model", "eq"), seed=0, instances=2)
    assert lines == sorted(lines, key=Line.key)
    with pytest.raises(ValueError):
        run_suites(("nope",), seed=0)
