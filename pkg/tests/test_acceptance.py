"""End-to-end acceptance checks, one test per criterion.

Each test records a ``PASS``/``FAIL`` line (shown in the terminal summary and
printed when the file is run as a script) and then asserts the criterion.
Run directly with ``python tests/test_acceptance.py``.
"""
import io
import random
import re
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from capcalc.cli import main as cli_main
from capcalc.equational import Verdict, check_instance, print_duplication_instance, suspended_print_instance
from capcalc.gen import (
    TermGen, channel_context, channel_env, closing_env, gen_context, gen_first_order_type,
    gen_program, gen_subst, gen_term, gen_type, gen_value, gen_weakening,
)
from capcalc.interp import StrictPurityViolation, eval_term
from capcalc.laws import eq_suite, model_suite
from capcalc.parser import parse, parse_term
from capcalc.stlc import check_embedding_suite
from capcalc.subst import apply_subst, single_subst
from capcalc.syntax import IMPURE, SAFE, Context
from capcalc.typecheck import CapTypeError, check_subst, check_weakening, infer, infer_safe

from oracles import subterms

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"
RESULTS = []


def record(n, name, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {name}" + (f" ({detail})" if detail else "")
    RESULTS.append(line)
    print(line)
    return ok


def _cli(*argv):
    out = io.StringIO()
    code = cli_main(list(argv), out, io.StringIO())
    return code, out.getvalue()


def test_weight_table():
    t0 = time.perf_counter()
    files = sorted((PROGRAMS / "weights").glob("*.cap"))
    mismatches = []
    for f in files:
        text = f.read_text()
        expected = re.search(r"-- expected weight: (\{.*\})", text).group(1)
        binds = [a for c in parse(text).caps for a in ("--bind", f"{c.name}={c.name}")]
        code, out = _cli("weigh", str(f), *binds)
        vw, ew = (set(re.findall(r"\w+", line.split(":", 1)[1])) for line in out.splitlines())
        got = "{" + ", ".join(sorted(vw | ew)) + "}"
        if code != 0 or got != expected:
            mismatches.append(f"{f.name}: {got} != {expected}")
    dt = time.perf_counter() - t0
    ok = len(files) == 7 and not mismatches and dt < 1.0
    assert record(1, "weight table", ok, f"{len(files)} rows, {dt:.2f}s {'; '.join(mismatches)}".strip())


def test_safety_corpus():
    want = {"extract": None, "duplicate": None, "apply": None, "pure": "x", "fmap": "f"}
    good = 0
    for name, var in want.items():
        code, out = _cli("check", str(PROGRAMS / "safety" / f"{name}.cap"))
        if var is None:
            good += code == 0
        else:
            good += code == 1 and out.startswith("ImpureInSafe") and f"at `{var}`" in out
    assert record(2, "accept/reject corpus", good == 5, f"{good}/5 verdicts")


def test_safe_code_prints_nothing():
    t0 = time.perf_counter()
    rng = random.Random(1)
    violations = noisy = safe = 0
    g0, env0 = channel_context(), channel_env()
    for _ in range(10_000):
        e, _ = gen_program(rng)
        try:
            eval_term(env0, e, strict=True)
        except StrictPurityViolation:
            violations += 1
        for g, s in subterms(g0, e):
            try:
                infer_safe(g, s)
            except CapTypeError:
                continue
            env = closing_env(rng, g)
            if env is None:
                continue
            safe += 1
            noisy += bool(eval_term(env, s)[1])
    dt = time.perf_counter() - t0
    ok = violations == 0 and noisy == 0 and dt < 60
    assert record(3, "strict runs and safe subterms", ok,
                  f"{violations} violations, {noisy}/{safe} safe subterms printed, {dt:.1f}s")


def test_equational_soundness():
    t0 = time.perf_counter()
    lines = list(eq_suite(seed=0, instances=200))
    rules = [l for l in lines if not l.group.startswith("violation")]
    per_rule = {}
    for l in rules:
        per_rule.setdefault(l.group, []).append(l.ok)
    dup = any(check_instance(print_duplication_instance(random.Random(i))).verdict is Verdict.DISTINGUISHED
              for i in range(20))
    sus = any(check_instance(suspended_print_instance(random.Random(i))).verdict is Verdict.DISTINGUISHED
              for i in range(20))
    dt = time.perf_counter() - t0
    ok = (len(per_rule) == 9 and all(len(v) >= 200 and all(v) for v in per_rule.values())
          and all(l.ok for l in lines) and dup and sus and dt < 120)
    failed = sum(not l.ok for l in lines)
    assert record(4, "equational soundness", ok,
                  f"{len(rules)} rule instances, {failed} failing lines, witnesses {dup}/{sus}, {dt:.1f}s")


def test_substitution_and_weakening():
    rng = random.Random(2)
    typed = weak = sem = bad = 0
    while typed < 5000:
        d, g = gen_context(rng, 3, "v"), gen_context(rng, 3, "w")
        ty = gen_type(rng, 2)
        e = gen_term(rng, d, ty, 4)
        theta = gen_subst(rng, g, d)
        if e is None or theta is None:
            continue
        typed += 1
        bad += not (check_subst(g, theta, d) and infer(g, apply_subst(theta, e)) == ty)
        wg = gen_weakening(rng, d)
        weak += 1
        bad += not (check_weakening(wg, d) and infer(wg, e) == ty)
    g = channel_context()
    while sem < 5000:
        q = SAFE if rng.random() < 0.5 else IMPURE
        a = gen_type(rng, 1)
        v = TermGen(rng).term(Context(), a, 2) if q is SAFE else gen_value(rng, g, a, 2)
        e = gen_term(rng, g.extend("x", a, q), gen_first_order_type(rng), 4)
        if v is None or e is None:
            continue
        sem += 1
        val, _ = eval_term(channel_env(), v)
        bad += eval_term(channel_env().extend("x", val, q), e) != eval_term(channel_env(), single_subst(v, q, "x", e, g))
    assert record(5, "substitution and weakening", bad == 0,
                  f"{typed} substitutions, {weak} weakenings, {sem} semantic, {bad} failures")


def test_embedding():
    t0 = time.perf_counter()
    rep = check_embedding_suite(seed=0, instances=2000, eq_instances=500)
    dt = time.perf_counter() - t0
    counts = {}
    for l in rep.lines:
        counts[l.check] = counts.get(l.check, 0) + 1
    ok = rep.ok and counts.get("typing") == 2000 and counts.get("equality") == 500 and dt < 60
    assert record(6, "embedding", ok, f"{len(rep.failures())} failures of {len(rep.lines)}, {dt:.1f}s")


def test_model_lab():
    t0 = time.perf_counter()
    lines = list(model_suite(seed=0, caps=2, max_carrier=3))
    dt = time.perf_counter() - t0
    failed = [l.text() for l in lines if not l.ok]
    witness = any("order of effects is observable" in l.detail and l.ok for l in lines)
    ok = not failed and witness and dt < 60
    assert record(7, "model lab", ok, f"{len(lines)} checks, {len(failed)} failed, {dt:.1f}s")


def test_evaluation_order():
    env = channel_env(("c",))
    pair = eval_term(env, parse_term('(c.print("a"), c.print("b"))'))[1]
    app = eval_term(env, parse_term('(fun x: unit -> c.print("B")) (c.print("A"))'))[1]
    ok = pair == {"c": "ba"} and app == {"c": "AB"}
    assert record(8, "evaluation order", ok, f"pair {pair}, application {app}")


if __name__ == "__main__":
    failures = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
