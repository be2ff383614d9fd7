"""Seeded property suites behind ``capcalc laws``.

Each suite yields ``Line`` records; the runner sorts them by
(suite, group, index) so output is identical however the work is scheduled.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Optional

from . import modellab as ml
from .equational import (
    Rule, Verdict, check_instance, gen_instance, print_duplication_instance,
    suspended_print_instance,
)
from .gen import TermGen, channel_context, channel_env, gen_first_order_type
from .interp import VBox, VChan, VPair, VStr, VUnit, eval_term
from .parser import show
from .syntax import CAP, STR, UNIT, Box, Prod, Type
from .weights import weight_of, weight_of_output

SUITES = ("eq", "model", "embed")


@dataclass(frozen=True)
class Line:
    suite: str
    group: str
    index: int
    ok: bool
    detail: str = ""

    def key(self):
        return (self.suite, self.group, self.index)

    def text(self) -> str:
        head = f"{'PASS' if self.ok else 'FAIL'} {self.suite}/{self.group}/{self.index:04d}"
        return head if self.ok or not self.detail else f"{head}  {self.detail}"

    def json(self) -> str:
        return json.dumps({"suite": self.suite, "group": self.group, "index": self.index,
                           "status": "PASS" if self.ok else "FAIL", "detail": self.detail},
                          sort_keys=True)


# ---------------------------------------------------------------- equational


def eq_suite(seed: int, instances: int = 200, budget: int = 4) -> Iterable[Line]:
    for rule in Rule:
        rng = random.Random(f"{seed}/{rule.value}")
        for i in range(instances):
            inst = gen_instance(rule, rng)
            res = check_instance(inst, budget, seed=rng.randrange(1 << 30))
            detail = "" if res else f"{show(inst.lhs)} vs {show(inst.rhs)}: {res.verdict.value}"
            if res.witness is not None:
                detail += f"; {res.witness.describe()}"
            yield Line("eq", rule.value, i, res.verdict is Verdict.EQUAL, detail)
    # side conditions matter: each family must produce a separating witness
    for name, make in (("violation-print-duplication", print_duplication_instance),
                       ("violation-suspended-print", suspended_print_instance)):
        rng = random.Random(f"{seed}/{name}")
        found = None
        for _ in range(max(1, min(instances, 20))):
            inst = make(rng)
            res = check_instance(inst, budget, seed=rng.randrange(1 << 30))
            if res.verdict is Verdict.DISTINGUISHED:
                found = f"{show(inst.lhs)} vs {show(inst.rhs)}: {res.witness.describe()}"
                break
        yield Line("eq", name, 0, found is not None, found or "no separating witness found")


# ---------------------------------------------------------------- embedding


def embed_suite(seed: int, instances: int = 2000, eq_instances: Optional[int] = None) -> Iterable[Line]:
    from .stlc import check_embedding_suite

    eq_n = eq_instances if eq_instances is not None else max(1, instances // 4)
    rep = check_embedding_suite(seed, instances, eq_n)
    for l in rep.lines:
        yield Line("embed", l.check, l.index, l.ok, "" if l.ok else l.detail)


# ---------------------------------------------------------------- model


def _universe(caps: int) -> tuple:
    return tuple(f"c{i}" for i in range(caps))


def _nonvacuous_triple(rng, universe, max_carrier, tries=200):
    """Random spaces whose relevant hom-sets are non-empty."""
    best = None
    for _ in range(tries):
        a = ml.random_space(rng, rng.randint(1, max_carrier), universe, "A")
        b = ml.random_space(rng, rng.randint(1, max_carrier), universe, "B")
        c = ml.random_space(rng, rng.randint(1, min(2, max_carrier)), universe, "C")
        best = (a, b, c)
        if ml.hom_count(ml.space_product(c, a), b) > 1 and ml.hom_count(c, a) * ml.hom_count(c, b) > 1:
            return best
    return best


def _report_lines(group: str, rep: ml.Report) -> Iterable[Line]:
    for i, r in enumerate(rep.results):
        yield Line("model", group, i, r.ok, f"{rep.name}: {r.law}" + (f" ({r.detail})" if r.detail else ""))


def _fact(group: str, index: int, ok: bool, what: str) -> Line:
    return Line("model", group, index, bool(ok), what)


def denote_type(ty: Type, universe: tuple) -> ml.FinSpace:
    """The finite space for a first-order type: strings are cut to ``a``-words of length <= 2."""
    if ty == UNIT:
        return ml.space_terminal(universe)
    if ty == STR:
        return ml.space_strings("a", 2, universe)
    if ty == CAP:
        return ml.space_cap(universe, universe)
    if isinstance(ty, Prod):
        return ml.space_product(denote_type(ty.left, universe), denote_type(ty.right, universe))
    if isinstance(ty, Box):
        return ml.functor_box(denote_type(ty.body, universe))
    raise ValueError(f"no finite model for {ty}")


def denote_value(v):
    if isinstance(v, VUnit):
        return "*"
    if isinstance(v, VStr):
        return v.text
    if isinstance(v, VChan):
        return v.name
    if isinstance(v, VPair):
        return (denote_value(v.left), denote_value(v.right))
    if isinstance(v, VBox):
        return denote_value(v.payload)
    raise ValueError(f"no finite model for {v!r}")


def coherence_lines(seed: int, programs: int = 200) -> Iterable[Line]:
    """Interpreter weights are admissible weights of the program's element of T[[A]]."""
    universe = ("c0", "c1")
    rng = random.Random(f"{seed}/coherence")
    gen = TermGen(rng, words=("", "a"))
    g, env = channel_context(universe), channel_env(universe)
    wr = ml.Writer(ml.monoid_trunc("a", 2), universe)
    spaces = {}
    done = 0
    while done < programs:
        ty = gen_first_order_type(rng)
        e = gen.term(g, ty, 3)
        if e is None:
            continue
        v, out = eval_term(env, e)
        if ty not in spaces:
            spaces[ty] = wr.T(denote_type(ty, universe))
        texts = [out.get(c, "") for c in universe]
        o = tuple(wr.m.of(t if len(t) <= 2 else ml.TOP) for t in texts)
        weight = weight_of(v) | weight_of_output(out)
        try:
            ok = spaces[ty].admits((denote_value(v), o), weight)
        except KeyError:
            ok = False
        yield Line("model", "coherence", done, ok, f"{show(e)} : {ty} with weight {sorted(weight)}")
        done += 1


def model_suite(seed: int, caps: int = 2, max_carrier: int = 3, monoids=("trivial", "idem", "trunc2"),
                programs: int = 200) -> Iterable[Line]:
    rng = random.Random(f"{seed}/model")
    u = _universe(caps)
    one = ml.space_terminal(u)
    cap = ml.space_cap(u, u)

    # constructions
    yield _fact("constructions", 0, len(ml.functor_box(cap)) == 0, "[]Cap has an empty carrier")
    yield _fact("constructions", 1, ml.hom_count(one, cap) == 0, "no global elements of Cap")
    yield _fact("constructions", 2, len(ml.space_product(cap, cap)) == len(cap) ** 2, "|A x A| = |A|^2")
    try:
        ml.FinMap(one, cap, [0], "broken")
        rejected = False
    except ml.NotAMorphism:
        rejected = True
    yield _fact("constructions", 3, rejected, "a weight-increasing map is rejected")
    same = ml.space_tensor(cap, cap)
    yield _fact("constructions", 4, all(x == y for x, y in same.weightless()) and len(same.weightless()) == len(cap),
                "pairs sharing a capability have no tensor weight")

    # products, exponentials and the tensor adjunction
    triples = [(one, one, one)] + [_nonvacuous_triple(rng, u, max_carrier) for _ in range(3)]
    for n, (a, b, c) in enumerate(triples):
        yield from _report_lines(f"ccc-{n}", ml.check_ccc(a, b, c))
        yield from _report_lines(f"tensor-hom-{n}", ml.check_tensor_hom(a, b, c))

    # writer monad, functors and cancellation, per monoid
    for name in monoids:
        m = ml.monoid_by_name(name)
        a = ml.random_space(rng, rng.randint(1, 2), u, "A")
        b = ml.random_space(rng, rng.randint(1, 2), u, "B")
        rep = ml.check_monad(a, m, b)
        yield from _report_lines(f"monad-{name}", rep)
        if not m.commutative():
            yield _fact(f"monad-{name}", len(rep.results), rep.witness is not None,
                        f"order of effects is observable: {rep.witness}")
        x, y, z = _nonvacuous_triple(rng, u, max_carrier)
        yield from _report_lines(f"functors-{name}", ml.check_functoriality(x, y, z, m, rng))
        for k, sp in enumerate((one, cap, ml.random_space(rng, max_carrier, u, "A", max_weights=3))):
            yield from _report_lines(f"cancellation-{name}-{k}", ml.check_cancellation(sp, m))

    # comonad
    flat = ml.space_from_weights(["p", "q"], [[()], [()]], u, "P")
    mixed = ml.space_from_weights(["p", "q", "r"], [[()], [(), (u[0],)], [(u[-1],)]], u, "M")
    yield _fact("comonad-flat", 0, ml.functor_box(flat).elements == flat.elements, "[]A = A when all weights are empty")
    for k, sp in enumerate((flat, cap, mixed, ml.random_space(rng, max_carrier, u, "A", max_weights=3))):
        yield from _report_lines(f"comonad-{k}", ml.check_comonad(sp, mixed))
    split = ml.check_cancellation(mixed, ml.monoid_by_name("trunc2"))
    yield from _report_lines("cancellation-split", split)
    yield _fact("cancellation-split", len(split.results), len(ml.functor_box(mixed)) == 2,
                "[]TA and []A both hold exactly the elements admitting the empty weight")

    # exceptions and state
    eu = u[:1] + (ml.FAIL,)
    ea = ml.random_space(rng, 2, eu, "A")
    exc = ml.check_exception_monad(ea)
    yield from _report_lines("exceptions", exc)
    yield _fact("exceptions", len(exc.results), len(ml.Exceptions(eu).T(ea)) == 3, "|T A| = 3 for a 2-element A")
    st = ml.State(("l",), (0, 1))
    sa = ml.space_from_weights(["p", "q"], [[()], [("l",)]], ("l",), "A")
    yield from _report_lines("state", ml.check_state_monad(sa, st, ml.space_terminal(("l",))))

    yield from coherence_lines(seed, programs)


# ---------------------------------------------------------------- runner


def run_suites(suites, seed: int, instances: Optional[int] = None, caps: int = 2,
               max_carrier: int = 3, monoids=("trivial", "idem", "trunc2")) -> list:
    lines = []
    for s in suites:
        if s == "eq":
            lines.extend(eq_suite(seed, instances or 200))
        elif s == "embed":
            lines.extend(embed_suite(seed, instances or 2000))
        elif s == "model":
            lines.extend(model_suite(seed, caps, max_carrier, monoids, programs=instances or 200))
        else:
            raise ValueError(f"unknown suite {s!r}")
    return sorted(lines, key=Line.key)
