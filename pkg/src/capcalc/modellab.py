"""Finite capability spaces and exhaustive checks of their categorical structure.

A space is a finite carrier plus a weight relation, stored as a boolean
matrix ``w[x, S]`` over subset bitmasks ``S`` of a shared capability
universe.  Maps are integer tables.  Every check enumerates its whole
finite domain, so a pass means no counterexample exists at that size.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

DEFAULT_BOUND = 10 ** 6


class SizeBound(RuntimeError):
    """A construction would exceed the configured enumeration bound."""


class NotAMorphism(ValueError):
    def __init__(self, what: str, element, weight):
        super().__init__(f"{what}: element {element!r} with weight {weight!r} has no bounded image weight")
        self.element, self.weight = element, weight


# ---------------------------------------------------------------- bitmask helpers


def _masks(k: int) -> np.ndarray:
    return np.arange(1 << k)


def _or_table(k: int) -> np.ndarray:
    m = _masks(k)
    return m[:, None] | m[None, :]


def _disjoint(k: int) -> np.ndarray:
    m = _masks(k)
    return (m[:, None] & m[None, :]) == 0


def _down_closed(w: np.ndarray, k: int) -> np.ndarray:
    """``d[x, S]`` iff some admissible weight of ``x`` is a subset of ``S``."""
    d = w.copy()
    for b in range(k):
        bit = 1 << b
        with_bit = np.array([s for s in range(1 << k) if s & bit])
        d[:, with_bit] |= d[:, with_bit ^ bit]
    return d


# ---------------------------------------------------------------- spaces


@dataclass(eq=False)
class FinSpace:
    elements: list
    weights: np.ndarray  # bool, shape (len(elements), 2**len(universe))
    universe: tuple
    name: str = ""
    _index: dict = field(default=None, repr=False)
    _down: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=bool).reshape(len(self.elements), 1 << len(self.universe))

    @property
    def k(self) -> int:
        return len(self.universe)

    def __len__(self):
        return len(self.elements)

    def index(self, label) -> int:
        if self._index is None:
            self._index = {e: i for i, e in enumerate(self.elements)}
        return self._index[label]

    def down(self) -> np.ndarray:
        if self._down is None:
            self._down = _down_closed(self.weights, self.k)
        return self._down

    def mask(self, caps) -> int:
        return sum(1 << self.universe.index(c) for c in caps)

    def capset(self, mask: int) -> frozenset:
        return frozenset(c for i, c in enumerate(self.universe) if mask >> i & 1)

    def weights_of(self, i: int) -> list:
        return [self.capset(int(m)) for m in np.flatnonzero(self.weights[i])]

    def admits(self, label, caps) -> bool:
        return bool(self.weights[self.index(label), self.mask(caps)])

    def weightless(self) -> list:
        """Elements with no admissible weight at all."""
        return [self.elements[i] for i in np.flatnonzero(~self.weights.any(axis=1))]


def _check_size(n: int, bound: int, what: str):
    if n > bound:
        raise SizeBound(f"{what} would need {n} entries (bound {bound})")


def _same_universe(*spaces) -> tuple:
    u = spaces[0].universe
    if any(s.universe != u for s in spaces):
        raise ValueError("spaces over different capability universes")
    return u


def space_from_weights(elements: Sequence, weights: Sequence, universe: Sequence, name: str = "") -> FinSpace:
    """``weights[i]`` lists the admissible capability sets of ``elements[i]``."""
    universe = tuple(universe)
    w = np.zeros((len(elements), 1 << len(universe)), dtype=bool)
    for i, ws in enumerate(weights):
        for caps in ws:
            w[i, sum(1 << universe.index(c) for c in caps)] = True
    return FinSpace(list(elements), w, universe, name)


def space_terminal(universe: Sequence = ()) -> FinSpace:
    return space_from_weights(["*"], [[()]], universe, "1")


def space_cap(caps: Sequence, universe: Optional[Sequence] = None) -> FinSpace:
    universe = tuple(universe if universe is not None else caps)
    return space_from_weights(list(caps), [[(c,)] for c in caps], universe, "Cap")


def space_strings(alphabet: str = "a", max_len: int = 2, universe: Sequence = ()) -> FinSpace:
    words = ["".join(p) for n in range(max_len + 1) for p in itertools.product(alphabet, repeat=n)]
    return space_from_weights(words, [[()]] * len(words), universe, "Str")


def space_product(a: FinSpace, b: FinSpace, bound: int = DEFAULT_BOUND) -> FinSpace:
    u = _same_universe(a, b)
    _check_size(len(a) * len(b) << len(u), bound, "product")
    orr = _or_table(len(u))
    elements = [(x, y) for x in a.elements for y in b.elements]
    w = np.zeros((len(elements), 1 << len(u)), dtype=bool)
    for i in range(len(a)):
        for j in range(len(b)):
            both = a.weights[i][:, None] & b.weights[j][None, :]
            w[i * len(b) + j, np.unique(orr[both])] = True
    return FinSpace(elements, w, u, f"({a.name} x {b.name})")


def space_tensor(a: FinSpace, b: FinSpace, bound: int = DEFAULT_BOUND) -> FinSpace:
    """Pairs weighted by unions of disjoint weights.  The carrier is the full
    product; pairs with no disjoint weighting are kept but weightless."""
    u = _same_universe(a, b)
    _check_size(len(a) * len(b) << len(u), bound, "tensor")
    orr, dis = _or_table(len(u)), _disjoint(len(u))
    elements = [(x, y) for x in a.elements for y in b.elements]
    w = np.zeros((len(elements), 1 << len(u)), dtype=bool)
    for i in range(len(a)):
        for j in range(len(b)):
            both = a.weights[i][:, None] & b.weights[j][None, :] & dis
            w[i * len(b) + j, np.unique(orr[both])] = True
    return FinSpace(elements, w, u, f"({a.name} (x) {b.name})")


def _function_space(a: FinSpace, b: FinSpace, linear: bool, bound: int) -> FinSpace:
    u = _same_universe(a, b)
    k = len(u)
    count = len(b) ** len(a)
    _check_size(count * len(a) << (2 * k), bound, "exponential")
    orr, dis = _or_table(k), _disjoint(k)
    db = b.down()
    rows = np.arange(len(a))[:, None, None]
    # premise[a, Cf, Ca]: the implication must hold here
    premise = np.broadcast_to(a.weights[:, None, :], (len(a), 1 << k, 1 << k))
    if linear:
        premise = premise & dis[None, :, :]
    elements, w = [], np.zeros((count, 1 << k), dtype=bool)
    for n, table in enumerate(itertools.product(range(len(b)), repeat=len(a))):
        t = np.array(table, dtype=int)
        holds = db[t[rows], orr[None, :, :]]  # (a, Cf, Ca)
        w[n] = np.all(~premise | holds, axis=(0, 2))
        elements.append(tuple(b.elements[j] for j in table))
    arrow = "-o" if linear else "->"
    return FinSpace(elements, w, u, f"({a.name} {arrow} {b.name})")


def space_exponential(a: FinSpace, b: FinSpace, bound: int = DEFAULT_BOUND) -> FinSpace:
    """Every function ``|a| -> |b|``, labelled by its graph listed in ``a``'s order."""
    return _function_space(a, b, False, bound)


def space_linexp(a: FinSpace, b: FinSpace, bound: int = DEFAULT_BOUND) -> FinSpace:
    return _function_space(a, b, True, bound)


def functor_box(a: FinSpace) -> FinSpace:
    """Elements that admit the empty weight, now weighted by it alone."""
    keep = np.flatnonzero(a.weights[:, 0])
    w = np.zeros((len(keep), 1 << a.k), dtype=bool)
    w[:, 0] = True
    return FinSpace([a.elements[i] for i in keep], w, a.universe, f"[]{a.name}")


# ---------------------------------------------------------------- maps


@dataclass(eq=False)
class FinMap:
    dom: FinSpace
    cod: FinSpace
    table: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=int).reshape(len(self.dom))
        bad = hom_violation(self.dom, self.cod, self.table)
        if bad is not None:
            x, c = bad
            raise NotAMorphism(self.name or "map", self.dom.elements[x], self.dom.capset(c))

    @classmethod
    def from_fn(cls, dom: FinSpace, cod: FinSpace, fn: Callable, name: str = "") -> "FinMap":
        return cls(dom, cod, [cod.index(fn(x)) for x in dom.elements], name)

    def __call__(self, label):
        return self.cod.elements[self.table[self.dom.index(label)]]

    def then(self, other: "FinMap") -> "FinMap":
        assert self.cod is other.dom or self.cod.elements == other.dom.elements
        return FinMap(self.dom, other.cod, other.table[self.table], f"{self.name};{other.name}")

    def same(self, other: "FinMap") -> bool:
        return np.array_equal(self.table, other.table)


def hom_violation(dom: FinSpace, cod: FinSpace, table) -> Optional[tuple]:
    """``(element index, weight mask)`` breaking weight preservation, or None."""
    _same_universe(dom, cod)
    ok = ~dom.weights | cod.down()[np.asarray(table, dtype=int)]
    bad = np.argwhere(~ok)
    return None if len(bad) == 0 else (int(bad[0][0]), int(bad[0][1]))


def is_hom(dom: FinSpace, cod: FinSpace, table) -> bool:
    return hom_violation(dom, cod, table) is None


def allowed_targets(dom: FinSpace, cod: FinSpace) -> list:
    d = cod.down()
    return [np.flatnonzero(d[:, dom.weights[x]].all(axis=1)) for x in range(len(dom))]


def hom_count(dom: FinSpace, cod: FinSpace) -> int:
    return math.prod(len(t) for t in allowed_targets(dom, cod))


def homs(dom: FinSpace, cod: FinSpace, bound: int = DEFAULT_BOUND):
    """Every weight-preserving map, as integer tables."""
    allowed = allowed_targets(dom, cod)
    _check_size(math.prod(len(t) for t in allowed), bound, "hom-set")
    for t in itertools.product(*allowed):
        yield np.array(t, dtype=int)


def identity(a: FinSpace) -> FinMap:
    return FinMap(a, a, np.arange(len(a)), "id")


# ---------------------------------------------------------------- monoids


@dataclass(eq=False)
class FinMonoid:
    elements: list
    unit: int
    table: np.ndarray
    name: str = ""

    def __post_init__(self):
        t = self.table = np.asarray(self.table, dtype=int)
        n = len(self.elements)
        idx = np.arange(n)
        if not (np.array_equal(t[self.unit], idx) and np.array_equal(t[:, self.unit], idx)):
            raise ValueError(f"{self.name}: identity law fails")
        if not np.array_equal(t[t[:, :, None], idx[None, None, :]], t[idx[:, None, None], t[None, :, :]]):
            raise ValueError(f"{self.name}: multiplication is not associative")

    def __len__(self):
        return len(self.elements)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def commutative(self) -> bool:
        return np.array_equal(self.table, self.table.T)

    def of(self, label) -> int:
        return self.elements.index(label)


TOP = "T"


def monoid_trivial() -> FinMonoid:
    return FinMonoid([""], 0, [[0]], "trivial")


def monoid_idem() -> FinMonoid:
    return FinMonoid(["", "a"], 0, [[0, 1], [1, 1]], "idem")


def monoid_trunc(alphabet: str = "ab", max_len: int = 2) -> FinMonoid:
    """Strings up to ``max_len`` under concatenation; longer products collapse
    to an absorbing top element."""
    words = ["".join(p) for n in range(max_len + 1) for p in itertools.product(alphabet, repeat=n)]
    elements = words + [TOP]
    pos = {w: i for i, w in enumerate(elements)}
    top = pos[TOP]
    t = np.full((len(elements), len(elements)), top, dtype=int)
    for x in words:
        for y in words:
            if len(x + y) <= max_len:
                t[pos[x], pos[y]] = pos[x + y]
    return FinMonoid(elements, 0, t, f"trunc{max_len}")


def monoid_by_name(name: str) -> FinMonoid:
    if name == "trivial":
        return monoid_trivial()
    if name == "idem":
        return monoid_idem()
    if name == "trunc2":
        return monoid_trunc("ab", 2)
    if name == "trunc1a":
        return monoid_trunc("a", 2)
    raise ValueError(f"unknown monoid {name!r}")


# ---------------------------------------------------------------- the writer monad over a monoid


class Writer:
    """``T A = A x (C -> M)`` with weight ``Ca`` plus the channels holding a
    non-identity element of ``M``."""

    def __init__(self, monoid: FinMonoid, universe: Sequence, bound: int = DEFAULT_BOUND):
        self.m = monoid
        self.universe = tuple(universe)
        self.bound = bound
        self.outputs = list(itertools.product(range(len(monoid)), repeat=len(self.universe)))
        self.none = tuple([monoid.unit] * len(self.universe))

    def out_mask(self, o) -> int:
        return sum(1 << i for i, x in enumerate(o) if x != self.m.unit)

    def mul(self, first, then):
        """Channel-wise ``first . then``."""
        return tuple(self.m.mul(a, b) for a, b in zip(first, then))

    def T(self, a: FinSpace) -> FinSpace:
        _check_size(len(a) * len(self.outputs) << a.k, self.bound, "T")
        k = a.k
        masks = np.array([self.out_mask(o) for o in self.outputs])
        elements = [(x, o) for x in a.elements for o in self.outputs]
        w = np.zeros((len(elements), 1 << k), dtype=bool)
        orr = _or_table(k)
        for i in range(len(a)):
            for j, om in enumerate(masks):
                w[i * len(self.outputs) + j, orr[np.flatnonzero(a.weights[i]), om]] = True
        return FinSpace(elements, w, a.universe, f"T{a.name}")

    def eta(self, a: FinSpace, ta: FinSpace) -> FinMap:
        return FinMap.from_fn(a, ta, lambda x: (x, self.none), "eta")

    def mu(self, tta: FinSpace, ta: FinSpace) -> FinMap:
        # ((a, o1), o2) with o2 the outer, earlier output
        return FinMap.from_fn(tta, ta, lambda p: (p[0][0], self.mul(p[1], p[0][1])), "mu")

    def fmap(self, f: FinMap, ta: FinSpace, tb: FinSpace) -> FinMap:
        return FinMap.from_fn(ta, tb, lambda p: (f(p[0]), p[1]), f"T{f.name}")

    def tau(self, a_tb: FinSpace, t_ab: FinSpace) -> FinMap:
        return FinMap.from_fn(a_tb, t_ab, lambda p: ((p[0], p[1][0]), p[1][1]), "tau")

    def sigma(self, ta_b: FinSpace, t_ab: FinSpace) -> FinMap:
        return FinMap.from_fn(ta_b, t_ab, lambda p: ((p[0][0], p[1]), p[0][1]), "sigma")


# ---------------------------------------------------------------- reports


@dataclass
class LawResult:
    law: str
    ok: bool
    detail: str = ""


@dataclass
class Report:
    name: str
    results: list = field(default_factory=list)
    witness: Optional[str] = None  # for properties that should be refuted

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def add(self, law: str, ok: bool, detail: str = ""):
        self.results.append(LawResult(law, bool(ok), detail))

    def attempt(self, law: str, thunk: Callable[[], bool]):
        """Record ``thunk()``; a map that fails to be a morphism is a failure."""
        try:
            self.add(law, thunk())
        except NotAMorphism as exc:
            self.add(law, False, str(exc))


def _first_difference(f: FinMap, g: FinMap) -> str:
    bad = np.flatnonzero(f.table != g.table)
    if len(bad) == 0:
        return ""
    x = f.dom.elements[bad[0]]
    return f"at {x!r}: {f.cod.elements[f.table[bad[0]]]!r} vs {g.cod.elements[g.table[bad[0]]]!r}"


def _agree(rep: Report, law: str, f: Callable[[], FinMap], g: Callable[[], FinMap]):
    try:
        a, b = f(), g()
    except NotAMorphism as exc:
        rep.add(law, False, str(exc))
        return
    rep.add(law, a.same(b), _first_difference(a, b))


# ---------------------------------------------------------------- cartesian closed structure


def check_ccc(a: FinSpace, b: FinSpace, c: FinSpace, bound: int = DEFAULT_BOUND) -> Report:
    """Pairing and currying are bijections on hom-sets."""
    rep = Report(f"ccc({a.name}, {b.name}, {c.name})")
    ab = space_product(a, b, bound)
    pi1 = FinMap.from_fn(ab, a, lambda p: p[0], "pi1")
    pi2 = FinMap.from_fn(ab, b, lambda p: p[1], "pi2")
    # products
    pairs = set()
    ok = True
    for h in homs(c, ab, bound):
        f, g = pi1.table[h], pi2.table[h]
        ok &= is_hom(c, a, f) and is_hom(c, b, g)
        back = np.array([ab.index((a.elements[f[i]], b.elements[g[i]])) for i in range(len(c))])
        ok &= np.array_equal(back, h)
        pairs.add((tuple(f), tuple(g)))
    n_fg = hom_count(c, a) * hom_count(c, b)
    rep.add("product: projections and pairing are inverse", ok and len(pairs) == n_fg,
            f"{len(pairs)} of {n_fg} pairs reached")
    for f in homs(c, a, bound):
        for g in homs(c, b, bound):
            t = [ab.index((a.elements[f[i]], b.elements[g[i]])) for i in range(len(c))]
            if not is_hom(c, ab, t):
                rep.add("product: pairing preserves weights", False, f"{f} {g}")
                return rep
    rep.add("product: pairing preserves weights", True)
    # exponentials
    ex = space_exponential(a, b, bound)
    ex_a = space_product(ex, a, bound)
    rep.attempt("exponential: evaluation is a morphism",
                lambda: FinMap.from_fn(ex_a, b, lambda p: p[0][a.index(p[1])], "ev") is not None)
    ca = space_product(c, a, bound)
    curried = set()
    ok = True
    for f in homs(ca, b, bound):
        graph = [tuple(b.elements[f[ca.index((x, y))]] for y in a.elements) for x in c.elements]
        t = [ex.index(gr) for gr in graph]
        ok &= is_hom(c, ex, t)
        curried.add(tuple(t))
        back = [b.index(graph[c.index(x)][a.index(y)]) for x, y in ca.elements]
        ok &= np.array_equal(back, f)
    n = hom_count(c, ex)
    rep.add("exponential: curry is a bijection", ok and len(curried) == n, f"{len(curried)} of {n}")
    for g in homs(c, ex, bound):
        t = [b.index(ex.elements[g[c.index(x)]][a.index(y)]) for x, y in ca.elements]
        if not is_hom(ca, b, t):
            rep.add("exponential: uncurry preserves weights", False, str(g))
            return rep
    rep.add("exponential: uncurry preserves weights", True)
    rep.add("terminal: exactly one map into 1", hom_count(a, space_terminal(a.universe)) == 1)
    return rep


def check_tensor_hom(a: FinSpace, b: FinSpace, c: FinSpace, bound: int = DEFAULT_BOUND) -> Report:
    """``Hom(C (x) A, B)`` and ``Hom(C, A -o B)`` correspond by currying."""
    rep = Report(f"tensor-hom({a.name}, {b.name}, {c.name})")
    lx = space_linexp(a, b, bound)
    rep.attempt("evaluation is a morphism",
                lambda: FinMap.from_fn(space_tensor(lx, a, bound), b, lambda p: p[0][a.index(p[1])], "ev") is not None)
    ca = space_tensor(c, a, bound)
    curried, ok = set(), True
    for f in homs(ca, b, bound):
        graph = [tuple(b.elements[f[ca.index((x, y))]] for y in a.elements) for x in c.elements]
        t = [lx.index(gr) for gr in graph]
        ok &= is_hom(c, lx, t)
        curried.add(tuple(t))
    n = hom_count(c, lx)
    rep.add("curry is a bijection", ok and len(curried) == n, f"{len(curried)} of {n}")
    for g in homs(c, lx, bound):
        t = [b.index(lx.elements[g[c.index(x)]][a.index(y)]) for x, y in ca.elements]
        if not is_hom(ca, b, t):
            rep.add("uncurry preserves weights", False, str(g))
            return rep
    rep.add("uncurry preserves weights", True)
    return rep


# ---------------------------------------------------------------- monad


def check_monad(a: FinSpace, m: FinMonoid, b: Optional[FinSpace] = None, bound: int = DEFAULT_BOUND) -> Report:
    """Unit, multiplication and strength of the writer monad over ``m``."""
    rep = Report(f"monad({a.name}, {m.name})")
    wr = Writer(m, a.universe, bound)
    b = b if b is not None else a
    ta, tta = wr.T(a), None
    tta = wr.T(ta)
    rep.attempt("eta is a morphism", lambda: wr.eta(a, ta) is not None)
    rep.attempt("mu is a morphism", lambda: wr.mu(tta, ta) is not None)
    _agree(rep, "left unit", lambda: wr.eta(ta, tta).then(wr.mu(tta, ta)), lambda: identity(ta))
    _agree(rep, "right unit", lambda: wr.fmap(wr.eta(a, ta), ta, tta).then(wr.mu(tta, ta)), lambda: identity(ta))
    # associativity is pointwise in the outputs; check it on the raw tables
    # (((a, o1), o2), o3): flattening inner-first or outer-first
    outs = wr.outputs
    rep.add("associativity", all(
        wr.mul(o3, wr.mul(o2, o1)) == wr.mul(wr.mul(o3, o2), o1)
        for o1 in outs for o2 in outs for o3 in outs))
    _strength_laws(rep, wr, a, b)
    wit = noncommutativity_witness(wr, a, b)
    rep.witness = wit
    rep.add("commutes exactly when the monoid does", (wit is None) == m.commutative(), wit or "")
    return rep


def _strength_laws(rep: Report, wr: Writer, a: FinSpace, b: FinSpace):
    one = space_terminal(a.universe)
    ta, tb = wr.T(a), wr.T(b)
    # 1 x TA -> T(1 x A) -> TA equals the projection
    one_ta = space_product(one, ta)
    t_one_a = wr.T(space_product(one, a))
    _agree(rep, "strength with 1 is irrelevant",
           lambda: wr.tau(one_ta, t_one_a).then(wr.fmap(FinMap.from_fn(space_product(one, a), a, lambda p: p[1]), t_one_a, ta)),
           lambda: FinMap.from_fn(one_ta, ta, lambda p: p[1]))
    # consecutive strengths: (A x B) x TC
    c = one if len(a) * len(b) * len(tb) > 4096 else b
    tc = wr.T(c)
    ab = space_product(a, b)
    ab_tc = space_product(ab, tc)
    bc = space_product(b, c)
    a_bc = space_product(a, bc)
    t_ab_c = wr.T(space_product(ab, c))
    t_a_bc = wr.T(a_bc)
    b_tc = space_product(b, tc)
    a_b_tc = space_product(a, b_tc)
    a_tbc = space_product(a, wr.T(bc))
    assoc = FinMap.from_fn(space_product(ab, c), a_bc, lambda p: (p[0][0], (p[0][1], p[1])))
    _agree(rep, "consecutive strengths",
           lambda: wr.tau(ab_tc, t_ab_c).then(wr.fmap(assoc, t_ab_c, t_a_bc)),
           lambda: FinMap.from_fn(ab_tc, a_b_tc, lambda p: (p[0][0], (p[0][1], p[1])))
           .then(FinMap.from_fn(a_b_tc, a_tbc, lambda p: (p[0], ((p[1][0], p[1][1][0]), p[1][1][1]))))
           .then(wr.tau(a_tbc, t_a_bc)))
    # unit and multiplication
    a_b, a_tb, t_ab = space_product(a, b), space_product(a, tb), wr.T(space_product(a, b))
    _agree(rep, "strength preserves unit",
           lambda: FinMap.from_fn(a_b, a_tb, lambda p: (p[0], (p[1], wr.none))).then(wr.tau(a_tb, t_ab)),
           lambda: wr.eta(a_b, t_ab))
    ttb = wr.T(tb)
    a_ttb = space_product(a, ttb)
    t_a_tb = wr.T(a_tb)
    tt_ab = wr.T(t_ab)
    _agree(rep, "strength preserves multiplication",
           lambda: FinMap.from_fn(a_ttb, a_tb, lambda p: (p[0], (p[1][0][0], wr.mul(p[1][1], p[1][0][1]))))
           .then(wr.tau(a_tb, t_ab)),
           lambda: wr.tau(a_ttb, t_a_tb).then(wr.fmap(wr.tau(a_tb, t_ab), t_a_tb, tt_ab)).then(wr.mu(tt_ab, t_ab)))
    # left and right strengths agree up to symmetry
    tb_a = space_product(tb, a)
    t_ba = wr.T(space_product(b, a))
    swap = FinMap.from_fn(a_b, space_product(b, a), lambda p: (p[1], p[0]))
    _agree(rep, "left and right strengths agree",
           lambda: wr.tau(a_tb, t_ab).then(wr.fmap(swap, t_ab, t_ba)),
           lambda: FinMap.from_fn(a_tb, tb_a, lambda p: (p[1], p[0])).then(wr.sigma(tb_a, t_ba)))


def pair_orders(wr: Writer, a: FinSpace, b: FinSpace):
    """The two ways of running a pair of computations, as maps
    ``TA x TB -> T(A x B)``: left effect first, and right effect first."""
    ta, tb = wr.T(a), wr.T(b)
    ta_tb = space_product(ta, tb)
    ab = space_product(a, b)
    t_ab = wr.T(ab)
    tt_ab = wr.T(t_ab)
    # alpha = sigma; T tau; mu
    a_tb = space_product(a, tb)
    t_a_tb = wr.T(a_tb)
    alpha = wr.sigma(ta_tb, t_a_tb).then(wr.fmap(wr.tau(a_tb, t_ab), t_a_tb, tt_ab)).then(wr.mu(tt_ab, t_ab))
    # beta = tau; T sigma; mu
    ta_b = space_product(ta, b)
    t_ta_b = wr.T(ta_b)
    beta = wr.tau(ta_tb, t_ta_b).then(wr.fmap(wr.sigma(ta_b, t_ab), t_ta_b, tt_ab)).then(wr.mu(tt_ab, t_ab))
    return alpha, beta


def noncommutativity_witness(wr: Writer, a: FinSpace, b: FinSpace) -> Optional[str]:
    alpha, beta = pair_orders(wr, a, b)
    bad = np.flatnonzero(alpha.table != beta.table)
    if len(bad) == 0:
        return None
    x = alpha.dom.elements[bad[0]]
    show = lambda o: {c: wr.m.elements[i] for c, i in zip(wr.universe, o)}
    (av, o1), (bv, o2) = x
    ra, rb = alpha.cod.elements[alpha.table[bad[0]]], beta.cod.elements[beta.table[bad[0]]]
    return (f"left output {show(o1)}, right output {show(o2)}: "
            f"left-first gives {show(ra[1])}, right-first gives {show(rb[1])}")


# ---------------------------------------------------------------- comonad


def check_comonad(a: FinSpace, b: Optional[FinSpace] = None) -> Report:
    rep = Report(f"comonad({a.name})")
    b = b if b is not None else a
    ba = functor_box(a)
    bba = functor_box(ba)
    rep.add("idempotent: [][]A has the carrier of []A", bba.elements == ba.elements)
    rep.attempt("counit is a morphism", lambda: FinMap.from_fn(ba, a, lambda x: x, "eps") is not None)
    rep.attempt("comultiplication is a morphism", lambda: FinMap.from_fn(ba, bba, lambda x: x, "delta") is not None)
    rep.attempt("comultiplication has a morphism inverse", lambda: FinMap.from_fn(bba, ba, lambda x: x) is not None)
    _agree(rep, "counit after comultiplication",
           lambda: FinMap.from_fn(ba, bba, lambda x: x).then(FinMap.from_fn(bba, ba, lambda x: x)),
           lambda: identity(ba))
    bb = functor_box(b)
    lhs, rhs = space_product(ba, bb), functor_box(space_product(a, b))
    rep.add("[]A x []B and [](A x B) share a carrier", sorted(map(repr, lhs.elements)) == sorted(map(repr, rhs.elements)))
    rep.attempt("pairing [] is a morphism both ways",
                lambda: FinMap.from_fn(lhs, rhs, lambda p: p) is not None and FinMap.from_fn(rhs, lhs, lambda p: p) is not None)
    one = space_terminal(a.universe)
    rep.add("[]1 = 1", functor_box(one).elements == one.elements)
    return rep


def box_map(f: FinMap) -> FinMap:
    bd, bc = functor_box(f.dom), functor_box(f.cod)
    return FinMap.from_fn(bd, bc, f, f"[]{f.name}")


def check_functoriality(a: FinSpace, b: FinSpace, c: FinSpace, m: FinMonoid, rng: random.Random,
                        samples: int = 20) -> Report:
    """T and [] preserve identities and composition on random hom pairs."""
    rep = Report(f"functors({a.name}, {b.name}, {c.name})")
    wr = Writer(m, a.universe)
    ta, tb, tc = wr.T(a), wr.T(b), wr.T(c)
    _agree(rep, "T preserves identity", lambda: wr.fmap(identity(a), ta, ta), lambda: identity(ta))
    _agree(rep, "[] preserves identity", lambda: box_map(identity(a)), lambda: identity(functor_box(a)))
    fa, fb = allowed_targets(a, b), allowed_targets(b, c)
    if any(len(t) == 0 for t in fa) or any(len(t) == 0 for t in fb):
        rep.add("composition (no maps to sample)", True)
        return rep
    ok_t = ok_b = True
    for _ in range(samples):
        f = FinMap(a, b, [rng.choice(list(t)) for t in fa])
        g = FinMap(b, c, [rng.choice(list(t)) for t in fb])
        ok_t &= wr.fmap(f.then(g), ta, tc).same(wr.fmap(f, ta, tb).then(wr.fmap(g, tb, tc)))
        ok_b &= box_map(f.then(g)).same(box_map(f).then(box_map(g)))
    rep.add("T preserves composition", ok_t)
    rep.add("[] preserves composition", ok_b)
    return rep


# ---------------------------------------------------------------- cancellation


def check_cancellation(a: FinSpace, m: FinMonoid) -> Report:
    """``[]TA`` and ``[]A`` are isomorphic through projection and the unit."""
    rep = Report(f"cancellation({a.name}, {m.name})")
    wr = Writer(m, a.universe)
    bta, ba = functor_box(wr.T(a)), functor_box(a)
    rep.add("carrier sizes agree", len(bta) == len(ba), f"{len(bta)} vs {len(ba)}")
    rep.add("boxed computations print nothing", all(o == wr.none for _, o in bta.elements))
    try:
        phi = FinMap.from_fn(bta, ba, lambda p: p[0], "phi")
        back = FinMap.from_fn(ba, bta, lambda x: (x, wr.none), "[]eta")
    except (NotAMorphism, KeyError) as exc:
        rep.add("phi and []eta are morphisms", False, str(exc))
        return rep
    rep.add("phi and []eta are morphisms", True)
    rep.add("phi after []eta", back.then(phi).same(identity(ba)))
    rep.add("[]eta after phi", phi.then(back).same(identity(bta)))
    return rep


# ---------------------------------------------------------------- exceptions


FAIL = "fail"


class Exceptions:
    """``T A = A + 1``; the failure carries the single capability ``fail``."""

    def __init__(self, universe: Sequence):
        if FAIL not in universe:
            raise ValueError("the universe must contain the failure capability")
        self.universe = tuple(universe)

    def T(self, a: FinSpace) -> FinSpace:
        elements = [("inl", x) for x in a.elements] + [("inr",)]
        w = np.zeros((len(elements), 1 << a.k), dtype=bool)
        w[: len(a)] = a.weights
        w[len(a), 1 << self.universe.index(FAIL)] = True
        return FinSpace(elements, w, a.universe, f"E{a.name}")

    def eta(self, a, ta):
        return FinMap.from_fn(a, ta, lambda x: ("inl", x), "eta")

    def mu(self, tta, ta):
        return FinMap.from_fn(tta, ta, lambda p: p[1] if p[0] == "inl" else ("inr",), "mu")

    def fmap(self, f, ta, tb):
        return FinMap.from_fn(ta, tb, lambda p: ("inl", f(p[1])) if p[0] == "inl" else p, f"E{f.name}")


def check_exception_monad(a: FinSpace) -> Report:
    rep = Report(f"exceptions({a.name})")
    ex = Exceptions(a.universe)
    ta = ex.T(a)
    tta, ttta = ex.T(ta), ex.T(ex.T(ta))
    rep.add("|TA| = |A| + 1", len(ta) == len(a) + 1, str(len(ta)))
    _monad_laws(rep, ex, a, ta, tta, ttta)
    bta, ba = functor_box(ta), functor_box(a)
    try:
        phi = FinMap.from_fn(bta, ba, lambda p: p[1], "phi")
        back = FinMap.from_fn(ba, bta, lambda x: ("inl", x))
        rep.add("cancellation", back.then(phi).same(identity(ba)) and phi.then(back).same(identity(bta)))
    except (NotAMorphism, KeyError, IndexError) as exc:
        rep.add("cancellation", False, str(exc))
    return rep


def _monad_laws(rep: Report, mon, a, ta, tta, ttta):
    rep.attempt("eta is a morphism", lambda: mon.eta(a, ta) is not None)
    rep.attempt("mu is a morphism", lambda: mon.mu(tta, ta) is not None)
    _agree(rep, "left unit", lambda: mon.eta(ta, tta).then(mon.mu(tta, ta)), lambda: identity(ta))
    _agree(rep, "right unit", lambda: mon.fmap(mon.eta(a, ta), ta, tta).then(mon.mu(tta, ta)), lambda: identity(ta))
    _agree(rep, "associativity",
           lambda: mon.mu(ttta, tta).then(mon.mu(tta, ta)),
           lambda: mon.fmap(mon.mu(tta, ta), ttta, tta).then(mon.mu(tta, ta)))


# ---------------------------------------------------------------- state


class State:
    """``T A = H -> A x H`` over heaps ``H = vals^locs``; the capabilities
    are the locations, and a computation's weight bounds what it reads into
    its result and what it writes."""

    def __init__(self, locs: Sequence, vals: Sequence, bound: int = DEFAULT_BOUND):
        self.locs = tuple(locs)
        self.heaps = list(itertools.product(tuple(vals), repeat=len(self.locs)))
        self.bound = bound

    def T(self, a: FinSpace) -> FinSpace:
        if a.universe != self.locs:
            raise ValueError("the space must be weighted by heap locations")
        outs = [(x, h) for x in a.elements for h in self.heaps]
        _check_size(len(outs) ** len(self.heaps) << a.k, self.bound, "state T")
        k, nh = a.k, len(self.heaps)
        da = a.down()
        agree = np.array([[[all(h1[l] == h2[l] for l in range(k) if c >> l & 1) for h2 in self.heaps]
                           for h1 in self.heaps] for c in range(1 << k)])
        frame = np.array([[[all(h2[l] == h1[l] for l in range(k) if not c >> l & 1) for h2 in self.heaps]
                           for h1 in self.heaps] for c in range(1 << k)])
        elements, rows = [], []
        for choice in itertools.product(range(len(outs)), repeat=nh):
            res = [outs[j] for j in choice]
            ai = np.array([a.index(r[0]) for r in res])
            hi = [self.heaps.index(r[1]) for r in res]
            same_val = ai[:, None] == ai[None, :]
            row = np.zeros(1 << k, dtype=bool)
            for c in range(1 << k):
                row[c] = (da[ai, c].all()
                          and np.all(~agree[c] | same_val)
                          and all(frame[c][h][hi[h]] for h in range(nh)))
            elements.append(tuple(res))
            rows.append(row)
        return FinSpace(elements, np.array(rows), a.universe, f"S{a.name}")

    def run(self, f, h):
        return f[self.heaps.index(h)]

    def eta(self, a, ta):
        return FinMap.from_fn(a, ta, lambda x: tuple((x, h) for h in self.heaps), "eta")

    def mu(self, tta, ta):
        def flat(f):
            out = []
            for h in self.heaps:
                g, h1 = self.run(f, h)
                out.append(self.run(g, h1))
            return tuple(out)
        return FinMap.from_fn(tta, ta, flat, "mu")

    def fmap(self, f, ta, tb):
        return FinMap.from_fn(ta, tb, lambda g: tuple((f(x), h1) for x, h1 in g), f"S{f.name}")


def check_state_monad(a: FinSpace, state: State, assoc_space: Optional[FinSpace] = None) -> Report:
    """Monad laws for the state monad; associativity runs over ``assoc_space``
    (default ``a``) because ``T^3`` grows very fast."""
    rep = Report(f"state({a.name}, {len(state.locs)} loc x {len(state.heaps)} heaps)")
    ta = state.T(a)
    tta = state.T(ta)
    rep.attempt("eta is a morphism", lambda: state.eta(a, ta) is not None)
    rep.attempt("mu is a morphism", lambda: state.mu(tta, ta) is not None)
    _agree(rep, "left unit", lambda: state.eta(ta, tta).then(state.mu(tta, ta)), lambda: identity(ta))
    _agree(rep, "right unit", lambda: state.fmap(state.eta(a, ta), ta, tta).then(state.mu(tta, ta)), lambda: identity(ta))
    s = assoc_space if assoc_space is not None else a
    ts = state.T(s)
    tts = state.T(ts)
    ttts = state.T(tts)
    _agree(rep, "associativity",
           lambda: state.mu(ttts, tts).then(state.mu(tts, ts)),
           lambda: state.fmap(state.mu(tts, ts), ttts, tts).then(state.mu(tts, ts)))
    bta, ba = functor_box(ta), functor_box(a)
    try:
        h0 = state.heaps[0]
        phi = FinMap.from_fn(bta, ba, lambda f: state.run(f, h0)[0], "phi")
        back = FinMap.from_fn(ba, bta, lambda x: tuple((x, h) for h in state.heaps))
        rep.add("cancellation", back.then(phi).same(identity(ba)) and phi.then(back).same(identity(bta)),
                f"{len(bta)} vs {len(ba)}")
    except (NotAMorphism, KeyError) as exc:
        rep.add("cancellation", False, str(exc))
    return rep


# ---------------------------------------------------------------- random spaces


def random_space(rng: random.Random, n: int, universe: Sequence, name: str = "X",
                 max_weights: int = 2) -> FinSpace:
    """``n`` elements, each with one or more random admissible weights."""
    universe = tuple(universe)
    subsets = [tuple(c for i, c in enumerate(universe) if m >> i & 1) for m in range(1 << len(universe))]
    weights = [rng.sample(subsets, rng.randint(1, min(max_weights, len(subsets)))) for _ in range(n)]
    return space_from_weights([f"{name.lower()}{i}" for i in range(n)], weights, universe, name)
