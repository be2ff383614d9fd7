"""Canonical (minimal) capability weights of runtime values and programs."""
from __future__ import annotations

from typing import Mapping

from .interp import Output, VBox, VChan, VClosure, VPair, VStr, VUnit, Value, run

CapSet = frozenset


class BoxWeightViolation(Exception):
    """A boxed payload owns capabilities; the interpreter is broken."""


def weight_of(v: Value) -> CapSet:
    if isinstance(v, (VUnit, VStr)):
        return frozenset()
    if isinstance(v, VChan):
        return frozenset([v.name])
    if isinstance(v, VPair):
        return weight_of(v.left) | weight_of(v.right)
    if isinstance(v, VClosure):
        # the captured environment is already cut down to the free variables
        return frozenset().union(*(weight_of(b.value) for b in v.env))
    if isinstance(v, VBox):
        inner = weight_of(v.payload)
        if inner:
            raise BoxWeightViolation(f"boxed value owns {sorted(inner)}")
        return frozenset()
    raise TypeError(f"not a value: {v!r}")


def weight_of_output(o: Output) -> CapSet:
    return frozenset(c for c, s in o.items() if s)


def weigh_program(src, bindings: Mapping, strict: bool = True) -> tuple:
    """``(value weight, effect weight)`` of running ``src``."""
    v, o = run(src, bindings, strict=strict)
    return weight_of(v), weight_of_output(o)


def render_capset(c: CapSet) -> str:
    return "{" + ", ".join(sorted(c)) + "}"
