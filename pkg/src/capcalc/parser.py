"""Concrete syntax for ``.cap`` source files, and a printer that round-trips.

    fun c: cap -> c.print("hello")
    let box x = z in box x
    []unit -> unit * str

``e1; e2`` is sugar for ``(fun _: unit -> e2) e1``.  Line comments start
with ``--``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional

from .syntax import (
    CAP, STR, UNIT, App, Arrow, Box, BoxE, CapT, ChanLit, Fst, Lam, LetBox, Pair,
    Print, Prod, Snd, StrLit, StrT, Term, Type, UnitLit, UnitT, Var, seq,
)

KEYWORDS = {"fun", "let", "box", "in", "fst", "snd", "print", "unit", "str", "cap", "main"}


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


@dataclass(frozen=True)
class CapDecl:
    name: str


@dataclass(frozen=True)
class LetDecl:
    name: str
    term: Term
    ty: Optional[Type] = None


@dataclass(frozen=True)
class SourceFile:
    caps: tuple = ()
    lets: tuple = ()
    main: Optional[Term] = None
    # declaration order, for diagnostics and printing
    order: tuple = field(default=(), compare=False)


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>--[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<unitlit>\(\s*\))
  | (?P<sym>->|\[\]|[()*,.;:=])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


@dataclass
class Tok:
    kind: str  # 'sym', 'ident', 'kw', 'string', 'unit', 'eof'
    text: str
    pos: int


def tokenize(text: str) -> list:
    toks, i = [], 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            line, col = _line_col(text, i)
            raise ParseError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        if kind == "string":
            toks.append(Tok("string", json.loads(m.group()), i))
        elif kind == "unitlit":
            toks.append(Tok("unit", "()", i))
        elif kind == "sym":
            toks.append(Tok("sym", m.group(), i))
        elif kind == "ident":
            word = m.group()
            toks.append(Tok("kw" if word in KEYWORDS else "ident", word, i))
        i = m.end()
    toks.append(Tok("eof", "", len(text)))
    return toks


def _line_col(text: str, pos: int):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, kind, text=None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def error(self, msg, tok=None):
        tok = tok or self.tok
        line, col = _line_col(self.text, tok.pos)
        return ParseError(msg, line, col)

    def expect(self, kind, text=None) -> Tok:
        if not self.at(kind, text):
            want = text or kind
            got = self.tok.text or self.tok.kind
            raise self.error(f"expected {want!r}, got {got!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        return self.expect("ident").text

    # -- types

    def type_(self) -> Type:
        left = self.prod_type()
        if self.at("sym", "->"):
            self.i += 1
            return Arrow(left, self.type_())
        return left

    def prod_type(self) -> Type:
        t = self.prefix_type()
        while self.at("sym", "*"):
            self.i += 1
            t = Prod(t, self.prefix_type())
        return t

    def prefix_type(self) -> Type:
        if self.at("sym", "[]"):
            self.i += 1
            return Box(self.prefix_type())
        if self.at("kw", "unit"):
            self.i += 1
            return UNIT
        if self.at("kw", "str"):
            self.i += 1
            return STR
        if self.at("kw", "cap"):
            self.i += 1
            return CAP
        if self.at("sym", "("):
            self.i += 1
            t = self.type_()
            self.expect("sym", ")")
            return t
        raise self.error(f"expected a type, got {self.tok.text or self.tok.kind!r}")

    def lambda_annotation(self) -> Type:
        # `fun x: A -> B -> body`: the last `->` that still leaves a type to
        # its left separates the annotation from the body.
        parts = [self.prod_type()]
        self.expect("sym", "->")
        while True:
            save = self.i
            try:
                t = self.prod_type()
            except ParseError:
                self.i = save
                break
            if not self.at("sym", "->"):
                self.i = save
                break
            self.i += 1
            parts.append(t)
        ty = parts[-1]
        for p in reversed(parts[:-1]):
            ty = Arrow(p, ty)
        return ty

    # -- terms

    def term(self) -> Term:
        if self.at("kw", "fun"):
            self.i += 1
            x = self.ident()
            self.expect("sym", ":")
            ty = self.lambda_annotation()
            return Lam(x, ty, self.term())
        if self.at("kw", "let") and self.peek().kind == "kw" and self.peek().text == "box":
            self.i += 2
            x = self.ident()
            self.expect("sym", "=")
            bound = self.term()
            self.expect("kw", "in")
            return LetBox(x, bound, self.term())
        e = self.app()
        if self.at("sym", ";") and not self._decl_follows(1):
            self.i += 1
            return seq(e, self.term())
        return e

    def _decl_follows(self, k) -> bool:
        t = self.peek(k)
        if t.kind == "eof":
            return True
        if t.kind == "kw" and t.text in ("cap", "main"):
            return True
        if t.kind == "kw" and t.text == "let":
            nxt = self.peek(k + 1)
            return not (nxt.kind == "kw" and nxt.text == "box")
        return False

    def _starts_operand(self) -> bool:
        t = self.tok
        if t.kind in ("ident", "string", "unit"):
            return True
        if t.kind == "sym" and t.text == "(":
            return True
        return t.kind == "kw" and t.text in ("fst", "snd", "box")

    def app(self) -> Term:
        e = self.prefix()
        while self._starts_operand():
            e = App(e, self.prefix())
        return e

    def prefix(self) -> Term:
        for kw, ctor in (("fst", Fst), ("snd", Snd), ("box", BoxE)):
            if self.at("kw", kw):
                self.i += 1
                if self.at("kw", "fun") or self.at("kw", "let"):
                    return ctor(self.term())
                return ctor(self.prefix())
        return self.postfix()

    def postfix(self) -> Term:
        e = self.atom()
        while self.at("sym", ".") and self.peek().kind == "kw" and self.peek().text == "print":
            self.i += 2
            self.expect("sym", "(")
            msg = self.term()
            self.expect("sym", ")")
            e = Print(e, msg)
        return e

    def atom(self) -> Term:
        t = self.tok
        if t.kind == "unit":
            self.i += 1
            return UnitLit()
        if t.kind == "string":
            self.i += 1
            return StrLit(t.text)
        if t.kind == "ident":
            self.i += 1
            return Var(t.text, pos=t.pos)
        if self.at("sym", "("):
            self.i += 1
            e = self.term()
            if self.at("sym", ","):
                self.i += 1
                r = self.term()
                self.expect("sym", ")")
                return Pair(e, r)
            self.expect("sym", ")")
            return e
        raise self.error(f"expected a term, got {t.text or t.kind!r}")

    # -- files

    def source_file(self) -> SourceFile:
        caps, lets, main, order, seen = [], [], None, [], set()
        while not self.at("eof"):
            if main is not None:
                raise self.error("`main` must be the last declaration")
            start = self.tok
            if self.at("kw", "cap"):
                self.i += 1
                name = self.ident()
                caps.append(CapDecl(name))
            elif self.at("kw", "let"):
                self.i += 1
                name = self.ident()
                ty = None
                if self.at("sym", ":"):
                    self.i += 1
                    ty = self.type_()
                self.expect("sym", "=")
                lets.append(LetDecl(name, self.term(), ty))
            elif self.at("kw", "main"):
                self.i += 1
                self.expect("sym", "=")
                name = "main"
                main = self.term()
            else:
                raise self.error(f"expected a declaration, got {self.tok.text or self.tok.kind!r}")
            if name in seen:
                raise self.error(f"duplicate declaration {name!r}", start)
            seen.add(name)
            order.append(name)
            if self.at("sym", ";"):
                self.i += 1
        return SourceFile(tuple(caps), tuple(lets), main, tuple(order))


def parse(text: str) -> SourceFile:
    return _Parser(text).source_file()


def parse_term(text: str) -> Term:
    p = _Parser(text)
    e = p.term()
    p.expect("eof")
    return e


def parse_type(text: str) -> Type:
    p = _Parser(text)
    t = p.type_()
    p.expect("eof")
    return t


# ---------------------------------------------------------------- printing

# term levels: 0 binder/sequence, 1 application, 2 prefix operand, 3 atom
# type levels: 0 arrow, 1 product, 2 prefix


def show_type(t: Type, level: int = 0) -> str:
    if isinstance(t, UnitT):
        return "unit"
    if isinstance(t, StrT):
        return "str"
    if isinstance(t, CapT):
        return "cap"
    if isinstance(t, Box):
        return "[]" + show_type(t.body, 2)
    if isinstance(t, Prod):
        s = f"{show_type(t.left, 1)} * {show_type(t.right, 2)}"
        return s if level <= 1 else f"({s})"
    if isinstance(t, Arrow):
        s = f"{show_type(t.dom, 1)} -> {show_type(t.cod, 0)}"
        return s if level == 0 else f"({s})"
    raise TypeError(f"not a type: {t!r}")


def show(e: Term, level: int = 0) -> str:
    if isinstance(e, UnitLit):
        return "()"
    if isinstance(e, StrLit):
        return json.dumps(e.text, ensure_ascii=False)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, ChanLit):
        return f"@{e.name}"
    if isinstance(e, Pair):
        return f"({show(e.left)}, {show(e.right)})"
    if isinstance(e, Print):
        return f"{show(e.chan, 3)}.print({show(e.msg)})"
    if isinstance(e, (Fst, Snd, BoxE)):
        kw = {Fst: "fst", Snd: "snd", BoxE: "box"}[type(e)]
        s = f"{kw} {show(e.body, 2)}"
        return s if level <= 2 else f"({s})"
    if isinstance(e, App):
        s = f"{show(e.fn, 1)} {show(e.arg, 2)}"
        return s if level <= 1 else f"({s})"
    if isinstance(e, Lam):
        s = f"fun {e.var}: {show_type(e.ty)} -> {show(e.body)}"
        return s if level == 0 else f"({s})"
    if isinstance(e, LetBox):
        s = f"let box {e.var} = {show(e.bound)} in {show(e.body)}"
        return s if level == 0 else f"({s})"
    raise TypeError(f"not a term: {e!r}")


def show_file(src: SourceFile) -> str:
    lines = [f"cap {c.name}" for c in src.caps]
    for d in src.lets:
        ann = f": {show_type(d.ty)}" if d.ty is not None else ""
        lines.append(f"let {d.name}{ann} = {show(d.term)}")
    if src.main is not None:
        lines.append(f"main = {show(src.main)}")
    return "\n".join(lines) + "\n"
