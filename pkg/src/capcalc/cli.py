"""``capcalc`` command line: check, run, weigh, embed, unembed and laws.

Exit codes: 0 success, 1 type or parse error (or a failing law), 2 missing
capability binding, 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .interp import MissingBinding, NoMain, StrictPurityViolation, check_program, program_context, reify, render_output, run
from .parser import ParseError, parse, show, show_type
from .typecheck import CapTypeError, ImpureInSafe

EXIT_OK, EXIT_TYPE, EXIT_BINDING, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _bindings(pairs) -> dict:
    out = {}
    for p in pairs or ():
        cap, sep, chan = p.partition("=")
        if not sep or not cap or not chan:
            raise UsageError(f"--bind expects cap=chan, got {p!r}")
        out[cap] = chan
    return out


def _type_error(exc: CapTypeError) -> str:
    kind = type(exc).__name__
    at = getattr(exc, "at", None)
    where = f" at `{show(at)}`" if at is not None and isinstance(exc, ImpureInSafe) else ""
    return f"{kind}: {exc}{where}"


def _emit(out, args, record: dict, text: str):
    if args.json:
        out.write(json.dumps(record, sort_keys=True) + "\n")
    else:
        out.write(text + "\n")


# ---------------------------------------------------------------- subcommands


def cmd_check(args, out) -> int:
    src = parse(_read(args.file))
    ty = check_program(src)
    _emit(out, args, {"type": show_type(ty)}, show_type(ty))
    return EXIT_OK


def cmd_run(args, out) -> int:
    src = parse(_read(args.file))
    v, o = run(src, _bindings(args.bind), strict=not args.no_strict)
    if args.json:
        out.write(json.dumps({"value": show(reify(v)), "output": dict(o)}, sort_keys=True) + "\n")
    else:
        out.write(render_output(o))
        out.write(f"=> {show(reify(v))}\n")
    return EXIT_OK


def cmd_weigh(args, out) -> int:
    from .weights import render_capset, weigh_program

    src = parse(_read(args.file))
    vw, ew = weigh_program(src, _bindings(args.bind), strict=not args.no_strict)
    _emit(out, args, {"value": sorted(vw), "effects": sorted(ew)},
          f"value: {render_capset(vw)}\neffects: {render_capset(ew)}")
    return EXIT_OK


def cmd_embed(args, out) -> int:
    from .stlc import NotStlc, StlcTypeError, embed, parse_stlc, stlc_infer

    try:
        e = parse_stlc(_read(args.file))
        stlc_infer((), e)
    except (NotStlc, StlcTypeError) as exc:
        out.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_TYPE
    _emit(out, args, {"term": show(embed(e))}, f"main = {show(embed(e))}")
    return EXIT_OK


def cmd_unembed(args, out) -> int:
    from .stlc import NotStlc, show_stlc, unembed

    text = _read(args.file)
    src = parse(text)
    if src.main is None:
        raise NoMain(f"{args.file} has no main")
    g = program_context(src)
    try:
        s = unembed(src.main, g)
    except NotStlc as exc:
        out.write(f"NotStlc: {exc}\n")
        return EXIT_TYPE
    _emit(out, args, {"term": show_stlc(s)}, show_stlc(s))
    return EXIT_OK


def cmd_laws(args, out) -> int:
    from .laws import SUITES, run_suites

    seed = args.seed
    if seed is None:
        env = os.environ.get("CAPCALC_SEED")
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise UsageError(f"CAPCALC_SEED must be an integer, got {env!r}")
    suites = SUITES if args.suite == "all" else (args.suite,)
    monoids = (args.monoid,) if args.monoid else ("trivial", "idem", "trunc2")
    lines = run_suites(suites, seed, args.instances, args.caps, args.max_carrier, monoids)
    for l in lines:
        out.write((l.json() if args.json else l.text()) + "\n")
    failed = sum(not l.ok for l in lines)
    if not args.json:
        out.write(f"{len(lines) - failed} passed, {failed} failed (seed {seed})\n")
    return EXIT_OK if failed == 0 else EXIT_TYPE


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="capcalc", description="Capability calculus toolkit.")
    p.add_argument("--json", action="store_true", help="one JSON object per result line")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def with_file(name, fn, help):
        s = sub.add_parser(name, help=help)
        s.add_argument("file")
        s.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        s.set_defaults(fn=fn)
        return s

    with_file("check", cmd_check, "parse and typecheck a .cap file")
    for name, fn, help in (("run", cmd_run, "typecheck and evaluate"), ("weigh", cmd_weigh, "print value and effect weights")):
        s = with_file(name, fn, help)
        s.add_argument("--bind", action="append", metavar="CAP=CHAN", default=[])
        s.add_argument("--no-strict", action="store_true", help="do not assert that boxes print nothing")
    with_file("embed", cmd_embed, "print the .cap image of a .stlc term")
    with_file("unembed", cmd_unembed, "print the .stlc image of a .cap term")

    s = sub.add_parser("laws", help="run seeded property suites")
    s.add_argument("--suite", choices=["eq", "model", "embed", "all"], default="all")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--instances", type=int, default=None)
    s.add_argument("--caps", type=int, default=2)
    s.add_argument("--max-carrier", type=int, default=3)
    s.add_argument("--monoid", choices=["trivial", "idem", "trunc2"], default=None)
    s.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    s.set_defaults(fn=cmd_laws)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.fn(args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except ParseError as exc:
        out.write(f"ParseError: {exc}\n")
        return EXIT_TYPE
    except CapTypeError as exc:
        out.write(_type_error(exc) + "\n")
        return EXIT_TYPE
    except NoMain as exc:
        out.write(f"NoMain: {exc}\n")
        return EXIT_TYPE
    except MissingBinding as exc:
        out.write(f"MissingBinding: {exc}\n")
        return EXIT_BINDING
    except StrictPurityViolation as exc:
        out.write(f"StrictPurityViolation: {exc}\n")
        return EXIT_TYPE


if __name__ == "__main__":
    sys.exit(main())
