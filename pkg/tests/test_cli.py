import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from capcalc.cli import main

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"


def cli(*argv, env=None):
    out, err = io.StringIO(), io.StringIO()
    if env is None:
        code = main(list(argv), out, err)
    else:
        old = dict(os.environ)
        os.environ.update(env)
        try:
            code = main(list(argv), out, err)
        finally:
            os.environ.clear()
            os.environ.update(old)
    return code, out.getvalue(), err.getvalue()


def prog(name):
    return str(PROGRAMS / name)


def test_run_hello():
    code, out, _ = cli("run", prog("hello.cap"), "--bind", "stdout=stdout")
    assert code == 0
    assert out == "stdout: hello world\n=> ()\n"


def test_run_order():
    code, out, _ = cli("run", prog("order.cap"), "--bind", "c=c")
    assert code == 0 and out.startswith("c: AB")


def test_run_json():
    code, out, _ = cli("--json", "run", prog("hello.cap"), "--bind", "stdout=fd1")
    assert code == 0
    assert json.loads(out) == {"value": "()", "output": {"fd1": "hello world"}}


def test_missing_binding_exits_2():
    code, out, _ = cli("run", prog("hello.cap"))
    assert code == 2 and out.startswith("MissingBinding")


def test_check():
    assert cli("check", prog("safety/extract.cap"))[:2] == (0, "[]str -> str\n")


@pytest.mark.parametrize("name,var", [("reject_pure.cap", "x"), ("safety/pure.cap", "x"), ("safety/fmap.cap", "f")])
def test_rejections_name_the_variable(name, var):
    code, out, _ = cli("check", prog(name))
    assert code == 1
    assert out.startswith("ImpureInSafe") and f"at `{var}`" in out


def test_parse_error_exits_1(tmp_path):
    bad = tmp_path / "bad.cap"
    bad.write_text("main = (")
    code, out, _ = cli("check", str(bad))
    assert code == 1 and out.startswith("ParseError")


@pytest.mark.parametrize("argv", [
    (), ("frobnicate",), ("check",), ("run", "nowhere.cap"), ("run", "x.cap", "--bind", "oops"),
    ("laws", "--suite", "nope"),
])
def test_usage_errors_exit_64(argv):
    assert cli(*argv)[0] == 64


def test_weigh():
    code, out, _ = cli("weigh", prog("weights/pair.cap"), "--bind", "c1=c1", "--bind", "c2=c2")
    assert code == 0 and out == "value: {c1, c2}\neffects: {}\n"
    code, out, _ = cli("weigh", prog("weights/pair.cap"), "--json", "--bind", "c1=c1", "--bind", "c2=c2")
    assert json.loads(out) == {"value": ["c1", "c2"], "effects": []}


def test_embed_and_unembed(tmp_path):
    code, out, _ = cli("embed", prog("stlc/id.stlc"))
    assert code == 0 and out.startswith("main = ")
    img = tmp_path / "id.cap"
    img.write_text(out)
    assert cli("check", str(img))[1] == "[]unit -> unit\n"
    code, back, _ = cli("unembed", str(img))
    assert code == 0 and back.startswith("fun ")


def test_unembed_rejects_products(tmp_path):
    p = tmp_path / "pair.cap"
    p.write_text("main = ((), ())")
    code, out, _ = cli("unembed", str(p))
    assert code == 1 and out.startswith("NotStlc")


def test_laws_small_run():
    code, out, _ = cli("laws", "--suite", "eq", "--seed", "1", "--instances", "3")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("PASS eq/")
    assert lines[-1].endswith("0 failed (seed 1)")


def test_laws_seed_from_environment():
    a = cli("laws", "--suite", "embed", "--instances", "5", env={"CAPCALC_SEED": "4"})
    b = cli("laws", "--suite", "embed", "--instances", "5", "--seed", "4")
    assert a == b and a[1].rstrip().endswith("(seed 4)")
    assert cli("laws", "--suite", "eq", env={"CAPCALC_SEED": "x"})[0] == 64


def test_laws_json():
    code, out, _ = cli("laws", "--suite", "eq", "--seed", "0", "--instances", "1", "--json")
    recs = [json.loads(l) for l in out.splitlines()]
    assert code == 0 and recs and all(r["status"] == "PASS" for r in recs)


def test_console_output_is_deterministic():
    argv = [sys.executable, "-m", "capcalc", "laws", "--suite", "all", "--seed", "7", "--instances", "4"]
    first = subprocess.run(argv, capture_output=True, check=False)
    second = subprocess.run(argv, capture_output=True, check=False)
    assert first.returncode == 0, first.stdout.decode()[-2000:]
    assert first.stdout == second.stdout
