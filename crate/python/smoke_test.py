#!/usr/bin/env python3
"""Builds the extension module and exercises it from Python.

Usage: python3 python/smoke_test.py [--release]
"""
import importlib.util
import math
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build(release):
    cmd = ["cargo", "build", "-p", "momat-python"] + (["--release"] if release else [])
    subprocess.run(cmd, cwd=ROOT, check=True)
    profile = "release" if release else "debug"
    for name in ("libmomat.so", "libmomat.dylib", "momat.dll"):
        lib = ROOT / "target" / profile / name
        if lib.exists():
            return lib
    sys.exit("extension library not found after build")


def load(lib, workdir):
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    target = pathlib.Path(workdir) / f"momat{suffix}"
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("momat", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def close(a, b, tol):
    return abs(a - b) <= tol


def check(momat):
    p = momat.Params()
    assert p.get("tau") == 10
    assert len(momat.Params.keys()) == 23
    try:
        momat.Params(rho_l=1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("rho_l=1.5 accepted")

    t = momat.run(horizon=2)
    assert len(t) == 3
    price = t.column("GoodPrice")
    assert close(price[0], 30.0, 0.02)
    assert close(price[1], 141.7, 0.15)
    assert t.column("AccResBank")[1] == 208.0
    assert t.columns()[:2] == ["period", "ConsumRes"]
    assert t.to_csv().startswith("period,")

    long = momat.run(horizon=100, engine="categorical")
    assert len(long) == 101
    assert long.max_invariance() <= 1e-9
    report = long.stability()
    assert report["bounded"]
    assert report["drift"]["GoodPrice"] < 0.01
    assert momat.compare(horizon=100) == 0.0
    assert set(long.final_accounts()) == set(momat.account_names())

    assert close(momat.production(110.0, 20.0, 0.42, 0.75), 31.17, 0.02)
    assert momat.production(0.0, 0.0, 0.42, 0.75) == 1.0
    assert close(momat.investment_sigmoid(0.0, 20.0, 480.0, 200.0), 260.0, 1e-12)
    assert close(momat.dividend_decision(52.0, 0.0, 0.15, 0.4), 7.8, 1e-12)
    assert momat.memory_push([1.0, 2.0, 3.0], 4.0) == [4.0, 1.0, 2.0]

    pairs = momat.pullback(
        ["a", "b"], ["x", "y", "z"], ["t", "f"],
        [("a", "t"), ("b", "f")], [("x", "t"), ("y", "t"), ("z", "f")],
    )
    assert pairs == [("a", "x"), ("a", "y"), ("b", "z")]
    classes = momat.pushout(["t"], ["a", "b"], ["x", "y"], [("t", "a")], [("t", "x")])
    assert classes == ["[a=x]", "b", "y"]

    try:
        momat.run(horizon=5, params=momat.Params(tau=1))
    except momat.MomatError as e:
        assert "booking 7" in str(e)
    else:
        raise AssertionError("one-period memory should overdraw")
    assert not math.isnan(p.to_dict()["lambda"])


def main():
    lib = build("--release" in sys.argv)
    with tempfile.TemporaryDirectory() as workdir:
        check(load(lib, workdir))
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
