"""Smoke test for the Python bindings.

Run from the repository root:  python3 python/smoke_test.py
Builds the extension with cargo when it is not importable already.
"""

import importlib
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        return importlib.import_module("quadeq_py")
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "quadeq-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    built = ROOT / "target" / "release" / "libquadeq_py.so"
    dest = pathlib.Path(tempfile.mkdtemp()) / "quadeq_py.so"
    shutil.copy(built, dest)
    sys.path.insert(0, str(dest.parent))
    return importlib.import_module("quadeq_py")


def main():
    q = load()

    sys_ = q.EquationSystem.parse("gens: a b\nvars: x y\n[x,y][a,b] = 1\n")
    assert sys_.is_quadratic() and sys_.size() == 8
    assert sys_.variables() == ["x", "y"]

    r = q.solve(sys_)
    assert r.verdict == "sat", r.verdict
    assert sys_.is_solution(r.witness)
    assert sys_.is_solution({"x": "b", "y": "a"})
    assert not sys_.is_solution({"x": "a", "y": "b"})

    w = q.oracle(sys_, 1)
    assert w is not None and sys_.is_solution(w)
    unsat = q.EquationSystem.parse("gens: a b\nvars: x\nx^2 = a b\n")
    assert q.solve(unsat).verdict == "unsat"
    assert q.oracle(unsat, 2) is None

    tri = q.triangulate(q.EquationSystem.parse("gens: a b\nvars: x y\nx y x^-1 y^-1 = a b\n"))
    assert tri.is_quadratic()
    kind, genus, std = q.standardize(sys_)
    assert (kind, genus) == ("orientable", 1), (kind, genus)
    assert "x1" in str(std)

    torus = q.surface("a b a^-1 b^-1\n")
    assert torus.orientable and torus.genus == 1 and torus.euler == 0

    big = q.compute_l(1, 1, 2)
    assert big.log2 == 5_171_200 and big.exponent == 5_171_200
    assert q.compute_l(1, 0, 1).log2 == 5050

    eq = q.binpack_equation([1, 1, 2], 2, 2, free_form=True)
    assert eq.is_quadratic() and eq.variables() == ["z1", "z2", "z3"]
    assert q.check_equivalence([1, 1, 2], 2, 2) == (True, "Sat", True)
    packed, _, agree = q.check_equivalence([3, 1], 2, 2)
    assert not packed and agree

    trace = q.geneq_trace(sys_)
    assert trace is not None and trace.strip()
    assert q.geneq_trace(unsat) is None

    try:
        q.EquationSystem.parse("gens: a\nvars: x\nx = q\n")
    except ValueError as e:
        assert "line 3" in str(e)
    else:
        raise AssertionError("parse error not raised")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
