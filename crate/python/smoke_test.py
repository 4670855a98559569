#!/usr/bin/env python3
"""End-to-end smoke test of the rcsynth_py extension module.

Builds the extension with cargo, loads it from a scratch directory, and
drives every exposed type against values the Rust test suite pins down
independently.

Usage: python3 python/smoke_test.py
"""

import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[1]


def build_and_import():
    subprocess.run(["cargo", "build", "-p", "rcsynth-python"], cwd=ROOT, check=True)
    lib = ROOT / "target" / "debug" / "librcsynth_py.so"
    if not lib.exists():  # e.g. macOS
        lib = ROOT / "target" / "debug" / "librcsynth_py.dylib"
    scratch = pathlib.Path(tempfile.mkdtemp(prefix="rcsynth_py_"))
    shutil.copy2(lib, scratch / "rcsynth_py.so")
    sys.path.insert(0, str(scratch))
    import rcsynth_py

    return rcsynth_py


def main():
    rc = build_and_import()
    print(f"rcsynth_py {rc.__version__}")

    # Permutations: both constructor forms, composition, inversion.
    p = rc.Perm("[1,0,3,2,5,7,4,6]")
    assert p.lines == 3 and len(p) == 8 and p[4] == 5
    assert rc.Perm(p.table()) == p
    assert p.compose(p.inverse()).is_identity()
    assert str(rc.Perm([1, 0, 2, 3, 4, 5, 6, 7])) == "[1,0,2,3,4,5,6,7]"

    # Circuits: parsing, simulation, and the round trip through a Perm.
    c = rc.Circuit("Tbd-c Tbd-a Tcd-b")
    assert c.lines == 4 and c.gate_count == 3
    assert rc.Circuit("Na").simulate(0) == 1
    assert c.to_perm().compose(c.reversed().to_perm()).is_identity()

    # Quantum cost: a plain Toffoli cascade, then a mergeable pair.
    assert rc.quantum_cost(c).qc == 15
    pair = rc.quantum_cost(rc.Circuit("Tab-c Ca-b"))
    assert (pair.raw_qc, pair.qc, pair.marked) == (6, 4, "<Tab-c Ca-b>")

    # Database: build, file round trip, direct lookups.
    db = rc.Database.build(4, depth=4)
    assert db.lines == 4 and db.depth == 4 and len(db) > 0
    with tempfile.TemporaryDirectory() as d:
        path = pathlib.Path(d) / "d4.rcdb"
        db.save(path)
        again = rc.Database.load(path)
        assert (again.lines, again.depth, len(again)) == (4, 4, len(db))
    identity = rc.Perm(list(range(16)))
    assert db.lookup_gc(identity) == 0

    # Synthesis on a function with two optimal circuits of cost 15 each,
    # beaten by a cheaper circuit one gate longer.
    g1 = rc.Perm("[0,1,2,3,4,5,6,7,8,9,13,12,14,15,11,10]")
    syn = rc.Synthesizer(db)
    assert syn.optimal_gc(g1) == 3
    assert syn.synthesize(g1).to_perm() == g1

    rep = syn.enumerate(g1, 3)
    assert (rep.count, rep.qc_min, rep.qc_max) == (2, 15, 15)
    assert rep.witness.to_perm() == g1
    assert rc.quantum_cost(rep.witness).qc == 15

    best = syn.qc_minimize(g1, slack=1)
    assert best.optimal_gc == 3 and best.best_qc == 12
    assert best.best.gate_count == 4 and best.best.to_perm() == g1
    assert [r.count for r in best.reports] == [2, 13]

    # Error mapping: bad input is a ValueError, past-horizon a RuntimeError.
    try:
        rc.Perm("[0,0,1,2,3,4,5,6]")
        raise AssertionError("duplicate entries must be rejected")
    except ValueError:
        pass
    deep = rc.Perm("[1,2,4,8,0,3,5,6,7,9,10,11,12,13,14,15]")  # needs 10 gates
    try:
        syn.optimal_gc(deep)
        raise AssertionError("a depth-4 database cannot see distance 10")
    except RuntimeError:
        pass

    print("smoke test passed")


if __name__ == "__main__":
    main()
