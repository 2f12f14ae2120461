#!/usr/bin/env python3
"""Smoke test for the lplab_py extension module.

Builds the cdylib with cargo if needed, loads it, and runs a few
closed-form checks. Exits nonzero on the first failure.
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    lib = None
    for profile in ("release", "debug"):
        cand = ROOT / "target" / profile / "liblplab_py.so"
        if cand.exists():
            lib = cand
            break
    if lib is None:
        print("building lplab-py (release)...")
        subprocess.run(
            ["cargo", "build", "--release", "-p", "lplab-py"], cwd=ROOT, check=True
        )
        lib = ROOT / "target" / "release" / "liblplab_py.so"
    stage = Path(tempfile.mkdtemp(prefix="lplab_py_"))
    shutil.copy2(lib, stage / "lplab_py.so")
    sys.path.insert(0, str(stage))
    import lplab_py

    return lplab_py


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol * max(1.0, abs(a), abs(b)), f"{a} != {b}"


def main():
    m = load_module()

    # Norms and the max-norm sentinel.
    approx(m.norm([3.0, 4.0], 2.0), 5.0)
    approx(m.norm([1.0, -2.0, 0.0], math.inf), 2.0)

    # Closed-form oracles.
    approx(m.gamma_ratio_moment(3, 1.0, 2.0), 12.0)
    approx(m.gk_equiv([3.0, 2.0, 1.0], 1.0, 2), 6.0 + math.sqrt(2.0))
    approx(m.cone_moment_estimate(3, 1.0, 2.0, [1.0, 0.0, 0.0]), 2.0 / math.sqrt(12.0))
    approx(m.ball_volume(3, 1.0), 8.0 / 6.0)
    approx(m.bernstein_bound(1.0, 8, 1.0), 2.0 / math.e)

    # Seeded sampling: deterministic, on-sphere.
    a = m.sample_cone(4, 1.5, 32, seed=7, stream=3)
    b = m.sample_cone(4, 1.5, 32, seed=7, stream=3)
    assert a == b, "identical seeds must reproduce draws"
    for y in a:
        assert abs(m.norm(y, 1.5) - 1.0) <= 1e-12
    for x in m.sample_ball(3, 2.0, 32, seed=1):
        assert m.norm(x, 2.0) <= 1.0 + 1e-12
    approx(m.minkowski_map([3.0, 4.0], 2.0)[0], 0.6)

    # Exact geometry: cross-polytope and cube golden values.
    cross = m.SymmetricPolytope([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    assert cross.num_vertices() == 6 and cross.num_facets() == 8
    approx(cross.volume(), 8.0 / 6.0)
    cube = m.SymmetricPolytope(
        [[1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [1.0, -1.0, 1.0], [-1.0, 1.0, 1.0]]
    )
    approx(cube.volume(), 8.0)
    approx(cube.isotropic_constant(), 1.0 / math.sqrt(12.0), tol=1e-8)
    assert cube.contains([0.0, 0.0, 0.0]) and not cube.contains([2.0, 0.0, 0.0])

    square = m.SymmetricPolytope([[1.0, 0.0], [0.0, 1.0]])
    approx(square.subset_sup_bound(), 1.0 / 3.0)
    approx(square.facet_l1_bound(), 1.0 + math.sqrt(2.0))
    mean, se = square.mc_l1(20000, seed=5)
    assert abs(mean - 2.0 / 3.0) <= 3.0 * se

    # One full trial with its inequalities.
    rec = m.run_trial(2.0, 3, 5, seed=11)
    assert rec["status"] == "ok", rec
    assert rec["trace_cov"] <= rec["subset_bound"] + 1e-12
    assert rec["coupling_ok"] and rec["regime_ok"]
    assert m.check_regime(3, 5) and not m.check_regime(3, 6)

    print("lplab_py smoke test: all checks passed")


if __name__ == "__main__":
    main()
