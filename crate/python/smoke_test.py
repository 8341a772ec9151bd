#!/usr/bin/env python3
"""Smoke test for the geptrkn_py extension module.

Builds the cdylib if needed, loads it from the cargo target directory, and
exercises the main types end to end. Run from anywhere:

    python3 python/smoke_test.py
"""

import math
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    lib = REPO / "target" / "release" / "libgeptrkn_py.so"
    if not lib.exists():
        subprocess.run(
            ["cargo", "build", "-p", "geptrkn-py", "--release"],
            cwd=REPO,
            check=True,
        )
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    stage = Path(tempfile.mkdtemp(prefix="geptrkn_py_"))
    shutil.copy2(lib, stage / f"geptrkn_py{suffix}")
    sys.path.insert(0, str(stage))
    import geptrkn_py

    return geptrkn_py


def main():
    g = load_module()

    # Coefficient derivation and orthogonality classification.
    s5 = g.Scheme.by_name("geptrkn5")
    assert s5.s == 3 and s5.step_order == 5, s5
    orth = s5.orthogonality()
    assert orth["satisfied_order"] == 5, orth
    assert abs(sum(s5.step_weights) - 0.5) < 1e-14
    assert abs(sum(s5.step_deriv_weights) - 1.0) < 1e-14

    # JSON round trip.
    again = g.Scheme.from_json(s5.to_json())
    assert again.nodes == s5.nodes

    # Custom nodes: the two-point scheme has the classic weights.
    s2 = g.Scheme([0.0, 1.0])
    assert s2.step_order == 2
    assert abs(s2.step_weights[0] - 1.0 / 3.0) < 1e-14

    # Fixed-step run on the linear benchmark against its closed form.
    line = g.Problem.line()
    run = g.integrate_fixed(line, s5, 1.0 / 32.0)
    y_exact, yp_exact = line.exact(10.0)
    assert abs(run.y_end[0] - y_exact[0]) < 1e-6, run.y_end
    assert run.stats["nfe"] == 3 * run.stats["accepts"]

    # Dense output inside the span.
    y_mid, _ = run.sol(4.321)
    y_mid_exact, _ = line.exact(4.321)
    assert abs(y_mid[0] - y_mid_exact[0]) < 1e-6

    # Adaptive run on the Van der Pol oscillator against the reference solver.
    vand = g.Problem.vand(mu=1.0)
    run = g.integrate_adaptive(vand, s5, 1e-8)
    y_ref, _ = vand.reference(10.0)
    assert abs(run.y_end[0] - y_ref[0]) < 1e-6
    assert run.stats["rejects"] >= 0

    # Problem with a Python right-hand side: y'' = -y, y(0)=0, y'(0)=1.
    sine = g.Problem.custom(1, 0.0, math.pi, [0.0], [1.0], lambda t, y, yp: [-y[0]])
    run = g.integrate_adaptive(sine, s5, 1e-10)
    assert abs(run.y_end[0] - math.sin(math.pi)) < 1e-7
    assert abs(run.yp_end[0] - (-1.0)) < 1e-7

    # Stability machinery.
    m = s5.stability_matrix(0.0, 0.0)
    assert abs(g.spectral_radius(m) - 1.0) < 1e-10
    region = g.scan_region(s5, z_min=-10.0, nu_min=-10.0, n_z=40, n_nu=40)
    assert 0.0 < region["fraction_stable"] < 1.0
    assert region["failed_cells"] == 0

    # Telegraph problem dimensions.
    tele = g.Problem.tele()
    assert tele.dim == 10

    print("smoke test passed")


if __name__ == "__main__":
    main()
