"""Build the extension with cargo, import it and check a few known values.

Run from anywhere: python3 python/smoke_test.py
Pass --no-build to import an already installed bell_mdl_py (e.g. after
`maturin develop`).
"""

import math
import os
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_and_stage() -> str:
    env = dict(os.environ, PYO3_BUILD_EXTENSION_MODULE="1", PYO3_PYTHON=sys.executable)
    subprocess.run(
        ["cargo", "build", "--release", "-p", "bell-mdl-py"],
        cwd=ROOT, env=env, check=True,
    )
    target = Path(os.environ.get("CARGO_TARGET_DIR", ROOT / "target")) / "release"
    lib = next(p for p in (target / "libbell_mdl_py.so", target / "libbell_mdl_py.dylib",
                           target / "bell_mdl_py.dll") if p.exists())
    stage = tempfile.mkdtemp(prefix="bell_mdl_py_")
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy(lib, Path(stage) / f"bell_mdl_py{suffix}")
    return stage


def main() -> None:
    if "--no-build" not in sys.argv:
        sys.path.insert(0, build_and_stage())
    import bell_mdl_py as m

    c = m.solve_coefficients(1.0, 0.0)
    closed = m.coefficients_gamma0(1.0)
    assert abs(c.c1 - closed.c1) < 1e-12 and abs(c.c2 - closed.c2) < 1e-12, (c, closed)
    assert abs(closed.c1 - (1 + math.cos(1.0)) / (8 * (math.pi - 1.0))) < 1e-15

    for g in (-0.3, 0.0, 0.3):
        assert abs(m.expectation(2.0, g) + math.cos(2.0)) < 1e-9

    est = m.estimate_correlation_mc(math.pi / 4, 0.0, n=200_000, seed=1)
    assert abs(est.mean + math.cos(math.pi / 4)) < 4 * est.std_err, est

    assert abs(m.distance(math.pi / 4, 3 * math.pi / 4) - 0.276142) < 1e-5
    phi_star, d_max, _ = m.gamma0_maximum()
    assert abs(phi_star - 0.81047) < 1e-4 and abs(d_max - 0.276434) < 1e-5
    r = m.find_dmax(0.0, grid_n=48)
    assert abs(r.d_max - d_max) < 1e-6, r

    lhs, rhs, violated = m.bell_check(math.pi / 2, math.pi / 4, math.pi / 4, gamma=0.2)
    assert violated and abs(lhs - 0.70711) < 1e-5 and abs(rhs - 0.29289) < 1e-5
    assert abs(m.chsh() - 2 * math.sqrt(2)) < 1e-7
    assert abs(m.chsh(gamma=-0.2) - 2 * math.sqrt(2)) < 1e-7
    assert abs(m.ln_gamma(2.6) - 0.35741186354897977) < 1e-13
    assert abs(m.theta_prefactor(0.0) - 2.0) < 1e-14

    for bad in (lambda: m.solve_coefficients(0.0), lambda: m.expectation(1.0, -0.6)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("smoke test passed:", c)


if __name__ == "__main__":
    main()
