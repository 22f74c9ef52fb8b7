import os
import subprocess
import sys

import numpy as np
import pytest

from bhclock import _rk4_py, kernels

try:
    from bhclock import _rk4 as _rk4_c
except ImportError:  # extension not built
    _rk4_c = None

needs_ext = pytest.mark.skipif(_rk4_c is None, reason="compiled extension not built")


def run(fn, n=500, near=0, q0=1e-3, p0=0.0, floor=1e-15):
    arrs = [np.empty(n + 1) for _ in range(4)]
    filled, status = fn(q0, p0, 1.0, 2.0, 1.0, 0.25, near, 0.01, n, floor, *arrs)
    return filled, status, [a[:filled] for a in arrs]


@needs_ext
@pytest.mark.parametrize("near", [0, 1])
@pytest.mark.parametrize("p0", [0.0, -1e-3, 2e-2])
def test_backends_agree(near, p0):
    fc, sc, ac = run(_rk4_c.rk4_radial, near=near, p0=p0)
    fp, sp, ap = run(_rk4_py.rk4_radial, near=near, p0=p0)
    assert (fc, sc) == (fp, sp)
    for x, y in zip(ac, ap):
        np.testing.assert_allclose(x, y, rtol=1e-14, atol=1e-300)


@needs_ext
def test_backends_agree_on_floor_stop():
    c = run(_rk4_c.rk4_radial, n=10_000, floor=1e-4)
    p = run(_rk4_py.rk4_radial, n=10_000, floor=1e-4)
    assert c[:2] == p[:2]
    assert c[1] == 1


def test_python_backend_completes():
    filled, status, (tau, q, p, h) = run(_rk4_py.rk4_radial, n=10, q0=1e-2)
    assert (filled, status) == (11, 0)
    assert tau[-1] == pytest.approx(0.1)
    assert np.all(np.diff(q) < 0)


def test_non_finite_status():
    filled, status, _ = run(_rk4_py.rk4_radial, n=10, p0=float("inf"))
    assert status == 2 and filled == 2


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")
    if _rk4_c is not None and os.environ.get("BHCLOCK_PURE_PYTHON", "") in ("", "0"):
        assert kernels.BACKEND == "cython"


def test_env_forces_python():
    env = dict(os.environ, BHCLOCK_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from bhclock.kernels import BACKEND; print(BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
