"""JIT kernels against their uncompiled twins, and the backend switch."""
import os
import subprocess
import sys

import numpy as np

from levring import _kernels

from conftest import KAPPA_SCALE

KAP = KAPPA_SCALE

MF_ARGS = dict(
    dt=1e-8, mass=1.39e-18, gamma=0.1 * KAP, hbar_g=3.33e-30,
    k=5.9e6, kappa=KAP, delta0=0.75 * KAP, g=3.16e4, E=7.1e10,
    A_q=1.09e-7, c0=1.064e-6, R=5e-3)


def test_mean_field_jit_matches_python():
    state = np.array([5e-8, 0.0, 1e4, -2e4])
    jit_out = _kernels.mean_field_chunk(state.copy(), 2000, *MF_ARGS.values())
    py_out = _kernels._mean_field_chunk(state.copy(), 2000, *MF_ARGS.values())
    assert np.allclose(jit_out, py_out, rtol=1e-12, atol=0.0)


def test_cov_rk4_loops_match_dense():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(4, 4)) * KAP
    A -= 3.0 * KAP * np.eye(4)  # firmly Hurwitz
    D = np.diag(rng.uniform(0.1, 2.0, size=4)) * KAP
    dt = 0.02 / KAP
    tol = 1e-12 * np.linalg.norm(D)
    V1, n1, ok1 = _kernels.cov_rk4(A, D, dt, 200000, 64, tol)
    V2, n2, ok2 = _kernels.cov_rk4_dense(A, D, dt, 200000, 64, tol)
    assert ok1 and ok2
    assert n1 == n2
    assert np.allclose(V1, V2, rtol=1e-12)


def test_durand_kerner_against_numpy_roots():
    rng = np.random.default_rng(4)
    for _ in range(50):
        c = rng.normal(size=4) + 1j * rng.normal(size=4)
        roots, iters = _kernels.durand_kerner(c.astype(np.complex128),
                                              1e-14, 500)
        assert iters < 500
        ref = list(np.roots(np.concatenate(([1.0 + 0j], c))))
        for z in roots:
            d = [abs(z - r) for r in ref]
            i = int(np.argmin(d))
            assert d[i] < 1e-8 * max(1.0, abs(ref[i]))
            ref.pop(i)


def test_env_flag_disables_jit():
    env = dict(os.environ, LEVRING_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "from levring._kernels import JIT_ENABLED, mean_field_chunk, "
         "_mean_field_chunk, cov_rk4, cov_rk4_dense; "
         "print(JIT_ENABLED, mean_field_chunk is _mean_field_chunk, "
         "cov_rk4 is cov_rk4_dense)"],
        env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "True", "True"]


def test_jit_enabled_by_default():
    env = {k: v for k, v in os.environ.items() if k != "LEVRING_NO_NUMBA"}
    out = subprocess.run(
        [sys.executable, "-c",
         "from levring._kernels import JIT_ENABLED; print(JIT_ENABLED)"],
        env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "True"
