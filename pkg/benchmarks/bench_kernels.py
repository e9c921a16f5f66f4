"""Timing comparison of the JIT kernels against the uncompiled fallbacks.

Run:  python benchmarks/bench_kernels.py

Exercises the two RK4 integrators on the shipped squeezing-spectrum
configuration.  The first JIT call includes compilation; a warmup call
is timed separately so the steady-state cost is visible.
"""
import pathlib
import sys
import time

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from levring import _kernels
from levring.cli import parse_config
from levring.model import delta0_from_config, derive_constants
from levring.pipeline import solve_point

CONFIG = pathlib.Path(__file__).resolve().parents[1] / "configs" / "fig1.cfg"


def bench(label, fn, repeat=3):
    best = min(timed(fn) for _ in range(repeat))
    print(f"  {label:<28s} {best * 1e3:10.2f} ms")
    return best


def timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def main():
    cfg = parse_config(str(CONFIG))
    derived = derive_constants(cfg)
    delta0 = delta0_from_config(cfg, derived)
    sol = solve_point(cfg)
    A, D = sol.model.A, sol.model.D
    eigs = sol.model.verdict.eigenvalues
    dt_cov = 0.2 / float(np.max(np.abs(eigs)))
    tol = 1e-12 * float(np.linalg.norm(D))

    state = np.array([0.0, 0.0, 0.0, 0.0])
    mf_args = (200_000, 1e-8, derived.mass, 0.15 * derived.kappa,
               1.054571817e-34 * derived.g, derived.k, derived.kappa,
               delta0, derived.g, derived.E_drive, derived.A_q,
               cfg.ring_offset_c0, derived.ring_radius)

    print(f"numba available and enabled: {_kernels.JIT_ENABLED}")
    if _kernels.JIT_ENABLED:
        t = timed(lambda: _kernels.mean_field_chunk(state, 100, *mf_args[1:]))
        print(f"  mean-field warmup/compile   {t * 1e3:10.2f} ms")
        t = timed(lambda: _kernels.cov_rk4(A, D, dt_cov, 100, 64, tol))
        print(f"  covariance warmup/compile   {t * 1e3:10.2f} ms")
        bench("mean-field RK4 (jit)",
              lambda: _kernels.mean_field_chunk(state, *mf_args))
        bench("covariance RK4 (jit)",
              lambda: _kernels.cov_rk4(A, D, dt_cov, 100_000, 64, tol))
    bench("mean-field RK4 (python)",
          lambda: _kernels._mean_field_chunk(state, 20_000, *mf_args[1:]),
          repeat=1)
    bench("covariance RK4 (numpy)",
          lambda: _kernels.cov_rk4_dense(A, D, dt_cov, 100_000, 64, tol),
          repeat=1)
    print("note: python mean-field row integrates 10x fewer steps")


if __name__ == "__main__":
    main()
