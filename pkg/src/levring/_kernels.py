"""Hot numerical kernels: numba-compiled with a pure-Python/numpy fallback.

The two fixed-step RK4 integrators (classical mean field, covariance
relaxation) dominate runtime; they are compiled with numba's @njit when
available.  Set the environment variable LEVRING_NO_NUMBA=1 to force the
uncompiled fallback path (same source for the scalar kernels, a
numpy-vectorised routine for the covariance integrator).

``benchmarks/bench_kernels.py`` compares both paths.
"""
import os

import numpy as np

__all__ = [
    "JIT_ENABLED", "mean_field_chunk", "cov_rk4", "cov_rk4_dense",
    "durand_kerner",
]


def _jit_disabled_by_env() -> bool:
    return os.environ.get("LEVRING_NO_NUMBA", "").strip().lower() not in ("", "0", "false")


try:
    if _jit_disabled_by_env():
        raise ImportError("numba disabled by LEVRING_NO_NUMBA")
    from numba import njit

    JIT_ENABLED = True
except ImportError:
    JIT_ENABLED = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


def _mean_field_chunk(state, n_steps, dt, mass, gamma, hbar_g, k, kappa,
                      delta0, g, E, A_q, c0, R):
    """Advance the classical mean field by n_steps of fixed-step RK4.

    state = (x, p, re a, im a).  Returns the updated state plus window
    statistics (x_min, x_max, x_sum, p_sum, re_a_sum, im_a_sum) used by
    the convergence logic in the caller.

    Force budget per the linearised model this integrator backs:
    optical gradient -hbar g k sin(2kx) |a|^2, ring force
    -A_q (C0+x) [1 + ((C0+x)/R)^2]^(-3/2), viscous -gamma/2 p.
    """
    x = state[0]
    p = state[1]
    ar = state[2]
    ai = state[3]
    x_min = x
    x_max = x
    x_sum = 0.0
    p_sum = 0.0
    ar_sum = 0.0
    ai_sum = 0.0
    for _ in range(n_steps):
        # k1
        a2 = ar * ar + ai * ai
        s = c0 + x
        u = s / R
        f = -hbar_g * k * np.sin(2.0 * k * x) * a2 - A_q * s * (1.0 + u * u) ** -1.5
        h = delta0 + g * np.cos(k * x) ** 2
        k1x = p / mass
        k1p = f - 0.5 * gamma * p
        k1r = -h * ai - 0.5 * kappa * ar
        k1i = h * ar - 0.5 * kappa * ai - E
        # k2
        x2 = x + 0.5 * dt * k1x
        p2 = p + 0.5 * dt * k1p
        ar2 = ar + 0.5 * dt * k1r
        ai2 = ai + 0.5 * dt * k1i
        a2 = ar2 * ar2 + ai2 * ai2
        s = c0 + x2
        u = s / R
        f = -hbar_g * k * np.sin(2.0 * k * x2) * a2 - A_q * s * (1.0 + u * u) ** -1.5
        h = delta0 + g * np.cos(k * x2) ** 2
        k2x = p2 / mass
        k2p = f - 0.5 * gamma * p2
        k2r = -h * ai2 - 0.5 * kappa * ar2
        k2i = h * ar2 - 0.5 * kappa * ai2 - E
        # k3
        x3 = x + 0.5 * dt * k2x
        p3 = p + 0.5 * dt * k2p
        ar3 = ar + 0.5 * dt * k2r
        ai3 = ai + 0.5 * dt * k2i
        a2 = ar3 * ar3 + ai3 * ai3
        s = c0 + x3
        u = s / R
        f = -hbar_g * k * np.sin(2.0 * k * x3) * a2 - A_q * s * (1.0 + u * u) ** -1.5
        h = delta0 + g * np.cos(k * x3) ** 2
        k3x = p3 / mass
        k3p = f - 0.5 * gamma * p3
        k3r = -h * ai3 - 0.5 * kappa * ar3
        k3i = h * ar3 - 0.5 * kappa * ai3 - E
        # k4
        x4 = x + dt * k3x
        p4 = p + dt * k3p
        ar4 = ar + dt * k3r
        ai4 = ai + dt * k3i
        a2 = ar4 * ar4 + ai4 * ai4
        s = c0 + x4
        u = s / R
        f = -hbar_g * k * np.sin(2.0 * k * x4) * a2 - A_q * s * (1.0 + u * u) ** -1.5
        h = delta0 + g * np.cos(k * x4) ** 2
        k4x = p4 / mass
        k4p = f - 0.5 * gamma * p4
        k4r = -h * ai4 - 0.5 * kappa * ar4
        k4i = h * ar4 - 0.5 * kappa * ai4 - E

        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        ar += dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        ai += dt / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)

        if x < x_min:
            x_min = x
        if x > x_max:
            x_max = x
        x_sum += x
        p_sum += p
        ar_sum += ar
        ai_sum += ai
    out = np.empty(10)
    out[0] = x
    out[1] = p
    out[2] = ar
    out[3] = ai
    out[4] = x_min
    out[5] = x_max
    out[6] = x_sum
    out[7] = p_sum
    out[8] = ar_sum
    out[9] = ai_sum
    return out


def _cov_rk4_loops(A, D, dt, max_steps, check_every, tol_abs):
    """Relax dV/dt = A V + V A^T + D from V = 0 by fixed-step RK4.

    Stops once the Frobenius norm of dV/dt drops below tol_abs; returns
    (V, steps_used, converged_flag).  Explicit 4x4 loops so numba emits
    straight-line code.
    """
    n = A.shape[0]
    V = np.zeros((n, n))
    K1 = np.empty((n, n))
    K2 = np.empty((n, n))
    K3 = np.empty((n, n))
    K4 = np.empty((n, n))
    W = np.empty((n, n))
    steps = 0
    converged = False
    while steps < max_steps:
        limit = min(check_every, max_steps - steps)
        for _ in range(limit):
            for i in range(n):
                for j in range(n):
                    acc = D[i, j]
                    for l in range(n):
                        acc += A[i, l] * V[l, j] + V[i, l] * A[j, l]
                    K1[i, j] = acc
            for i in range(n):
                for j in range(n):
                    W[i, j] = V[i, j] + 0.5 * dt * K1[i, j]
            for i in range(n):
                for j in range(n):
                    acc = D[i, j]
                    for l in range(n):
                        acc += A[i, l] * W[l, j] + W[i, l] * A[j, l]
                    K2[i, j] = acc
            for i in range(n):
                for j in range(n):
                    W[i, j] = V[i, j] + 0.5 * dt * K2[i, j]
            for i in range(n):
                for j in range(n):
                    acc = D[i, j]
                    for l in range(n):
                        acc += A[i, l] * W[l, j] + W[i, l] * A[j, l]
                    K3[i, j] = acc
            for i in range(n):
                for j in range(n):
                    W[i, j] = V[i, j] + dt * K3[i, j]
            for i in range(n):
                for j in range(n):
                    acc = D[i, j]
                    for l in range(n):
                        acc += A[i, l] * W[l, j] + W[i, l] * A[j, l]
                    K4[i, j] = acc
            for i in range(n):
                for j in range(n):
                    V[i, j] += dt / 6.0 * (K1[i, j] + 2.0 * K2[i, j]
                                           + 2.0 * K3[i, j] + K4[i, j])
            steps += 1
        resid = 0.0
        for i in range(n):
            for j in range(n):
                acc = D[i, j]
                for l in range(n):
                    acc += A[i, l] * V[l, j] + V[i, l] * A[j, l]
                resid += acc * acc
        if np.sqrt(resid) <= tol_abs:
            converged = True
            break
    return V, steps, converged


def cov_rk4_dense(A, D, dt, max_steps, check_every, tol_abs):
    """Numpy-vectorised twin of the covariance RK4 kernel."""
    V = np.zeros_like(A)
    steps = 0
    converged = False

    def rhs(M):
        return A @ M + M @ A.T + D

    while steps < max_steps:
        limit = min(check_every, max_steps - steps)
        for _ in range(limit):
            K1 = rhs(V)
            K2 = rhs(V + 0.5 * dt * K1)
            K3 = rhs(V + 0.5 * dt * K2)
            K4 = rhs(V + dt * K3)
            V = V + dt / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4)
            steps += 1
        if np.linalg.norm(rhs(V)) <= tol_abs:
            converged = True
            break
    return V, steps, converged


def _durand_kerner(coeffs, tol, max_iter):
    """All roots of a monic polynomial by Durand-Kerner iteration.

    coeffs are the non-leading coefficients (c[0] x^(n-1) + ... + c[n-1])
    of a monic degree-n polynomial, complex.  Returns (roots, iterations);
    iterations == max_iter signals non-convergence to the caller.
    """
    n = coeffs.shape[0]
    roots = np.empty(n, dtype=np.complex128)
    seed = 0.4 + 0.9j
    z = 1.0 + 0.0j
    for i in range(n):
        z = z * seed
        roots[i] = z
    it = 0
    while it < max_iter:
        max_step = 0.0
        for i in range(n):
            zi = roots[i]
            num = 1.0 + 0.0j
            for c in coeffs:
                num = num * zi + c
            den = 1.0 + 0.0j
            for j in range(n):
                if j != i:
                    den *= zi - roots[j]
            if den == 0.0:
                den = tol + 0.0j
            step = num / den
            roots[i] = zi - step
            mag = abs(step) / max(1.0, abs(roots[i]))
            if mag > max_step:
                max_step = mag
        it += 1
        if max_step < tol:
            break
    return roots, it


if JIT_ENABLED:
    mean_field_chunk = njit(cache=True)(_mean_field_chunk)
    cov_rk4 = njit(cache=True)(_cov_rk4_loops)
    durand_kerner = njit(cache=True)(_durand_kerner)
else:
    mean_field_chunk = _mean_field_chunk
    cov_rk4 = cov_rk4_dense
    durand_kerner = _durand_kerner
