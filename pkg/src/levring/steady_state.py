"""Constrained steady state of the driven sphere-cavity system.

The equilibrium displacement x_s zeroes the force balance

    f(x) = A_q (C0 + x) + hbar g k E^2 sin(2kx) / (kappa^2/4 + Delta(x)^2),

with Delta(x) = Delta0 + g cos^2(kx), restricted to the trap interval
(-pi/4k, pi/4k) where the optical curvature cos(2kx) stays positive.
Roots are located by a uniform 4001-point scan with bisection refinement
(robust against the multi-root structure of the transcendental balance),
then screened for stability of the linearised dynamics.

Two further solvers live here: the resonance-matching solver that picks
the ring charge Q making the effective detuning equal the mechanical
frequency, and the classical mean-field integrator used as an
independent dynamical check on the root finder.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import dynamics
from ._kernels import mean_field_chunk
from .constants import CODATA2018
from .errors import (AllRootsUnstable, NoResonantSolution, NoRootInInterval,
                     NotConverged, NumericalError, UnstableResonance,
                     UnstableTrap)
from .model import DerivedParams

N_SCAN = 4001
BISECT_REL_TOL = 1e-15          # of the full interval width
RESIDUAL_REL_TOL = 1e-12


@dataclass(frozen=True)
class OperatingPoint:
    """Steady-state solution and the linearised parameters it fixes."""

    x_s: float          # equilibrium displacement, m
    a_s: float          # steady intracavity amplitude, dimensionless, > 0
    omega_m: float      # optical-trap mechanical frequency, rad/s
    Omega_m: float      # effective mechanical frequency incl. ring spring
    delta_eff: float    # effective detuning Delta(x_s), rad/s
    G: float            # effective optomechanical coupling, rad/s
    A_q: float          # ring spring constant, N/m
    residual: float     # force balance evaluated at x_s, N


@dataclass(frozen=True)
class ResonantRing:
    """Ring charge solving the sideband-resonance condition at fixed Delta0."""

    x_s: float
    ring_charge: float      # C
    field_at_xs: float      # V/m
    op: OperatingPoint


@dataclass(frozen=True)
class MeanFieldResult:
    x_bar: float
    p_bar: float
    a_bar: complex
    t_final: float
    window_times: np.ndarray
    window_means: np.ndarray
    window_amps: np.ndarray


def force_balance(x, derived: DerivedParams, delta0: float, c0: float):
    """f(x) in newtons; vectorised over x."""
    delta = delta0 + derived.g * np.cos(derived.k * x) ** 2
    opt = (CODATA2018.hbar * derived.g * derived.k * derived.E_drive ** 2
           * np.sin(2.0 * derived.k * x)
           / (derived.kappa ** 2 / 4.0 + delta * delta))
    return derived.A_q * (c0 + x) + opt


def residual_scale(derived: DerivedParams, c0: float) -> float:
    """Magnitude against which the root residual is judged."""
    opt = (CODATA2018.hbar * derived.g * derived.k * derived.E_drive ** 2
           * 4.0 / derived.kappa ** 2)
    return max(abs(derived.A_q * c0), opt)


def steady_amplitude(derived: DerivedParams, delta_eff: float) -> float:
    """Real positive intracavity amplitude 2E / sqrt(4 Delta^2 + kappa^2)."""
    return 2.0 * derived.E_drive / np.sqrt(4.0 * delta_eff ** 2
                                           + derived.kappa ** 2)


def mechanical_frequency(derived: DerivedParams, a_s: float, x_s: float) -> float:
    """Optical-trap frequency sqrt(2 hbar g k^2 a_s^2 cos(2 k x_s) / m)."""
    c2 = np.cos(2.0 * derived.k * x_s)
    if c2 < 0.0:
        raise UnstableTrap(
            f"cos(2 k x_s) = {c2:.3e} < 0 at x_s = {x_s:.3e} m")
    return np.sqrt(2.0 * CODATA2018.hbar * derived.g * derived.k ** 2
                   * a_s ** 2 * c2 / derived.mass)


def cavity_steady_field(derived: DerivedParams, delta0: float, x: float) -> complex:
    """Steady intracavity field for the sphere clamped at x (complex)."""
    h = delta0 + derived.g * np.cos(derived.k * x) ** 2
    return -1j * derived.E_drive / (derived.kappa / 2.0 - 1j * h)


def operating_point_at(derived: DerivedParams, delta0: float, c0: float,
                       x_s: float) -> OperatingPoint:
    """Close the steady-state definitions over a given displacement."""
    delta_eff = delta0 + derived.g * np.cos(derived.k * x_s) ** 2
    a_s = steady_amplitude(derived, delta_eff)
    omega_m = mechanical_frequency(derived, a_s, x_s)
    if omega_m <= 0.0:
        raise UnstableTrap(
            f"vanishing trap frequency at x_s = {x_s:.3e} m (a_s = {a_s:.3e})")
    Omega_m = omega_m + derived.A_q / (derived.mass * omega_m)
    G = (np.sqrt(2.0 * CODATA2018.hbar / (derived.mass * omega_m))
         * derived.k * derived.g * a_s * np.sin(2.0 * derived.k * x_s))
    return OperatingPoint(
        x_s=float(x_s), a_s=float(a_s), omega_m=float(omega_m),
        Omega_m=float(Omega_m), delta_eff=float(delta_eff), G=float(G),
        A_q=derived.A_q,
        residual=float(force_balance(x_s, derived, delta0, c0)))


def _with_damping_or_zero(derived: DerivedParams, omega_m: float) -> DerivedParams:
    if derived.damping_at is not None:
        return derived.with_damping(omega_m)
    return dataclasses.replace(derived, gamma_ph=0.0, gamma_gas=0.0,
                               gamma=0.0, Gamma_diff=0.0)


def _bisect(fun, a, b, fa, tol_x):
    while b - a > tol_x:
        mid = 0.5 * (a + b)
        fm = fun(mid)
        if fm == 0.0:
            return mid
        if fa * fm < 0.0:
            b = mid
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def scan_roots(derived: DerivedParams, delta0: float, c0: float,
               n_scan: int = N_SCAN):
    """All force-balance roots in the open trap interval, ascending.

    Uniform scan, bracket every sign change, bisect each bracket down to
    1e-15 of the interval width.
    """
    half = np.pi / (4.0 * derived.k) * (1.0 - 1e-9)
    xs = np.linspace(-half, half, n_scan)
    fs = force_balance(xs, derived, delta0, c0)
    tol_x = BISECT_REL_TOL * (2.0 * half)

    def fun(x):
        return float(force_balance(x, derived, delta0, c0))

    roots = []
    for i in range(n_scan - 1):
        if fs[i] == 0.0:
            roots.append(float(xs[i]))
        elif fs[i] * fs[i + 1] < 0.0:
            roots.append(_bisect(fun, float(xs[i]), float(xs[i + 1]),
                                 float(fs[i]), tol_x))
    if fs[-1] == 0.0:
        roots.append(float(xs[-1]))
    return roots


def solve_xs(derived: DerivedParams, delta0: float, c0: float,
             root_index: Optional[int] = None,
             n_scan: int = N_SCAN) -> OperatingPoint:
    """Solve the force balance and return the selected operating point.

    Among stable roots (Hurwitz drift matrix, damping from the attached
    closure) the one with smallest |x_s| wins; `root_index` overrides the
    rule by picking the index in the |x_s|-sorted list of all roots,
    skipping the stability screen.

    The degenerate decoupled inputs A_q = 0 (no bound charge or no ring
    charge) and C0 = 0 yield x_s = 0 exactly.
    """
    if derived.A_q == 0.0 or c0 == 0.0:
        return operating_point_at(derived, delta0, c0, 0.0)

    roots = scan_roots(derived, delta0, c0, n_scan)
    if not roots:
        raise NoRootInInterval(
            f"no force-balance root in (-pi/4k, pi/4k) at delta0 = {delta0:.6e}")
    roots.sort(key=abs)
    tol = RESIDUAL_REL_TOL * residual_scale(derived, c0)

    def checked(x_root):
        op = operating_point_at(derived, delta0, c0, x_root)
        if abs(op.residual) > tol:
            raise NumericalError(
                f"root refinement residual {op.residual:.3e} exceeds {tol:.3e}")
        return op

    if root_index is not None:
        return checked(roots[root_index])

    unstable_seen = 0
    for x_root in roots:
        try:
            op = checked(x_root)
        except UnstableTrap:
            continue
        completed = _with_damping_or_zero(derived, op.omega_m)
        if dynamics.build_model(op, completed).stable:
            return op
        unstable_seen += 1
    if unstable_seen:
        raise AllRootsUnstable(
            f"{unstable_seen} root(s) found, none Hurwitz at delta0 = {delta0:.6e}")
    raise NoRootInInterval(
        f"no admissible root at delta0 = {delta0:.6e}")


def solve_resonant_ring_charge(derived: DerivedParams, delta0: float,
                               c0: float, q: Optional[float] = None,
                               n_scan: int = 2001) -> ResonantRing:
    """Ring charge putting the effective detuning on the mechanical sideband.

    Strategy: at fixed Delta0 solve the resonance condition (in cleared
    form, 8 hbar g k^2 E^2 cos(2kx) / (kappa^2 + 4 Delta(x)^2) =
    m Delta(x)^2, equivalent to omega_m = Delta(x_s)) for x_s on the
    half-interval whose sign makes the ring charge positive, then read Q
    off the force balance.
    """
    if q is None:
        q = derived.q_mcp
    if c0 == 0.0 or q == 0.0:
        raise NoResonantSolution(
            "resonance matching needs C0 != 0 and a nonzero bound charge")
    hbar = CODATA2018.hbar
    k, g, E, kap, m = (derived.k, derived.g, derived.E_drive,
                       derived.kappa, derived.mass)

    def mismatch(x):
        delta = delta0 + g * np.cos(k * x) ** 2
        lhs = (8.0 * hbar * g * k ** 2 * E ** 2 * np.cos(2.0 * k * x)
               / (kap ** 2 + 4.0 * delta * delta))
        return lhs - m * delta * delta

    half = np.pi / (4.0 * k) * (1.0 - 1e-9)
    sign = -1.0 if c0 > 0.0 else 1.0
    xs = np.linspace(0.0, sign * half, n_scan)
    fs = np.array([mismatch(x) for x in xs])
    tol_x = BISECT_REL_TOL * (2.0 * half)
    x_root = None
    for i in range(n_scan - 1):
        if fs[i] * fs[i + 1] < 0.0:
            lo, hi = sorted((float(xs[i]), float(xs[i + 1])))
            x_root = _bisect(lambda x: float(mismatch(x)), lo, hi,
                             float(mismatch(lo)), tol_x)
            break
        if fs[i] == 0.0 and i > 0:
            x_root = float(xs[i])
            break
    if x_root is None:
        raise NoResonantSolution(
            f"resonance condition has no root at delta0 = {delta0:.6e}")

    delta = delta0 + g * np.cos(k * x_root) ** 2
    if delta <= 0.0:
        raise NoResonantSolution(
            f"effective detuning {delta:.3e} not on the stable sideband")
    a_q = (-4.0 * hbar * g * k * E ** 2 * np.sin(2.0 * k * x_root)
           / ((kap ** 2 + 4.0 * delta * delta) * (x_root + c0)))
    if a_q < 0.0:
        raise NoResonantSolution(
            "force balance at the resonant point needs a negative ring charge")
    geom = 4.0 * np.pi * CODATA2018.eps0 * derived.ring_radius ** 3
    ring_charge = a_q * geom / q
    resolved = dataclasses.replace(derived, A_q=a_q, ring_charge=ring_charge)
    op = operating_point_at(resolved, delta0, c0, x_root)
    completed = _with_damping_or_zero(resolved, op.omega_m)
    if not dynamics.build_model(op, completed).stable:
        raise UnstableResonance(
            f"resonant point at delta0 = {delta0:.6e} is not Hurwitz")
    u = (c0 + x_root) / derived.ring_radius
    field = ring_charge * (c0 + x_root) / (geom * (1.0 + u * u) ** 1.5)
    return ResonantRing(x_s=x_root, ring_charge=ring_charge,
                        field_at_xs=field, op=op)


def integrate_mean_field(derived: DerivedParams, delta0: float, c0: float,
                         initial_state=None, t_max: Optional[float] = None,
                         dt: Optional[float] = None,
                         gamma: Optional[float] = None,
                         amp_tol: Optional[float] = None,
                         mean_tol: Optional[float] = None) -> MeanFieldResult:
    """Relax the classical (noise-free) mean field and report its rest point.

    Fixed-step RK4 on (x, p, a) with the optical-gradient force, the ring
    force and viscous damping; serves as the dynamical cross-check on
    `solve_xs`.  Averages over oscillation windows; converged when the
    window amplitude and the drift of the window mean both fall below
    their tolerances (defaults 1e-4 and 1e-5 wavelengths).

    The rest point does not depend on gamma, so strongly underdamped
    configurations are best verified with an artificially raised gamma
    (pass `gamma=`); at the physical damping of a levitated sphere the
    envelope contraction time is astronomically long.  The integrator
    relaxes into whatever basin the initial state selects: start inside
    the trap interval (e.g. a coarse root estimate with the matching
    clamped-cavity field) when a strong ring force makes the well at
    x = -C0 competitive.

    Raises NotConverged if the envelope has not contracted by t_max.
    """
    wavelength = 2.0 * np.pi / derived.k
    if initial_state is None:
        initial_state = (0.0, 0.0, 0.0 + 0.0j)
    x0, p0, a0 = initial_state
    a0 = complex(a0)

    a_s0 = steady_amplitude(derived, delta0 + derived.g)
    try:
        omega_est = mechanical_frequency(derived, a_s0, 0.0)
    except UnstableTrap:
        omega_est = 0.0
    omega_ref = omega_est if omega_est > 0.0 else derived.kappa
    if dt is None:
        dt = min(0.01 / derived.kappa, 0.01 / omega_ref)
    if t_max is None:
        t_max = 4000.0 / derived.kappa
    if gamma is None:
        if derived.gamma is not None:
            gamma = derived.gamma
        elif derived.damping_at is not None:
            gamma = derived.damping_at(omega_ref)[2]
        else:
            gamma = 0.0
    if amp_tol is None:
        amp_tol = 1e-4 * wavelength
    if mean_tol is None:
        mean_tol = 1e-5 * wavelength

    window_steps = max(64, int(math.ceil(3.0 * 2.0 * np.pi / omega_ref / dt)))
    n_windows = max(2, int(math.ceil(t_max / (window_steps * dt))))

    state = np.array([x0, p0, a0.real, a0.imag])
    hbar_g = CODATA2018.hbar * derived.g
    times, means, amps = [], [], []
    p_mean = 0.0
    a_mean = 0.0 + 0.0j
    prev_mean = None
    converged = False
    t = 0.0
    for _ in range(n_windows):
        out = mean_field_chunk(state, window_steps, dt, derived.mass, gamma,
                               hbar_g, derived.k, derived.kappa, delta0,
                               derived.g, derived.E_drive, derived.A_q, c0,
                               derived.ring_radius)
        state = out[:4].copy()
        t += window_steps * dt
        amp = float(out[5] - out[4])
        mean_x = float(out[6] / window_steps)
        p_mean = float(out[7] / window_steps)
        a_mean = complex(out[8] / window_steps, out[9] / window_steps)
        times.append(t)
        means.append(mean_x)
        amps.append(amp)
        if (amp < amp_tol and prev_mean is not None
                and abs(mean_x - prev_mean) < mean_tol):
            converged = True
            break
        prev_mean = mean_x
    if not converged:
        raise NotConverged(
            f"mean-field envelope still {amps[-1]:.3e} m wide at t = {t:.3e} s "
            f"(tolerance {amp_tol:.3e} m)")
    return MeanFieldResult(
        x_bar=means[-1], p_bar=p_mean, a_bar=a_mean, t_final=t,
        window_times=np.array(times), window_means=np.array(means),
        window_amps=np.array(amps))
