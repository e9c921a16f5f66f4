"""Symmetric spectra of the cavity output quadratures.

Frequency-domain solution of the linearised dynamics: each internal
quadrature is a rational transfer from the thermal force and the two
input-noise quadratures, with common denominator

    d(w) = chi_c^-1(w) chi_m^-1(w) - G^2 omega_m Delta,

chi_c^-1 = Delta^2 + (kappa/2 - iw)^2,  chi_m^-1 = om Om - w^2 - iw gamma/2.

The output spectrum follows from the input-output relation
J_out = sqrt(kappa) J - J_in.  Squaring it out exactly gives

    S_JJ(w) = 1/2 + kappa Gamma |a_J|^2 / |d|^2
              + (kappa^2/2) (|b_J|^2 + |c_J|^2) / |d|^2
              - kappa Re[q_J(w) d(-w)] / |d|^2,

where q_J is the coefficient of the noise quadrature that J_out subtracts:
q_X = b_X, q_Y = c_Y ("supplement" form, the default -- it makes the
decoupled G = 0 spectrum exactly flat at the shot-noise floor 1/2).
The "maintext" switch uses q_J = b_J for both quadratures for comparison.

The shot-noise baseline used for the normalised columns is S0 = 1/2 at
every frequency (the exact decoupled output value); "thermal noise"
labels elsewhere refer to the same flat floor.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import StateSpaceModel
from .errors import NonFiniteResult

BASELINE = 0.5
SPECTRUM_FORMS = ("supplement", "maintext")


@dataclass(frozen=True)
class TransferCoefficients:
    """Frequency-response pieces at one (or an array of) omega."""

    chi_c_inv: np.ndarray
    chi_m_inv: np.ndarray
    d: np.ndarray
    a_X: np.ndarray
    b_X: np.ndarray
    c_X: np.ndarray
    a_Y: np.ndarray
    b_Y: np.ndarray
    c_Y: np.ndarray


@dataclass(frozen=True)
class SpectrumTable:
    omega: np.ndarray
    omega_over_kappa: np.ndarray
    S_XX: np.ndarray
    S_YY: np.ndarray
    S_XX_norm: np.ndarray
    S_YY_norm: np.ndarray
    unstable: bool

    def __len__(self):
        return self.omega.size


def transfer_coefficients(model: StateSpaceModel, omega) -> TransferCoefficients:
    """Evaluate the nine response quantities; vectorised over omega."""
    omega = np.asarray(omega, dtype=float)
    op = model.op
    kappa, gamma = model.kappa, model.gamma
    delta, om, Om, G = op.delta_eff, op.omega_m, op.Omega_m, op.G
    kw = kappa / 2.0 - 1j * omega
    chi_c_inv = delta ** 2 + kw ** 2
    chi_m_inv = om * Om - omega ** 2 - 1j * omega * gamma / 2.0
    d = chi_c_inv * chi_m_inv - G ** 2 * om * delta
    return TransferCoefficients(
        chi_c_inv=chi_c_inv, chi_m_inv=chi_m_inv, d=d,
        a_X=np.broadcast_to(G * om * delta + 0j, omega.shape).copy(),
        b_X=kw * chi_m_inv,
        c_X=delta * chi_m_inv,
        a_Y=G * om * kw,
        b_Y=-delta * chi_m_inv + om * G ** 2,
        c_Y=kw * chi_m_inv)


def output_spectrum(model: StateSpaceModel, omega, quadrature: str = "Y",
                    form: str = "supplement"):
    """Symmetric output spectrum S_JJ(omega), dimensionless.

    Stable models give values >= 0 with 1/2 as the shot-noise floor;
    evaluation at unstable points is allowed for map-making but carries
    no stationary-state meaning (a warning is emitted once per call).
    """
    if quadrature not in ("X", "Y"):
        raise ValueError(f"quadrature must be 'X' or 'Y', got {quadrature!r}")
    if form not in SPECTRUM_FORMS:
        raise ValueError(f"unknown spectrum form {form!r}")
    if not model.stable:
        warnings.warn("output spectrum evaluated on an unstable model",
                      stacklevel=2)
    tc = transfer_coefficients(model, omega)
    kappa = model.kappa
    Gamma = model.derived.Gamma_diff
    abs_d2 = np.abs(tc.d) ** 2
    if np.any(abs_d2 == 0.0):
        raise NonFiniteResult("transfer denominator underflowed to zero")
    d_minus = np.conj(tc.d)  # d(-w) = d(w)*
    if quadrature == "X":
        a, b, c = tc.a_X, tc.b_X, tc.c_X
        cross = b
    else:
        a, b, c = tc.a_Y, tc.b_Y, tc.c_Y
        cross = b if form == "maintext" else tc.c_Y
    s = (BASELINE
         + kappa * Gamma * np.abs(a) ** 2 / abs_d2
         + kappa ** 2 / 2.0 * (np.abs(b) ** 2 + np.abs(c) ** 2) / abs_d2
         - kappa * np.real(cross * d_minus) / abs_d2)
    return s


def internal_spectrum(model: StateSpaceModel, omega, which: str):
    """Symmetric spectrum of an internal quadrature ('x', 'p', 'X', 'Y').

    Used by the covariance cross-check: (1/2pi) * integral of each matches
    the corresponding diagonal entry of the stationary covariance.
    """
    tc = transfer_coefficients(model, omega)
    omega = np.asarray(omega, dtype=float)
    kappa = model.kappa
    Gamma = model.derived.Gamma_diff
    op = model.op
    abs_d2 = np.abs(tc.d) ** 2
    if which in ("x", "p"):
        kw = kappa / 2.0 - 1j * omega
        s = (Gamma * np.abs(tc.chi_c_inv * op.omega_m) ** 2
             + kappa / 2.0 * op.G ** 2 * op.omega_m ** 2
             * (np.abs(kw) ** 2 + op.delta_eff ** 2)) / abs_d2
        if which == "p":
            s = omega ** 2 / op.omega_m ** 2 * s
        return s
    if which == "X":
        a, b, c = tc.a_X, tc.b_X, tc.c_X
    elif which == "Y":
        a, b, c = tc.a_Y, tc.b_Y, tc.c_Y
    else:
        raise ValueError(f"unknown quadrature {which!r}")
    return (Gamma * np.abs(a) ** 2
            + kappa / 2.0 * (np.abs(b) ** 2 + np.abs(c) ** 2)) / abs_d2


def spectrum_sweep(model: StateSpaceModel, omega_grid,
                   form: str = "supplement") -> SpectrumTable:
    """Evaluate both output spectra over a strictly increasing grid."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    if omega_grid.size and np.any(np.diff(omega_grid) <= 0.0):
        raise ValueError("omega grid must be strictly increasing")
    if omega_grid.size == 0:
        empty = np.empty(0)
        return SpectrumTable(empty, empty, empty.copy(), empty.copy(),
                             empty.copy(), empty.copy(),
                             unstable=not model.stable)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            s_xx = output_spectrum(model, omega_grid, "X", form)
            s_yy = output_spectrum(model, omega_grid, "Y", form)
        except NonFiniteResult as exc:
            raise NonFiniteResult(
                f"{exc} within grid [{omega_grid[0]:.3e}, {omega_grid[-1]:.3e}]")
    return SpectrumTable(
        omega=omega_grid,
        omega_over_kappa=omega_grid / model.kappa,
        S_XX=s_xx, S_YY=s_yy,
        S_XX_norm=s_xx / BASELINE, S_YY_norm=s_yy / BASELINE,
        unstable=not model.stable)
