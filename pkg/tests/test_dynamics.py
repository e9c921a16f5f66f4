"""Drift matrix structure and the two stability routes."""
import numpy as np

from levring.dynamics import (char_poly_coefficients, drift_eigenvalues,
                              eigenvalue_stability, routh_hurwitz)
from levring.pipeline import solve_point

from conftest import (KAPPA_SCALE, random_model, reference_config,
                      synthetic_model, synthetic_op)

KAP = KAPPA_SCALE


def assert_same_spectrum(ours, ref, rtol=1e-8, atol=1e-6 * KAP):
    """Set-wise comparison robust to ordering of near-degenerate roots."""
    ref = list(ref)
    for lam in ours:
        dist = [abs(lam - r) for r in ref]
        i = int(np.argmin(dist))
        assert dist[i] <= atol + rtol * abs(ref[i]), (lam, ref)
        ref.pop(i)


class TestStructure:
    def test_entries_and_sparsity(self):
        m = synthetic_model(omega_m=0.7 * KAP, Omega_m=0.9 * KAP,
                            delta=0.8 * KAP, G=-0.2 * KAP,
                            gamma=0.01 * KAP, Gamma=3.0 * KAP)
        A, op = m.A, m.op
        expected = np.zeros((4, 4))
        expected[0, 1] = op.omega_m
        expected[1, 0] = -op.Omega_m
        expected[1, 1] = -m.gamma / 2
        expected[1, 2] = -op.G
        expected[2, 2] = expected[3, 3] = -m.kappa / 2
        expected[2, 3] = op.delta_eff
        expected[3, 2] = -op.delta_eff
        expected[3, 0] = -op.G
        assert np.array_equal(A, expected)
        # exactly seven structurally nonzero entries
        mask = np.zeros((4, 4), dtype=bool)
        for ij in [(0, 1), (1, 0), (1, 1), (1, 2), (2, 2), (3, 3), (2, 3),
                   (3, 2), (3, 0)]:
            mask[ij] = True
        assert np.all(A[~mask] == 0.0)

    def test_diffusion_matrix(self):
        m = synthetic_model(0.7 * KAP, 0.9 * KAP, 0.8 * KAP, -0.2 * KAP,
                            0.01 * KAP, 3.0 * KAP)
        assert np.array_equal(m.D, np.diag([0.0, 3.0 * KAP, KAP / 2, KAP / 2]))
        assert m.D[0, 0] == 0.0
        assert np.all(np.diag(m.D) >= 0.0)

    def test_decoupled_block_diagonal(self):
        m = synthetic_model(0.7 * KAP, 0.9 * KAP, 0.8 * KAP, 0.0,
                            0.01 * KAP, 3.0 * KAP)
        assert np.all(m.A[:2, 2:] == 0.0)
        assert np.all(m.A[2:, :2] == 0.0)

    def test_optical_block_eigenvalues(self):
        # analytic 2x2: -kappa/2 +- i Delta
        delta = 0.8 * KAP
        m = synthetic_model(0.7 * KAP, 0.9 * KAP, delta, 0.0,
                            0.01 * KAP, 3.0 * KAP)
        eigs = m.verdict.eigenvalues
        optical = eigs[np.isclose(eigs.real, -KAP / 2, rtol=1e-9)]
        assert optical.size == 2
        assert np.allclose(sorted(optical.imag), [-delta, delta], rtol=1e-9)

    def test_char_poly_matches_determinant(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            m = random_model(rng)
            a3, a2, a1, a0 = char_poly_coefficients(m.op, m.gamma, m.kappa)
            lam = rng.uniform(-2, 2) * KAP + 1j * rng.uniform(-2, 2) * KAP
            direct = np.linalg.det(lam * np.eye(4) - m.A)
            poly = (((lam + a3) * lam + a2) * lam + a1) * lam + a0
            assert abs(direct - poly) < 1e-8 * abs(direct)


class TestEigenvalues:
    def test_against_numpy_eigvals(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            m = random_model(rng)
            assert_same_spectrum(m.verdict.eigenvalues,
                                 np.linalg.eigvals(m.A))

    def test_characteristic_residual(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            m = random_model(rng)
            a3, a2, a1, a0 = char_poly_coefficients(m.op, m.gamma, m.kappa)
            rho = max(abs(a3), abs(a2) ** 0.5, abs(a1) ** (1 / 3),
                      abs(a0) ** 0.25)
            c = np.array([1.0, a3 / rho, a2 / rho ** 2, a1 / rho ** 3,
                          a0 / rho ** 4])
            z = m.verdict.eigenvalues / rho
            res = np.abs(np.polyval(c, z))
            assert np.all(res < 1e-10 * max(1.0, np.linalg.norm(c)))

    def test_decoupled_union_of_blocks(self):
        m = synthetic_model(0.7 * KAP, 1.1 * KAP, 0.9 * KAP, 0.0,
                            0.02 * KAP, 3.0 * KAP)
        mech = np.roots([1.0, m.gamma / 2,
                         m.op.omega_m * m.op.Omega_m])
        opt = np.array([-m.kappa / 2 + 1j * m.op.delta_eff,
                        -m.kappa / 2 - 1j * m.op.delta_eff])
        expected = np.concatenate([mech, opt])
        assert_same_spectrum(m.verdict.eigenvalues, expected, rtol=1e-9)


class TestStabilityVerdicts:
    def test_cross_oracle_agreement(self):
        rng = np.random.default_rng(7)
        n_stable = n_unstable = 0
        for _ in range(300):
            m = random_model(rng)
            if m.verdict.rh_marginal:
                continue
            s1, s2, rh = routh_hurwitz(m)
            _, eig = eigenvalue_stability(m)
            assert rh == eig, (s1, s2, m.verdict.eigenvalues)
            n_stable += eig
            n_unstable += not eig
        # the draw box must actually straddle the boundary
        assert n_stable > 30 and n_unstable > 30

    def test_decoupled_positive_damping_is_stable(self):
        m = synthetic_model(0.7 * KAP, 0.9 * KAP, 0.8 * KAP, 0.0,
                            0.01 * KAP, 3.0 * KAP)
        s1, s2, rh = routh_hurwitz(m)
        assert s1 > 0 and s2 > 0 and rh and m.stable

    def test_anti_stokes_unstable(self):
        # negative effective detuning at reference-scale coupling
        m = synthetic_model(0.74 * KAP, 0.86 * KAP, -0.82 * KAP, -0.2 * KAP,
                            3e-11 * KAP, 1e-3 * KAP)
        assert not m.stable
        assert not m.verdict.rh_stable

    def test_fig1_point_is_stable(self):
        sol = solve_point(reference_config())
        assert sol.model.stable
        assert sol.model.verdict.rh_stable

    def test_boundary_alignment(self):
        # the G at which S1/S2 first fails matches the eigenvalue flip
        args = dict(omega_m=0.7 * KAP, Omega_m=0.9 * KAP, delta=0.8 * KAP,
                    gamma=0.01 * KAP, Gamma=3.0 * KAP)

        def rh_ok(G):
            m = synthetic_model(G=G, **args)
            return m.verdict.s1 > 0 and m.verdict.s2 > 0

        def eig_ok(G):
            return synthetic_model(G=G, **args).verdict.max_real_part < 0

        def flip(pred):
            lo, hi = 0.0, 3.0 * KAP
            assert pred(lo) and not pred(hi)
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if pred(mid):
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)

        g_rh = flip(rh_ok)
        g_eig = flip(eig_ok)
        assert abs(g_rh - g_eig) < 1e-6 * g_rh

    def test_marginal_dead_zone(self):
        # tune G so S1 sits at its cancellation point
        om, Om, delta = 0.7 * KAP, 0.9 * KAP, 0.8 * KAP
        G = np.sqrt(om * Om * (4 * delta ** 2 + KAP ** 2)
                    / (4 * delta * om))
        m = synthetic_model(om, Om, delta, G, 0.01 * KAP, 3.0 * KAP)
        assert m.verdict.rh_marginal
        assert not m.verdict.rh_stable

    def test_eigenvalues_scale_invariance(self):
        # same model expressed in different frequency units agrees
        base = synthetic_model(0.7 * KAP, 0.9 * KAP, 0.8 * KAP, -0.3 * KAP,
                               0.05 * KAP, 1.0 * KAP)
        scaled_op = synthetic_op(0.7, 0.9, 0.8, -0.3)
        eigs = drift_eigenvalues(scaled_op, 0.05, 1.0)
        assert_same_spectrum(base.verdict.eigenvalues, eigs * KAP, rtol=1e-9)
