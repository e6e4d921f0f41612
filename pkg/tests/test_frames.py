"""Moving-frame coefficient matrices, transport, and compatibility residuals."""

import numpy as np
import pytest

import solsurf as ss
from solsurf import Grid1D, Grid2D
from solsurf.fixtures import (
    expm_skew3,
    sphere_ct,
    sphere_frame_series,
    traveling_circle,
)

from conftest import polar_band


class TestCoefficientMatrices:
    def test_matrix_a_layout(self):
        A = ss.matrix_a(2.0, 3.0)
        expected = np.array([[0.0, 2.0, 0.0],
                             [-2.0, 0.0, 3.0],
                             [0.0, -3.0, 0.0]])
        assert np.array_equal(A, expected)

    def test_matrix_b_layout(self):
        B = ss.matrix_b(1.0, 2.0, 3.0)
        assert B[0, 1] == 3.0 and B[1, 0] == -3.0
        assert B[0, 2] == -2.0 and B[2, 0] == 2.0
        assert B[1, 2] == 1.0 and B[2, 1] == -1.0

    @pytest.mark.parametrize("maker,args", [
        (ss.matrix_a, (0.7, -1.3)),
        (ss.matrix_b, (0.2, -0.5, 1.1)),
    ])
    def test_antisymmetry(self, maker, args):
        M = maker(*args)
        assert np.array_equal(M, -M.T)


class TestTransport:
    def test_constant_coefficients_match_exponential(self):
        # E' = A E with frozen A integrates to expm(A x) E0
        k, tau = 1.0, 0.5
        g = Grid1D(0.0, 1e-3, 1001, "one_sided")
        fr = ss.transport_frame_x(np.eye(3), k, tau, g, reorthonormalize=False)
        A = ss.matrix_a(k, tau)
        exact = expm_skew3(A * 1.0)
        final = np.stack([fr.e1[-1], fr.e2[-1], fr.e3[-1]])
        assert np.max(np.abs(final - exact)) < 1e-8

    def test_gram_drift_small_without_renorm(self):
        g = Grid1D(0.0, 1e-2, 1001, "one_sided")
        fr = ss.transport_frame_x(np.eye(3), 1.0, 0.5, g, reorthonormalize=False)
        assert fr.gram_drift.max() < 1e-6

    def test_per_step_drift_order(self):
        # one step of E' = A E: drift should fall much faster than h^3.7
        hs, drifts = [], []
        for h in (1e-1, 5e-2, 2.5e-2):
            g = Grid1D(0.0, h, 3, "one_sided")
            fr = ss.transport_frame_x(np.eye(3), 1.0, 0.5, g, reorthonormalize=False)
            hs.append(h)
            drifts.append(fr.gram_drift[1])
        assert ss.fit_order(hs, drifts) >= 3.7

    def test_renormalization_keeps_frames_orthonormal(self):
        g = Grid1D(0.0, 0.1, 201, "one_sided")
        fr = ss.transport_frame_x(np.eye(3), 2.0, 1.0, g, reorthonormalize=True)
        triad = np.stack([fr.e1[-1], fr.e2[-1], fr.e3[-1]])
        assert ss.gram_deviation(triad) < 1e-12

    def test_unstable_step_raises(self):
        g = Grid1D(0.0, 0.8, 30, "one_sided")
        with pytest.raises(ss.GramDriftError, match="orthonormality"):
            ss.transport_frame_x(np.eye(3), 8.0, 4.0, g, reorthonormalize=False,
                                 gram_tol=1e-6)

    def test_varying_coefficients_accepted(self):
        g = Grid1D(0.0, 0.01, 101, "one_sided")
        x = g.points()
        fr = ss.transport_frame_x(np.eye(3), 1.0 + 0.3 * np.sin(x), 0.2 * np.cos(x), g)
        assert fr.e1.shape == (101, 3)
        assert fr.gram_drift.max() < 1e-10


class TestGramDeviation:
    def test_identity_is_zero(self):
        assert ss.gram_deviation(np.eye(3)) == 0.0

    def test_scaled_triad(self):
        assert ss.gram_deviation(2.0 * np.eye(3)) == pytest.approx(3.0)


class TestCompatibilityResidual:
    def test_sphere_fields_converge(self):
        hs, errs = [], []
        for scale in (1, 2, 4):
            g2 = polar_band(17, scale)
            r = ss.compatibility_residual(sphere_ct(g2))
            errs.append(max(np.max(np.abs(a)) for a in r))
            hs.append(g2.gx.dx)
        assert ss.fit_order(hs, errs, floor=1e-11) >= 1.7

    def test_traveling_circle_is_superconvergent(self, grid_small):
        # all fields are constant in t and x-differences stay in-plane; only
        # integrator round-off (divided by dt in k_t) survives
        series = ss.evolve_series(traveling_circle(grid_small), 0.01, 4)
        r = ss.compatibility_residual(ss.ct_from_spin_series(series))
        assert max(np.max(np.abs(a)) for a in r) < 1e-12


class TestTorsionTransport:
    def test_traveling_circle_exact_zero(self, grid_small):
        series = ss.evolve_series(traveling_circle(grid_small), 0.01, 4)
        r = ss.torsion_transport_residual(series.S, series.v, series.grid2)
        assert np.max(np.abs(r)) == 0.0

    def test_sphere_frames_second_order(self):
        hs, errs = [], []
        for scale in (1, 2, 4):
            g2 = polar_band(17, scale)
            E, ct = sphere_frame_series(g2)
            r = ss.torsion_transport_residual(E[:, :, 0, :], ct.tau, g2)
            errs.append(np.max(np.abs(r)))
            hs.append(g2.gx.dx)
        assert ss.fit_order(hs, errs, floor=1e-11) >= 1.7

    def test_omega1_term_subtracted(self, band_small):
        E, ct = sphere_frame_series(band_small)
        base = ss.torsion_transport_residual(E[:, :, 0, :], ct.tau, band_small)
        X, _ = band_small.meshes()
        shifted = ss.torsion_transport_residual(E[:, :, 0, :], ct.tau, band_small,
                                                omega1=2.0 * X)
        assert np.max(np.abs((base - shifted) - 2.0)) < 1e-10


class TestSphereFrameSeries:
    def test_frames_are_orthonormal(self, band_small):
        E, _ = sphere_frame_series(band_small)
        gram = np.einsum("xtij,xtkj->xtik", E, E)
        assert np.max(np.abs(gram - np.eye(3))) < 1e-13

    def test_fields_match_construction(self, band_small):
        _, ct = sphere_frame_series(band_small)
        _, T = band_small.meshes()
        assert np.max(np.abs(ct.k - np.cos(T))) < 1e-14
        assert np.max(np.abs(ct.tau - np.sin(T))) < 1e-14
        assert np.max(np.abs(ct.omega2 + 1.0)) < 1e-14
        assert np.max(np.abs(ct.omega3)) < 1e-14
