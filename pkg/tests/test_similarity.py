import numpy as np
import pytest

from cdlab.blockops import BlockOperator, DiagonalBlock, ShiftBlock, frame_solver
from cdlab.errors import ConfigurationError, DomainError
from cdlab.matrix_core import hermitian_det
from cdlab.rkhs import boundary_radii, curvature_series, power_curvature_closed_form, szego_power_coeffs
from cdlab.shifts import hardy, szego
from cdlab.similarity import (
    SimilarityDiagnostic,
    boundedness_verdict,
    commutator_closed_det,
    commutator_example,
    commutator_ratio_fn,
    commutator_trace_curvature,
    curvature_quotient_necessary,
    det_ratio_fn,
    det_ratio_profile,
    diagnostic_verdicts,
    direct_sum_det,
    subharmonic_witness_check,
    write_similarity_csv,
)


K1 = szego_power_coeffs(1)
K2 = szego_power_coeffs(2)


class TestDetRatioProfile:
    def test_model_against_itself(self):
        D = det_ratio_profile(K1, K1, 1, boundary_radii())
        assert np.allclose(D.ratio, 1.0, atol=1e-12)

    def test_direct_sum_against_multiplicity_two(self):
        D = det_ratio_profile([K1, K1], K1, 2, boundary_radii())
        assert np.allclose(D.ratio, 1.0, atol=1e-12)

    def test_unweighted_against_power_two(self):
        r = boundary_radii()
        D = det_ratio_profile(K1, K2, 1, r)
        assert D.ratio == pytest.approx(1 - r ** 2, rel=1e-10)

    def test_frame_source_cap(self):
        B = BlockOperator(((ShiftBlock(hardy()), None), (None, ShiftBlock(hardy()))), order=64)
        with pytest.raises(DomainError):
            det_ratio_profile(B, K1, 2, np.array([0.5, 0.97]))

    def test_positive_samples_enforced(self):
        with pytest.raises(DomainError):
            SimilarityDiagnostic(np.array([0.1, 0.2]), np.array([1.0, -1.0]))


class TestBoundednessVerdict:
    def test_flat_profile(self):
        D = boundedness_verdict(det_ratio_profile(K1, K1, 1, boundary_radii()))
        assert D.upper_bound_ok is True
        assert D.boundary_limit_positive is True

    def test_vanishing_boundary_limit(self):
        D = boundedness_verdict(det_ratio_profile(K1, K2, 1, boundary_radii()))
        assert D.upper_bound_ok is True
        assert D.boundary_limit_positive is False

    def test_requires_canonical_grid(self):
        D = det_ratio_profile(K1, K1, 1, np.array([0.1, 0.2, 0.3]))
        with pytest.raises(ConfigurationError):
            boundedness_verdict(D)


class TestWitnessCheck:
    def test_identical_sides_zero_residual(self):
        D = det_ratio_profile(K1, K1, 1, boundary_radii())
        f = lambda r: curvature_series(K1, r)
        rep = subharmonic_witness_check(D, f, f, ratio_fn=lambda r: 1.0)
        assert rep.max_residual < 1e-10
        assert rep.passed and rep.subharmonic_ok
        assert rep.phi_sup == 0.0

    def test_power_direct_sum_zero_residual(self):
        D = det_ratio_profile([K1, K1], K1, 2, boundary_radii())
        model = lambda r: 2 * curvature_series(K1, r)
        oper = lambda r: 2 * curvature_series(K1, r)
        rep = subharmonic_witness_check(D, model, oper, ratio_fn=det_ratio_fn([K1, K1], K1, 2))
        assert rep.max_residual < 1e-10

    def test_grid_stencil_fallback(self):
        # coarse-grid mode: keep radii where phi's higher derivatives stay O(10)
        r = np.arange(0.1, 0.6, 0.05)
        D = det_ratio_profile(K1, K2, 1, r)
        model = lambda x: curvature_series(K2, x)
        oper = lambda x: curvature_series(K1, x)
        rep = subharmonic_witness_check(D, model, oper)
        # phi = log(1 - r^2): quarter-Laplacian reproduces the curvature gap
        assert np.isnan(rep.residuals[0]) and np.isnan(rep.residuals[-1])
        assert rep.max_residual < rep.tolerance

    def test_updates_diagnostic(self):
        D = det_ratio_profile(K1, K1, 1, boundary_radii())
        f = lambda r: curvature_series(K1, r)
        rep = subharmonic_witness_check(D, f, f, ratio_fn=lambda r: 1.0)
        assert rep.diagnostic.witness_residual == rep.max_residual


class TestCommutatorExample:
    def test_zero_coupling(self):
        rep = commutator_example([0.0], N=128)
        assert rep.closed_form_check
        assert np.allclose(rep.profile.ratio, 1.0, atol=1e-10)

    def test_scalar_commutes(self):
        rep = commutator_example(np.full(128, 0.4), N=128)
        assert np.allclose(rep.profile.ratio, 1.0, atol=1e-10)
        assert rep.x_norm == pytest.approx(0.4)

    def test_rank_one_coupling_closed_form(self):
        rep = commutator_example([1.0], N=160)
        r = rep.profile.radii
        expected = 1 + (1 - r ** 2) - (1 - r ** 2) ** 2
        assert rep.closed_form_check
        assert rep.profile.ratio == pytest.approx(expected, rel=1e-8)
        assert np.all(rep.profile.ratio >= 1 - 1e-12)
        assert np.all(rep.profile.ratio <= 1.25 + 1e-12)

    def test_cauchy_schwarz_pinch_randomized(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            x = rng.uniform(-0.8, 0.8, size=4)
            rep = commutator_example(x, N=160)
            assert rep.pinch_ok
            assert rep.closed_form_check

    def test_superadditivity_echo(self):
        # det h >= product of the diagonal metrics once X hits the section seed
        rep = commutator_example([0.5, 0.25], N=160)
        r = rep.profile.radii
        diag_product = (1 / (1 - r ** 2)) ** 2
        assert np.all(rep.frame_dets >= diag_product - 1e-10)

    def test_witness_residual(self):
        x = [0.5]
        rep = commutator_example(x, N=160)
        model = lambda r: 2.0 * curvature_series(K1, r)
        w = subharmonic_witness_check(
            rep.profile, model, commutator_trace_curvature(x), ratio_fn=commutator_ratio_fn(x)
        )
        assert w.max_residual < 1e-4
        assert w.phi_sup <= np.log(1.25) + 1e-12

    def test_frame_gram_det_matches_closed_form_directly(self):
        # same quantity through the generic frame path
        x = [0.3, 0.1]
        N = 160
        from cdlab.blockops import MatrixBlock
        from cdlab.shifts import materialize

        M = materialize(hardy(), N).matrix
        X = np.zeros((N, N), dtype=complex)
        X[0, 0], X[1, 1] = x
        B = BlockOperator(((ShiftBlock(hardy()), MatrixBlock(X @ M - M @ X)), (None, ShiftBlock(hardy()))), order=N)
        det_closed = commutator_closed_det(x)
        for r in (0.2, 0.6):
            assert hermitian_det(frame_solver(B, r)) == pytest.approx(det_closed(r), rel=1e-10)


class TestDirectSumDet:
    def test_product(self):
        h = 1 / (1 - np.array([0.1, 0.5]) ** 2)
        assert direct_sum_det(h, h) == pytest.approx(h ** 2)

    def test_identity_factor(self):
        h = np.array([2.0, 3.0])
        assert direct_sum_det(h, np.ones(2)) == pytest.approx(h)

    def test_grid_mismatch(self):
        with pytest.raises(ConfigurationError):
            direct_sum_det(np.ones(3), np.ones(2))

    def test_consistent_with_frame_solver(self):
        B = BlockOperator(((ShiftBlock(hardy()), None), (None, ShiftBlock(szego(2)))), order=160)
        r = 0.5
        h = frame_solver(B, r)
        product = direct_sum_det([h[0, 0].real], [h[1, 1].real])[0]
        assert hermitian_det(h) == pytest.approx(product, rel=1e-12)


class TestCurvatureQuotient:
    radii = np.arange(0.0, 0.95, 0.1)

    def test_half_ratio_passes_weak_screen(self):
        assert curvature_quotient_necessary(
            power_curvature_closed_form(1, self.radii), power_curvature_closed_form(2, self.radii), 2.0
        )

    def test_identical_profiles_pass_tight_bound(self):
        p = power_curvature_closed_form(2, self.radii)
        assert curvature_quotient_necessary(p, p, 1.0)

    def test_third_ratio_fails_bound_two(self):
        assert not curvature_quotient_necessary(
            power_curvature_closed_form(1, self.radii), power_curvature_closed_form(3, self.radii), 2.0
        )

    def test_soundness_never_rejects_equal_profiles(self):
        p = power_curvature_closed_form(3, self.radii)
        for bound in (1.0, 1.5, 10.0):
            assert curvature_quotient_necessary(p, p, bound)


class TestSerialization:
    def test_csv_columns(self, tmp_path):
        D = det_ratio_profile(K1, K1, 1, boundary_radii())
        f = lambda r: curvature_series(K1, r)
        rep = subharmonic_witness_check(D, f, f, ratio_fn=lambda r: 1.0)
        path = tmp_path / "sim.csv"
        write_similarity_csv(rep.diagnostic, path, rep)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "r,ratio,phi,laplacian_phi,trace_curv_diff,residual"
        assert len(lines) == 11
        first = lines[1].split(",")
        assert float(first[0]) == 0.875
        assert float(first[1]) == pytest.approx(1.0)

    def test_verdict_block(self):
        D = boundedness_verdict(det_ratio_profile(K1, K1, 1, boundary_radii()))
        block = diagnostic_verdicts(D)
        assert block["upper_bound_ok"] is True
        assert block["boundary_limit_positive"] is True
        assert block["max_ratio"] == pytest.approx(1.0)


class TestCommutatorBoundednessOnCanonicalGrid:
    def test_closed_form_source_reaches_the_boundary_grid(self):
        # the closed-form ratio is analytic, so the canonical dyadic grid applies
        ratio_fn = commutator_ratio_fn([0.5])
        grid = boundary_radii()
        D = SimilarityDiagnostic(grid, np.array([ratio_fn(r) for r in grid]), source="analytic")
        D = boundedness_verdict(D)
        assert D.upper_bound_ok is True
        assert D.boundary_limit_positive is True  # ratio -> 1 at the boundary
        assert np.all(D.ratio <= 1 + 0.25 + 1e-12)


class TestFrameGramAtRadiusCap:
    def test_positive_definite_at_cap(self):
        B = BlockOperator(
            ((ShiftBlock(hardy()), DiagonalBlock((0.4,))), (None, ShiftBlock(hardy()))),
            order=320,
        )
        h = frame_solver(B, 0.95)
        eigs = np.linalg.eigvalsh((h + h.conj().T) / 2)
        assert eigs[0] > 0
