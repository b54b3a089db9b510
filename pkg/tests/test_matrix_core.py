import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdlab.errors import DimensionError, DomainError, SingularityError, StructureError
from cdlab.matrix_core import (
    block_determinant,
    hermitian_check,
    hermitian_det,
    psd_check,
    schur_split_psd,
)
from cdlab import blockops, shifts


def random_hermitian(rng, n, scale=1.0):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (G + G.conj().T) / 2.0


def random_unitary(rng, n):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


class TestHermitianCheck:
    def test_identity(self):
        assert hermitian_check(np.eye(3), 1e-12)

    def test_nilpotent_cell(self):
        assert not hermitian_check(np.array([[0.0, 1.0], [0.0, 0.0]]), 1e-12)

    def test_frame_gram_is_hermitian(self):
        # both triangles recomputed independently from the frame vectors
        B = blockops.BlockOperator(
            ((blockops.ShiftBlock(shifts.hardy()), blockops.DiagonalBlock((0.3,))),
             (None, blockops.ShiftBlock(shifts.bergman()))),
            order=96,
        )
        h = blockops.frame_solver(B, 0.3)
        assert hermitian_check(h, 1e-12)
        assert abs(h[0, 1] - np.conj(h[1, 0])) <= 1e-14

    def test_rejects_non_square(self):
        with pytest.raises(DimensionError):
            hermitian_check(np.zeros((2, 3)))


class TestPsdCheck:
    def test_unweighted_shift_defect(self):
        T = shifts.materialize(shifts.szego(1), 16)
        D = np.eye(16) - T.matrix.conj().T @ T.matrix
        verdict = psd_check(D, 1e-12)
        assert verdict.is_psd
        assert verdict.min_eigenvalue == pytest.approx(0.0, abs=1e-14)

    def test_explicit_negative_eigenvalue(self):
        verdict = psd_check(np.diag([1.0, -0.1]))
        assert not verdict.is_psd
        assert verdict.min_eigenvalue == pytest.approx(-0.1)

    def test_order_two_defect_projection(self):
        T = shifts.materialize(shifts.szego(2), 32)
        D2 = shifts.defect_operator(T, 2)
        verdict = psd_check(D2[:30, :30], 1e-10)
        assert verdict.is_psd
        assert verdict.min_eigenvalue == pytest.approx(0.0, abs=1e-13)

    def test_rejects_non_hermitian(self):
        with pytest.raises(StructureError):
            psd_check(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_threshold_scales_with_norm(self):
        v = psd_check(np.diag([1e6, -1e-6]), 1e-10)
        assert v.is_psd  # -1e-6 is within 1e-10 * 1e6

    def test_unitary_invariance(self):
        rng = np.random.default_rng(7)
        for n in (3, 6, 10):
            A = random_hermitian(rng, n)
            U = random_unitary(rng, n)
            v1 = psd_check(A)
            v2 = psd_check(U @ A @ U.conj().T)
            assert abs(v1.min_eigenvalue - v2.min_eigenvalue) < 1e-10


class TestSchurSplit:
    def test_identity(self):
        v11, vs = schur_split_psd(np.eye(4), 2)
        assert v11.is_psd and vs.is_psd

    def test_hand_computed_complement(self):
        # [[1,2],[2,1]] split 1: complement 1 - 2*1*2 = -3
        v11, vs = schur_split_psd(np.array([[1.0, 2.0], [2.0, 1.0]]), 1)
        assert v11.is_psd
        assert not vs.is_psd
        assert vs.min_eigenvalue == pytest.approx(-3.0)

    def test_gram_plus_ridge_both_psd(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            G = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
            A = G.conj().T @ G + 1e-3 * np.eye(6)
            for split in (1, 3, 5):
                v11, vs = schur_split_psd(A, split)
                assert v11.is_psd and vs.is_psd

    def test_singular_leading_block(self):
        A = np.zeros((3, 3))
        A[2, 2] = 1.0
        with pytest.raises(SingularityError):
            schur_split_psd(A, 1)

    def test_split_equivalence_random(self):
        # joint positivity of the split parts <=> positivity of the whole
        rng = np.random.default_rng(23)
        checked = 0
        while checked < 200:
            n = int(rng.integers(2, 13))
            A = random_hermitian(rng, n)
            if rng.random() < 0.5:  # mix in PSD instances
                A = A @ A.conj().T / n
                A = (A + A.conj().T) / 2
            split = int(rng.integers(1, n))
            if np.linalg.cond(A[:split, :split]) >= 1e8:
                continue
            v11, vs = schur_split_psd(A, split)
            assert (v11.is_psd and vs.is_psd) == psd_check(A).is_psd
            checked += 1


@given(st.integers(min_value=2, max_value=8), st.integers(min_value=0, max_value=2 ** 31 - 1))
@settings(max_examples=60, deadline=None)
def test_superadditivity_of_psd_determinants(n, seed):
    rng = np.random.default_rng(seed)
    G1 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    G2 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    N1 = G1.conj().T @ G1
    N2 = G2.conj().T @ G2
    lhs = hermitian_det(N1 + N2)
    rhs = hermitian_det(N1) + hermitian_det(N2)
    assert lhs >= rhs - 1e-9 * max(1.0, abs(lhs))


class TestBlockDeterminant:
    def test_diagonal(self):
        assert block_determinant(np.diag([2.0, 3.0, 4.0, 5.0]), 2) == pytest.approx(120.0)

    def test_two_by_two(self):
        assert block_determinant(np.array([[1.0, 1.0], [1.0, 2.0]]), 1) == pytest.approx(1.0)

    def test_matches_lu_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            A = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
            split = int(rng.integers(1, 8))
            if np.linalg.cond(A[:split, :split]) >= 1e8:
                continue
            direct = np.linalg.det(A)
            assert block_determinant(A, split) == pytest.approx(direct, rel=1e-10)

    def test_singular_leading_block(self):
        A = np.eye(4)
        A[0, 0] = 0.0
        with pytest.raises(SingularityError):
            block_determinant(A, 1)


class TestHermitianDet:
    def test_psd_cholesky_path(self):
        rng = np.random.default_rng(3)
        G = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        A = G.conj().T @ G + np.eye(5)
        assert hermitian_det(A) == pytest.approx(np.linalg.det(A).real, rel=1e-12)

    def test_indefinite_lu_fallback(self):
        A = np.diag([2.0, -3.0])
        assert hermitian_det(A) == pytest.approx(-6.0)


def test_finite_entries_required():
    with pytest.raises(DomainError):
        from cdlab.matrix_core import as_complex_matrix

        as_complex_matrix(np.array([[np.nan, 0.0], [0.0, 1.0]]))
