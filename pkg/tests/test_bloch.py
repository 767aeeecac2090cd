"""Coordinate algebra: basis operators, physicality, symmetries."""

import numpy as np
import pytest

import oracles
from qutrit_assign import bloch


def random_box_points(n, seed=0):
    rng = np.random.default_rng(seed)
    return bloch.BOX_LOW + rng.random((n, 8)) * (bloch.BOX_HIGH - bloch.BOX_LOW)


class TestBasisOperators:
    def test_orthogonality(self):
        # tr(L_i L_j) = 2 delta_ij
        gram = np.einsum("aij,bji->ab", bloch.LAMBDA, bloch.LAMBDA).real
        np.testing.assert_allclose(gram, 2.0 * np.eye(8), atol=1e-14)

    def test_hermitian_traceless(self):
        for mat in bloch.LAMBDA:
            np.testing.assert_allclose(mat, mat.conj().T, atol=0)
            assert abs(np.trace(mat)) == 0.0

    def test_diagonal_generators(self):
        np.testing.assert_allclose(bloch.LAMBDA[2], np.diag([1.0, 0.0, -1.0]))
        np.testing.assert_allclose(
            bloch.LAMBDA[7], np.diag([1.0, -2.0, 1.0]) / np.sqrt(3.0)
        )

    def test_box_bounds(self):
        assert bloch.X8_MIN == -2.0 / np.sqrt(3.0)
        assert bloch.X8_MAX == 1.0 / np.sqrt(3.0)
        assert bloch.in_box(np.zeros(8))
        assert not bloch.in_box(np.array([0, 0, 0, 0, 0, 0, 0, 1.0]))


class TestDensityMaps:
    def test_roundtrip(self):
        for x in random_box_points(200, seed=1):
            np.testing.assert_allclose(
                bloch.density_to_bloch(bloch.bloch_to_density(x)), x, atol=1e-14
            )

    def test_matrix_entries(self):
        # the matrix built from coordinates entry by entry
        pts = random_box_points(100, seed=2)
        mats = np.array([bloch.bloch_to_density(x) for x in pts])
        np.testing.assert_allclose(
            mats, oracles.matrices_from_points(pts), atol=1e-15
        )

    def test_trace_one_hermitian(self):
        rho = bloch.bloch_to_density(random_box_points(1, seed=3)[0])
        assert abs(np.trace(rho) - 1.0) < 1e-15
        np.testing.assert_allclose(rho, rho.conj().T, atol=0)

    def test_rejects_bad_matrices(self):
        with pytest.raises(ValueError, match="Hermitian"):
            bloch.density_to_bloch(np.eye(3) + 1j * np.diag([0, 1e-6, 0]))
        with pytest.raises(ValueError, match="trace"):
            bloch.density_to_bloch(np.eye(3))
        with pytest.raises(ValueError, match="3x3"):
            bloch.density_to_bloch(np.eye(2))

    def test_rejects_out_of_box(self):
        bad = np.zeros(8)
        bad[7] = bloch.X8_MAX * 1.5
        with pytest.raises(ValueError, match="box"):
            bloch.bloch_to_density(bad)

    def test_diagonal_entries_match_matrix(self):
        pts = random_box_points(50, seed=4)
        d1, d2, d3 = bloch.diagonal_entries(pts[:, 2], pts[:, 7])
        mats = oracles.matrices_from_points(pts)
        np.testing.assert_allclose(d1, mats[:, 0, 0].real, atol=1e-15)
        np.testing.assert_allclose(d2, mats[:, 1, 1].real, atol=1e-15)
        np.testing.assert_allclose(d3, mats[:, 2, 2].real, atol=1e-15)


class TestDeterminant:
    def test_against_cofactor_expansion(self):
        pts = random_box_points(500, seed=5)
        direct = np.array(
            [bloch.det3(bloch.bloch_to_density(x)) for x in pts]
        )
        np.testing.assert_allclose(
            bloch.bloch_determinant(pts), direct, atol=1e-14
        )

    def test_maximally_mixed(self):
        assert abs(bloch.bloch_determinant(np.zeros(8)) - 1.0 / 27.0) < 1e-16

    def test_scalar_and_batch_forms(self):
        pts = random_box_points(10, seed=6)
        batch = bloch.bloch_determinant(pts)
        for i, x in enumerate(pts):
            assert bloch.bloch_determinant(x) == batch[i]


class TestPhysicality:
    def test_against_eigenvalue_oracle(self):
        # closed-form criterion vs direct diagonalisation; skip the
        # razor-edge band where rounding makes either answer defensible
        pts = random_box_points(100_000, seed=7)
        min_eig = oracles.min_eigenvalue(pts)
        decided = np.abs(min_eig) > 1e-12
        claimed = np.array([bloch.is_physical(x) for x in pts[decided]])
        np.testing.assert_array_equal(claimed, min_eig[decided] >= 0.0)

    def test_known_states(self):
        assert bloch.is_physical(np.zeros(8))
        assert bloch.is_physical(bloch.pure_state_bloch(1))
        outside = np.zeros(8)
        outside[0] = 0.9
        outside[2] = 0.9
        assert not bloch.is_physical(outside)

    def test_boundary_counts_as_physical(self):
        # rank-deficient states have det exactly 0 and must pass
        x = np.zeros(8)
        x[2] = 1.0
        x[7] = bloch.X8_MAX
        assert bloch.is_physical(x)


class TestSymmetryMap:
    def test_involution(self):
        for x in random_box_points(100, seed=8):
            np.testing.assert_allclose(
                bloch.symmetry_map(bloch.symmetry_map(x)), x, atol=0
            )

    def test_matches_matrix_conjugation(self):
        # the coordinate map must equal S rho S with S the |1> <-> |-1>
        # permutation matrix
        for x in random_box_points(100, seed=9):
            lhs = bloch.bloch_to_density(bloch.symmetry_map(x))
            rhs = bloch.SWAP_MATRIX @ bloch.bloch_to_density(x) @ bloch.SWAP_MATRIX
            np.testing.assert_allclose(lhs, rhs, atol=1e-15)

    def test_preserves_physicality(self):
        pts = random_box_points(20_000, seed=10)
        for x in pts[:2000]:
            assert bloch.is_physical(x) == bloch.is_physical(bloch.symmetry_map(x))

    def test_fixes_middle_projector(self):
        pure0 = bloch.pure_state_bloch(0)
        np.testing.assert_allclose(bloch.symmetry_map(pure0), pure0, atol=0)


class TestScalars:
    def test_pure_state_coordinates(self):
        x = bloch.pure_state_bloch(1)
        assert x[2] == 1.0
        np.testing.assert_allclose(x[7], bloch.X8_MAX, atol=1e-15)
        x = bloch.pure_state_bloch(-1)
        assert x[2] == -1.0
        np.testing.assert_allclose(x[7], bloch.X8_MAX, atol=1e-15)
        x = bloch.pure_state_bloch(0)
        assert x[2] == 0.0
        np.testing.assert_allclose(x[7], bloch.X8_MIN, atol=1e-15)
        with pytest.raises(ValueError):
            bloch.pure_state_bloch(2)

    def test_expectation_is_x3(self):
        x = np.zeros(8)
        x[2] = 0.25
        assert bloch.expectation_lambda3(x) == 0.25
        rho = bloch.bloch_to_density(x)
        assert abs(np.trace(rho @ bloch.LAMBDA[2]).real - 0.25) < 1e-15

    def test_purity(self):
        assert abs(bloch.purity(np.eye(3) / 3.0) - 1.0 / 3.0) < 1e-15
        assert abs(bloch.purity(np.diag([1.0, 0, 0])) - 1.0) < 1e-15

    def test_entropy(self):
        assert abs(bloch.von_neumann_entropy(np.eye(3) / 3.0) - np.log(3.0)) < 1e-12
        assert bloch.von_neumann_entropy(np.diag([1.0, 0, 0])) == 0.0
        with pytest.raises(ValueError, match="eigenvalue"):
            bloch.von_neumann_entropy(np.diag([1.1, 0, -0.1]))
