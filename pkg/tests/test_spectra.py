"""
Tests for eigen summaries, kernel bases and corank-jump search.
"""
import numpy as np
import pytest

from src.core.errors import EvaluatorError, NonFiniteMatrixError, ParameterRangeError
from src.models.matrices import GMatrix
from src.services.gmatrix import GMatrixService
from src.services.graph import GraphService
from src.services.spectra import SpectraService
from tests.factories import GraphFactory, MatrixFactory


class TestEigenSummary:
    """Signatures of closed-form matrices."""

    def test_negative_all_ones(self):
        summary = SpectraService.eigen_summary(MatrixFactory.negative_all_ones(4))

        np.testing.assert_allclose(summary.eigenvalues, [-4, 0, 0, 0], atol=1e-10)
        assert (summary.n_negative, summary.corank, summary.n_positive) == (1, 3, 0)
        assert summary.is_good

    def test_negative_star_adjacency(self, star3):
        summary = SpectraService.eigen_summary(MatrixFactory.negative_adjacency(star3))

        root = np.sqrt(3.0)
        np.testing.assert_allclose(summary.eigenvalues, [-root, 0, 0, root], atol=1e-9)
        assert summary.corank == 2

    def test_perron_vector_is_positive(self, path4):
        summary = SpectraService.eigen_summary(MatrixFactory.negative_adjacency(path4))

        assert np.all(summary.perron > 0)
        assert np.linalg.norm(summary.perron) == pytest.approx(1.0)

    def test_default_tolerance(self):
        m = MatrixFactory.negative_all_ones(4)

        assert SpectraService.default_tolerance(m) == pytest.approx(1e-9 * 4 * 4)
        assert SpectraService.default_tolerance(m, factor=1e-6) == pytest.approx(1e-6 * 4 * 4)

    def test_small_norm_uses_unit_scale(self):
        dense = 1e-3 * np.eye(3)

        assert SpectraService.default_tolerance(dense) == pytest.approx(1e-9 * 3)

    def test_explicit_tolerance_widens_kernel(self):
        dense = np.diag([-1.0, 1e-6, 2.0])

        assert SpectraService.eigen_summary(dense).corank == 0
        assert SpectraService.eigen_summary(dense, tol=1e-5).corank == 1

    def test_negative_tolerance(self):
        with pytest.raises(ParameterRangeError):
            SpectraService.eigen_summary(np.eye(2), tol=-1.0)

    def test_non_finite(self):
        with pytest.raises(NonFiniteMatrixError):
            SpectraService.eigen_summary(np.array([[np.nan, 0.0], [0.0, 1.0]]))


class TestInvariance:
    """The signature depends on the matrix, not on node labels or positive scale."""

    @pytest.mark.parametrize("seed", range(5))
    def test_relabeling_keeps_the_summary(self, seed):
        g = GraphFactory.random_connected(7, 0.4, seed=seed)
        m = GMatrixService.initial_good_matrix(g, np.random.default_rng(seed))
        order = np.random.default_rng(seed + 100).permutation(g.n)

        before = SpectraService.eigen_summary(m)
        after = SpectraService.eigen_summary(m.dense[np.ix_(order, order)])

        np.testing.assert_allclose(after.eigenvalues, before.eigenvalues, atol=1e-10)
        assert (after.n_negative, after.corank, after.n_positive) == (before.n_negative, before.corank, before.n_positive)

    @pytest.mark.parametrize("scale", [0.5, 2.0, 3.0])
    def test_positive_scale_keeps_the_signature(self, scale):
        m = GMatrixService.initial_good_matrix(GraphService.fan(6))

        before = SpectraService.eigen_summary(m)
        after = SpectraService.eigen_summary(scale * m)

        assert (after.n_negative, after.corank) == (before.n_negative, before.corank)


class TestNullspaceBasis:
    """Orthonormal kernel rows."""

    def test_basis_spans_kernel(self):
        m = MatrixFactory.negative_all_ones(4)

        basis = SpectraService.nullspace_basis(m)

        assert basis.shape == (3, 4)
        np.testing.assert_allclose(basis @ basis.T, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(basis @ m.dense, 0.0, atol=1e-12)

    def test_nonsingular_gives_empty_basis(self):
        assert SpectraService.nullspace_basis(np.eye(3)).shape == (0, 3)


class TestCorankJump:
    """Bracketing and bisection along a matrix family."""

    def test_diagonal_crossing(self):
        # the second eigenvalue crosses zero at t = 0.3
        g = GraphService.path(2)
        family = lambda t: GMatrix(graph=g, diag=np.array([-1.0, 0.3 - t]), offdiag=np.array([0.0]))

        jump = SpectraService.corank_jump(family, 0)

        assert jump is not None
        assert jump.t == pytest.approx(0.3, abs=1e-8)
        assert jump.eigen.corank >= 1
        assert jump.bracket_width <= 1e-12

    def test_jump_from_singular_start(self):
        g = GraphService.path(2)
        family = lambda t: GMatrix(graph=g, diag=np.array([0.0, 0.5 - t]), offdiag=np.array([0.0]))

        jump = SpectraService.corank_jump(family, 1)

        assert jump is not None
        assert jump.t == pytest.approx(0.5, abs=1e-8)
        assert jump.eigen.corank == 2

    def test_no_jump(self):
        g = GraphService.path(2)

        jump = SpectraService.corank_jump(lambda t: GMatrix(graph=g, diag=np.array([1.0 + t, 2.0]),
                                                            offdiag=np.array([0.0])), 0, samples=16)

        assert jump is None

    def test_first_of_two_jumps(self):
        g = GraphService.path(2)
        family = lambda t: GMatrix(graph=g, diag=np.array([0.2 - t, 0.7 - t]), offdiag=np.array([0.0]))

        jump = SpectraService.corank_jump(family, 0)

        assert jump.t == pytest.approx(0.2, abs=1e-8)

    def test_evaluator_failure_is_wrapped(self):
        def broken(t):
            raise ValueError("boom")

        with pytest.raises(EvaluatorError, match="boom"):
            SpectraService.corank_jump(broken, 0, samples=4)
