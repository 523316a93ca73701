"""
Tests for G-matrix construction, scaling and nullspace representations.
"""
import numpy as np
import pytest

from src.core.errors import DisconnectedGraphError, ShapeError, ZeroCorankError, ZeroScaleError, ZeroVectorError
from src.models.matrices import GMatrix
from src.services.gmatrix import GMatrixService
from src.services.graph import GraphService
from src.services.line import LineEmbeddingService
from src.services.plane import PlaneEmbeddingService
from src.services.spectra import SpectraService
from tests.factories import GraphFactory, MatrixFactory


class TestGMatrixModel:
    """Storage on the diagonal and the edges only."""

    def test_dense_has_zero_pattern(self, path4):
        dense = MatrixFactory.negative_adjacency(path4).dense

        assert dense[0, 2] == 0.0 and dense[0, 3] == 0.0
        assert dense[0, 1] == dense[1, 0] == -1.0

    def test_from_dense_reads_upper_triangle(self, triangle):
        dense = np.array([[1.0, -2.0, -3.0], [-2.0, 4.0, -5.0], [-3.0, -5.0, 6.0]])

        m = GMatrix.from_dense(triangle, dense)

        np.testing.assert_array_equal(m.dense, dense)
        assert m.entry(2, 1) == -5.0

    def test_shape_is_checked(self, triangle):
        with pytest.raises(ShapeError):
            GMatrix(graph=triangle, diag=np.zeros(2), offdiag=np.zeros(3))

    def test_combine(self, triangle):
        a = MatrixFactory.negative_adjacency(triangle)
        b = a.shifted(2.0)

        np.testing.assert_allclose(a.combine(b, 0.25).diag, 0.5)


class TestInitialGoodMatrix:
    """The starting point of both drivers."""

    def test_triangle_spectrum(self, triangle):
        m = GMatrixService.initial_good_matrix(triangle)

        np.testing.assert_allclose(SpectraService.eigen_summary(m).eigenvalues, [-3, 0, 0], atol=1e-10)

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_random_start_is_good_and_singular(self, seed):
        g = GraphFactory.random_connected(7, 0.4, seed=seed)

        m = GMatrixService.initial_good_matrix(g, np.random.default_rng(seed))
        summary = SpectraService.eigen_summary(m)

        assert GMatrixService.is_well_signed(m)
        assert summary.n_negative == 1
        assert summary.corank >= 1
        assert np.all((m.offdiag >= -2.0) & (m.offdiag <= -0.5))

    def test_disconnected_graph(self, disconnected):
        with pytest.raises(DisconnectedGraphError):
            GMatrixService.initial_good_matrix(disconnected)


class TestCompleteDiagonal:
    """The diagonal that puts a representation into the kernel."""

    def test_kernel_contains_representation(self, square):
        u = np.array([[1.0, -2.0, 0.5, 3.0]])
        offdiag = np.array([-1.0, -2.0, -0.5, -1.5])

        m = GMatrixService.complete_diagonal(square, offdiag, u)

        assert GMatrixService.residual(m, u) <= 1e-12

    def test_zero_vector(self, square):
        u = np.array([[1.0, 0.0, -1.0, 0.0], [0.0, 0.0, 0.0, 1.0]])

        with pytest.raises(ZeroVectorError) as excinfo:
            GMatrixService.complete_diagonal(square, -np.ones(4), u)

        assert excinfo.value.nodes == (1,)


class TestScaling:
    """Node scaling D^-1 M D^-1 and its effect on the kernel."""

    def test_node_scale_keeps_signature(self, path4):
        m = GMatrixService.initial_good_matrix(path4)
        d = np.array([0.5, 2.0, 1.5, 3.0])

        before = SpectraService.eigen_summary(m)
        after = SpectraService.eigen_summary(GMatrixService.node_scale(m, d))

        assert (after.n_negative, after.corank) == (before.n_negative, before.corank)

    def test_zero_scale(self, path4):
        with pytest.raises(ZeroScaleError):
            GMatrixService.node_scale(MatrixFactory.negative_adjacency(path4), np.array([1.0, 0.0, 1.0, 1.0]))

    def test_rep_scale_keeps_residual(self, triangle):
        rep = GMatrixService.nullspace_rep(GMatrixService.initial_good_matrix(triangle))

        scaled = GMatrixService.rep_scale(rep, np.array([2.0, 0.5, 3.0]))

        assert GMatrixService.residual(scaled.source, scaled) <= 1e-12

    def test_normalize_rep(self, triangle):
        rep = GMatrixService.nullspace_rep(GMatrixService.initial_good_matrix(triangle))

        normalized = GMatrixService.normalize_rep(rep)

        np.testing.assert_allclose(normalized.norms(), 1.0)
        assert GMatrixService.residual(normalized.source, normalized) <= 1e-12


class TestNullspaceRep:
    """Kernel bases and the origin-interior margin."""

    def test_dimension_is_corank(self):
        rep = GMatrixService.nullspace_rep(MatrixFactory.negative_all_ones(4))

        assert rep.dim == 3 and rep.n == 4

    def test_nonsingular(self, triangle):
        m = GMatrix(graph=triangle, diag=np.full(3, 5.0), offdiag=-np.ones(3))

        with pytest.raises(ZeroCorankError):
            GMatrixService.nullspace_rep(m)

    def test_origin_interior_for_good_matrix(self, star3):
        rep = GMatrixService.nullspace_rep(MatrixFactory.negative_adjacency(star3))

        assert GMatrixService.origin_interior_margin(rep) >= 1e-10

    def test_margin_of_one_sided_points(self):
        u = np.array([[1.0, 2.0, 3.0]])

        assert GMatrixService.origin_interior_margin(u) < 0

    def test_margin_of_symmetric_points(self):
        u = np.array([[1.0, -1.0, 0.0, 0.0], [0.0, 0.0, 1.0, -1.0]])

        assert GMatrixService.origin_interior_margin(u) == pytest.approx(0.25)


class TestGoodMatrixKernels:
    """Kernels of singular well-signed matrices with at most one negative eigenvalue."""

    @pytest.mark.parametrize("seed", range(10))
    def test_semidefinite_kernel_is_simple_and_one_signed(self, seed):
        g = GraphFactory.random_connected(8, 0.4, seed=seed)
        m = MatrixFactory.random_well_signed(g, seed=seed)
        lowest = SpectraService.eigen_summary(m).eigenvalues[0]

        semidefinite = m.shifted(-lowest)
        summary = SpectraService.eigen_summary(semidefinite)
        kernel = SpectraService.nullspace_basis(semidefinite, summary.tol)

        assert summary.n_negative == 0 and summary.corank == 1
        assert np.all(kernel[0] > 0) or np.all(kernel[0] < 0)

    @pytest.mark.parametrize("seed", range(10))
    def test_origin_is_interior_for_random_starts(self, seed):
        g = GraphFactory.random_connected(7, 0.5, seed=seed)
        m = GMatrixService.initial_good_matrix(g, np.random.default_rng(seed))

        rep = GMatrixService.nullspace_rep(m)

        assert GMatrixService.origin_interior_margin(rep) >= 1e-10

    @pytest.mark.parametrize("g", [GraphService.star(3), GraphService.cycle(5), GraphService.fan(6)])
    def test_origin_is_interior_for_line_certificates(self, g):
        certificate = LineEmbeddingService.embed_line(g)

        rep = GMatrixService.nullspace_rep(certificate.matrix, certificate.eigen.tol)

        assert GMatrixService.origin_interior_margin(rep) >= 1e-10

    @pytest.mark.parametrize("g", [GraphService.cycle(5), GraphService.fan(6), GraphService.complete(4)])
    def test_origin_is_interior_for_plane_certificates(self, g):
        certificate = PlaneEmbeddingService.embed_plane(g)

        rep = GMatrixService.nullspace_rep(certificate.matrix, certificate.eigen.tol)

        assert GMatrixService.origin_interior_margin(rep) >= 1e-10
