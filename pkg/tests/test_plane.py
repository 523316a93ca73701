"""
Tests for the 2-D driver, the geometric outerplanarity test and the
kernel-preserving families.
"""
import numpy as np
import pytest

from src.core.config import settings
from src.core.constants import PLANE_CERTIFICATE_CORANK
from src.core.errors import (
    CoincidentPointsError,
    DegeneracyError,
    DisconnectedGraphError,
    EscalationBudgetError,
    NotBiconnectedError,
    PreconditionError,
    ResidualError,
)
from src.models.certificate import CertificateKind
from src.repositories.certificate import CertificateRepository
from src.services import plane
from src.services.cells import CellComplexService
from src.services.circulation import CirculationService
from src.services.gmatrix import GMatrixService
from src.services.graph import GraphService
from src.services.plane import PlaneEmbeddingService, PlaneRun
from src.services.spectra import SpectraService
from src.services.verification import VerificationService
from tests.factories import GraphFactory, MatrixFactory

SQUARE_POINTS = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])


class TestVerifyOuterplanar:
    """Distinct points, convex position and no crossings."""

    def test_square(self, square):
        assert PlaneEmbeddingService.verify_outerplanar(SQUARE_POINTS, square)

    def test_coincident(self, square):
        points = np.array([[1.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, -1.0]])

        check = PlaneEmbeddingService.verify_outerplanar(points, square)

        assert not check
        assert check.claim == "coincident"
        assert check.witnesses == ((1, 2),)

    def test_point_inside_the_hull(self, square):
        points = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, 0.1]])

        check = PlaneEmbeddingService.verify_outerplanar(points, square)

        assert check.claim == "hull"
        assert check.witnesses == (4,)

    def test_crossing_edges(self, square):
        # nodes 2 and 3 swap places on the square
        points = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])

        check = PlaneEmbeddingService.verify_outerplanar(points, square)

        assert check.claim == "crossing"
        assert check.witnesses == ((1, 2), (3, 4))

    def test_outer_cycle_is_angular_order(self):
        assert PlaneEmbeddingService.outer_cycle(SQUARE_POINTS) == [3, 0, 1, 2]


class TestKernelFamilies:
    """Families that add a negative direction without losing the kernel."""

    def test_zero_vector_family(self, star3):
        m = MatrixFactory.negative_adjacency(star3)
        kernel = SpectraService.nullspace_basis(m)
        assert np.allclose(kernel[:, 0], 0.0)

        family = PlaneEmbeddingService.zero_vector_family(m, 0)

        assert GMatrixService.residual(family(1.5), kernel) <= 1e-12
        assert family(1.5).diag[0] == -1.5

    def test_coincident_family_clears_the_class(self, triangle):
        u = np.array([[1.0, 1.0, -2.0]])
        m = GMatrixService.complete_diagonal(triangle, -np.ones(3), u)

        family = PlaneEmbeddingService.coincident_family(m, [0, 1])

        assert family(1.0).entry(0, 1) == 0.0
        assert GMatrixService.residual(family(0.5), u) <= 1e-12
        assert GMatrixService.residual(family(1.0), u) <= 1e-12


class TestEmbedPlane:
    """The 2-D driver end to end."""

    @pytest.mark.parametrize("g", [GraphService.complete(3), GraphService.cycle(4), GraphService.cycle(5)])
    def test_cycles_are_embedded_as_polygons(self, g):
        certificate = PlaneEmbeddingService.embed_plane(g)

        assert certificate.kind is CertificateKind.OUTERPLANAR_EMBEDDING
        np.testing.assert_allclose(np.linalg.norm(certificate.embedding, axis=1), 1.0)
        order = [v - 1 for v in certificate.report["outer_cycle"]]
        for a, b in zip(order, order[1:] + order[:1]):
            assert (min(a, b), max(a, b)) in g.edge_index
        assert VerificationService.verify_certificate(certificate).passed

    def test_fan_is_outerplanar(self):
        certificate = PlaneEmbeddingService.embed_plane(GraphService.fan(6))

        assert certificate.kind is CertificateKind.OUTERPLANAR_EMBEDDING
        assert VerificationService.verify_certificate(certificate).passed

    @pytest.mark.parametrize("g", [GraphService.complete(4), GraphService.complete_bipartite(2, 3)])
    def test_forbidden_minors_from_the_start(self, g):
        certificate, run = PlaneEmbeddingService.run_plane(g)

        assert certificate.kind is CertificateKind.HIGH_CORANK_MATRIX
        assert run.escalations == ["initial"]
        assert certificate.claimed_corank == PLANE_CERTIFICATE_CORANK
        assert certificate.eigen.corank >= 3 and certificate.eigen.n_negative == 1

    def test_wheel(self):
        certificate = PlaneEmbeddingService.embed_plane(GraphService.wheel(5))

        assert certificate.kind is CertificateKind.HIGH_CORANK_MATRIX
        assert VerificationService.verify_certificate(certificate).passed

    def test_cut_node(self):
        with pytest.raises(NotBiconnectedError) as excinfo:
            PlaneEmbeddingService.embed_plane(GraphService.path(3))

        assert excinfo.value.cut_node == 2

    def test_disconnected(self, disconnected):
        with pytest.raises(DisconnectedGraphError):
            PlaneEmbeddingService.embed_plane(disconnected)

    def test_seed_zero_is_deterministic(self):
        g = GraphService.wheel(6)

        first = CertificateRepository.dumps(PlaneEmbeddingService.embed_plane(g, seed=0))
        second = CertificateRepository.dumps(PlaneEmbeddingService.embed_plane(g, seed=0))

        assert first == second

    def test_small_graphs(self):
        """Every 2-connected graph on 3 to 5 nodes lands on the right side of the dichotomy."""
        for g in GraphService.enumerate_graphs(5, GraphService.is_biconnected, n_min=3):
            certificate = PlaneEmbeddingService.embed_plane(g)

            expected = GraphService.outerplanar_oracle(g)
            assert (certificate.kind is CertificateKind.OUTERPLANAR_EMBEDDING) == expected, g.edges
            assert VerificationService.verify_certificate(certificate).passed, g.edges

    @pytest.mark.slow
    def test_all_graphs_up_to_seven_nodes(self):
        for g in GraphService.enumerate_graphs(7, GraphService.is_biconnected, n_min=3):
            certificate = PlaneEmbeddingService.embed_plane(g)

            expected = GraphService.outerplanar_oracle(g)
            assert (certificate.kind is CertificateKind.OUTERPLANAR_EMBEDDING) == expected, g.edges
            assert VerificationService.verify_certificate(certificate).passed, g.edges


K23_WITH_CHORD = [(1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5), (3, 5)]


class _Reached(Exception):
    """Raised by a spy to stop the driver once a branch is entered."""


def _heptagon_walk(g, trace: PlaneRun) -> plane._CellWalk:
    m = GMatrixService.initial_good_matrix(g)
    normalized = GMatrixService.normalize_rep(GMatrixService.nullspace_rep(m))
    return plane._CellWalk(g, normalized.source, normalized.points, settings.EIGEN_TOLERANCE, trace, normalized.tol)


class TestCellWalk:
    """Graphs whose kernel points fail the outerplanarity test go through the cell walk."""

    def test_squared_heptagon_starts_crossed(self, squared_heptagon):
        m = GMatrixService.initial_good_matrix(squared_heptagon)
        summary = SpectraService.eigen_summary(m)
        points = GMatrixService.normalize_rep(GMatrixService.nullspace_rep(m)).points

        check = PlaneEmbeddingService.verify_outerplanar(points, squared_heptagon)

        assert summary.n_negative == 1 and summary.corank == 2
        assert check.claim == "crossing"

    def test_walk_keeps_its_trace_apart_from_run(self, squared_heptagon):
        trace = PlaneRun(seed=0)

        walk = _heptagon_walk(squared_heptagon, trace)

        assert callable(walk.run)
        assert walk.trace is trace

    def test_squared_heptagon_is_certified_by_the_walk(self, squared_heptagon, monkeypatch):
        entered = []
        original = plane._CellWalk.run

        def spy(walk):
            entered.append(walk.g.n)
            return original(walk)

        monkeypatch.setattr(plane._CellWalk, "run", spy)

        certificate, run = PlaneEmbeddingService.run_plane(squared_heptagon)

        assert entered
        assert certificate.kind is CertificateKind.HIGH_CORANK_MATRIX
        assert certificate.claimed_corank == PLANE_CERTIFICATE_CORANK
        assert certificate.eigen.n_negative == 1 and certificate.eigen.corank >= 3
        assert VerificationService.verify_certificate(certificate).passed

    def test_k23_with_a_chord(self):
        g = GraphFactory.from_one_based(5, K23_WITH_CHORD)

        certificate, run = PlaneEmbeddingService.run_plane(g)

        assert run.escalations[0] == "line"
        assert certificate.kind is CertificateKind.HIGH_CORANK_MATRIX
        assert VerificationService.verify_certificate(certificate).passed


class TestDriverBranches:
    """Each escalation of the 2-D driver is reached on a graph built for it."""

    def test_crossing_vertex_is_targeted(self, squared_heptagon, monkeypatch):
        targets = []

        def spy(rep, g, cplx, cell, q, witness):
            targets.append(np.array(q))
            raise _Reached()

        monkeypatch.setattr(CellComplexService, "shift_limit", staticmethod(spy))

        with pytest.raises(_Reached):
            PlaneEmbeddingService.run_plane(squared_heptagon)

        # a crossing of two chords lies strictly inside the unit circle
        assert np.linalg.norm(targets[0]) < 1.0 - 1e-6

    def test_coincident_class_is_targeted(self, twin_pentagon, monkeypatch):
        classes = []

        def spy(walk, state, members):
            classes.append(list(members))
            raise _Reached()

        monkeypatch.setattr(plane._CellWalk, "_coincident", spy)

        with pytest.raises(_Reached):
            PlaneEmbeddingService.run_plane(twin_pentagon)

        members = classes[0]
        assert len(members) == 2
        assert members[0] // 2 == members[1] // 2

    def test_twin_pentagon_starts_coincident(self, twin_pentagon):
        m = GMatrixService.initial_good_matrix(twin_pentagon)
        points = GMatrixService.normalize_rep(GMatrixService.nullspace_rep(m)).points

        check = PlaneEmbeddingService.verify_outerplanar(points, twin_pentagon)

        assert check.claim == "coincident"

    def test_zero_vector_at_the_hub(self):
        certificate, run = PlaneEmbeddingService.run_plane(GraphService.wheel(5))

        assert run.restarts == 0
        assert run.escalations == ["zero-vector"]
        assert certificate.eigen.corank >= 3

    def test_twin_pentagon_is_certified(self, twin_pentagon):
        certificate = PlaneEmbeddingService.embed_plane(twin_pentagon)

        assert certificate.kind is CertificateKind.HIGH_CORANK_MATRIX
        assert VerificationService.verify_certificate(certificate).passed


class TestWalkFailures:
    """Numerical failures inside the walk restart the driver instead of escaping it."""

    def test_residual_at_the_start_is_a_degeneracy(self, squared_heptagon, monkeypatch):
        def fail(*args, **kwargs):
            raise ResidualError("||U M|| too large")

        monkeypatch.setattr(CirculationService, "decompose", staticmethod(fail))
        m = GMatrixService.initial_good_matrix(squared_heptagon)

        with pytest.raises(DegeneracyError, match="starting matrix") as excinfo:
            plane._attempt(squared_heptagon, m, settings.EIGEN_TOLERANCE, 0, PlaneRun(seed=0))

        assert not isinstance(excinfo.value, PreconditionError)

    def test_precondition_in_the_walk_is_a_degeneracy(self, squared_heptagon, monkeypatch):
        def fail(*args, **kwargs):
            raise CoincidentPointsError("nodes 1 and 2")

        monkeypatch.setattr(CellComplexService, "build_complex", staticmethod(fail))
        m = GMatrixService.initial_good_matrix(squared_heptagon)

        with pytest.raises(DegeneracyError, match="cell walk"):
            plane._attempt(squared_heptagon, m, settings.EIGEN_TOLERANCE, 0, PlaneRun(seed=0))

    def test_exhausted_restarts_report_the_budget(self, squared_heptagon, monkeypatch):
        def fail(*args, **kwargs):
            raise ResidualError("||U M|| too large")

        monkeypatch.setattr(CirculationService, "decompose", staticmethod(fail))
        monkeypatch.setattr(settings, "RETRY_BUDGET", 0)

        with pytest.raises(EscalationBudgetError, match="seed 0"):
            PlaneEmbeddingService.run_plane(squared_heptagon, seed=0)
