from typing import Optional

import numpy as np

from src.core.config import settings
from src.core.constants import ORIGIN_MARGIN_THRESHOLD
from src.core.logger import get_logger
from src.models.certificate import Certificate, CertificateKind
from src.models.graph import Graph
from src.schemas.certificate import CertificateSchema, CheckResult, VerificationReport
from src.services.gmatrix import GMatrixService
from src.services.graph import GraphService
from src.services.plane import GEOMETRY_TOLERANCE, PlaneEmbeddingService
from src.services.spectra import SpectraService

logger = get_logger(__name__)


def _path_geometry(g: Graph, values: np.ndarray) -> CheckResult:
    order = [int(i) for i in np.argsort(values, kind="stable")]
    gaps = np.diff(values[order])
    if gaps.size and gaps.min() <= GEOMETRY_TOLERANCE:
        return CheckResult(name="embedding_geometry", passed=False, value=float(gaps.min()),
                           detail="two nodes share a value")
    position = {node: k for k, node in enumerate(order)}
    long_edges = [(i + 1, j + 1) for i, j in g.edges if abs(position[i] - position[j]) != 1]
    if long_edges or g.m != g.n - 1:
        return CheckResult(name="embedding_geometry", passed=False,
                           detail=f"edges not between consecutive nodes: {long_edges}")
    return CheckResult(name="embedding_geometry", passed=True,
                       value=float(gaps.min()) if gaps.size else None)


def _plane_geometry(g: Graph, points: np.ndarray) -> CheckResult:
    norms = np.linalg.norm(points, axis=1)
    spread = float(np.abs(norms - 1.0).max())
    if spread > GEOMETRY_TOLERANCE * g.n:
        return CheckResult(name="embedding_geometry", passed=False, value=spread,
                           detail="points are not on the unit circle")
    check = PlaneEmbeddingService.verify_outerplanar(points, g)
    if not check:
        return CheckResult(name="embedding_geometry", passed=False,
                           detail=f"{check.claim}: {list(check.witnesses)}")
    cycle = PlaneEmbeddingService.outer_cycle(points)
    if g.n >= 3:
        gaps = [(cycle[k] + 1, cycle[(k + 1) % g.n] + 1) for k in range(g.n)
                if not g.has_edge(cycle[k], cycle[(k + 1) % g.n])]
        if gaps:
            return CheckResult(name="embedding_geometry", passed=False,
                               detail=f"outer cycle skips edges {gaps}")
    return CheckResult(name="embedding_geometry", passed=True, value=spread)


def _oracle(g: Graph, kind: CertificateKind, dimension: int) -> CheckResult:
    if dimension == 1:
        expected = GraphService.path_order(g) is not None
        claimed = kind is CertificateKind.PATH_EMBEDDING
        oracle = "path"
    else:
        expected = GraphService.outerplanar_oracle(g)
        claimed = kind is CertificateKind.OUTERPLANAR_EMBEDDING
        oracle = "outerplanar"
    return CheckResult(
        name="oracle",
        passed=expected == claimed,
        detail=f"{oracle} oracle says {expected}",
    )


class VerificationService:

    @staticmethod
    def verify(
        g: Graph,
        matrix: np.ndarray,
        kind: CertificateKind,
        dimension: int,
        claimed_corank: int,
        tol: float,
        embedding: Optional[np.ndarray] = None,
        eigenvalues: Optional[np.ndarray] = None,
    ) -> VerificationReport:
        """
        Re-check a certificate from scratch.

        Failures are report entries; nothing here raises for a bad
        certificate. The oracle cross-check only runs for graphs within
        settings.ORACLE_SIZE_CAP.
        """
        matrix = np.asarray(matrix, dtype=float)
        checks: list[CheckResult] = []

        pattern = np.ones((g.n, g.n), dtype=bool)
        np.fill_diagonal(pattern, False)
        for i, j in g.edges:
            pattern[i, j] = pattern[j, i] = False
        outside = float(np.abs(matrix[pattern]).max(initial=0.0))
        checks.append(CheckResult(name="zero_pattern", passed=outside == 0.0, value=outside))

        asymmetry = float(np.abs(matrix - matrix.T).max(initial=0.0))
        checks.append(CheckResult(name="symmetry", passed=asymmetry == 0.0, value=asymmetry))

        edge_values = [matrix[i, j] for i, j in g.edges]
        largest = float(max(edge_values)) if edge_values else None
        checks.append(CheckResult(
            name="well_signed",
            passed=largest is None or largest < 0,
            value=largest,
            detail=None if largest is None or largest < 0 else "an edge entry is not negative",
        ))

        symmetric = 0.5 * (matrix + matrix.T)
        summary = SpectraService.eigen_summary(symmetric, tol)
        checks.append(CheckResult(name="negative_eigenvalues", passed=summary.n_negative == 1,
                                  value=float(summary.n_negative)))
        checks.append(CheckResult(
            name="corank",
            passed=summary.corank >= claimed_corank,
            value=float(summary.corank),
            detail=f"claimed {claimed_corank}",
        ))
        if eigenvalues is not None:
            drift = float(np.abs(np.sort(np.asarray(eigenvalues, dtype=float)) - summary.eigenvalues).max(initial=0.0))
            checks.append(CheckResult(name="eigenvalues_consistent", passed=drift <= tol, value=drift))

        if embedding is not None:
            u = np.asarray(embedding, dtype=float).reshape(g.n, -1).T
            residual = float(np.abs(u @ symmetric).max(initial=0.0))
            checks.append(CheckResult(name="residual", passed=residual <= tol, value=residual))
        else:
            u = SpectraService.nullspace_basis(symmetric, tol)
        if u.shape[0]:
            margin = GMatrixService.origin_interior_margin(u)
            checks.append(CheckResult(
                name="origin_interior",
                passed=margin >= ORIGIN_MARGIN_THRESHOLD,
                value=margin if np.isfinite(margin) else None,
            ))

        if kind is CertificateKind.PATH_EMBEDDING and embedding is not None:
            checks.append(_path_geometry(g, u[0]))
        elif kind is CertificateKind.OUTERPLANAR_EMBEDDING and embedding is not None:
            checks.append(_plane_geometry(g, u.T))

        if g.n <= settings.ORACLE_SIZE_CAP:
            checks.append(_oracle(g, kind, dimension))

        report = VerificationReport(passed=all(check.passed for check in checks), checks=checks)
        if not report.passed:
            logger.info(f"Verification failed: {[check.name for check in report.failed()]}")
        return report

    @staticmethod
    def verify_certificate(certificate: Certificate, tol: Optional[float] = None) -> VerificationReport:
        return VerificationService.verify(
            certificate.graph,
            certificate.matrix.dense,
            certificate.kind,
            certificate.dimension,
            certificate.claimed_corank,
            certificate.tolerance if tol is None else tol,
            embedding=certificate.embedding,
            eigenvalues=certificate.eigen.eigenvalues,
        )

    @staticmethod
    def verify_document(document: CertificateSchema, tol: Optional[float] = None) -> VerificationReport:
        g = Graph.from_edges(document.n, ((i - 1, j - 1) for i, j in document.edges))
        return VerificationService.verify(
            g,
            np.array(document.matrix, dtype=float),
            document.kind,
            document.dimension,
            document.claimed_corank,
            document.tolerance if tol is None else tol,
            embedding=None if document.embedding is None else np.array(document.embedding, dtype=float),
            eigenvalues=np.array(document.eigenvalues, dtype=float),
        )

    @staticmethod
    def attach(certificate: Certificate) -> VerificationReport:
        """Verify and store the report under certificate.report["verification"]."""
        report = VerificationService.verify_certificate(certificate)
        certificate.report["verification"] = report.model_dump()
        return report
