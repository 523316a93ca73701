from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from src.core.config import settings
from src.core.errors import NullspaceEmbedError, OracleSizeError
from src.core.logger import get_logger
from src.models.certificate import CertificateKind
from src.models.graph import Graph
from src.services.graph import GraphService
from src.services.line import LineEmbeddingService
from src.services.plane import PlaneEmbeddingService
from src.services.verification import VerificationService

logger = get_logger(__name__)


@dataclass(frozen=True)
class CrosscheckRow:
    n: int
    edges: tuple[tuple[int, int], ...]
    kind: Optional[str]
    expected: bool
    agrees: bool
    verified: bool
    error: Optional[str] = None


@dataclass
class CrosscheckSummary:
    dimension: int
    cap: int
    rows: list[CrosscheckRow] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def disagreements(self) -> list[CrosscheckRow]:
        return [row for row in self.rows if not (row.agrees and row.verified)]

    def by_size(self) -> dict[int, tuple[int, int]]:
        """n -> (graphs, disagreements)."""
        table: dict[int, tuple[int, int]] = {}
        for row in self.rows:
            count, bad = table.get(row.n, (0, 0))
            table[row.n] = (count + 1, bad + (not (row.agrees and row.verified)))
        return dict(sorted(table.items()))

    def as_table(self) -> str:
        lines = [f"{'n':>3} {'graphs':>8} {'disagree':>9}"]
        for n, (count, bad) in self.by_size().items():
            lines.append(f"{n:>3} {count:>8} {bad:>9}")
        lines.append(f"{'all':>3} {self.total:>8} {len(self.disagreements):>9}")
        return "\n".join(lines)


def _check_one(dimension: int, n: int, edges: tuple[tuple[int, int], ...], factor: float, seed: int) -> CrosscheckRow:
    """Run the matching driver on one graph and compare with the oracle."""
    g = Graph(n=n, edges=edges)
    if dimension == 1:
        expected = GraphService.path_order(g) is not None
        embedded_kind = CertificateKind.PATH_EMBEDDING
        driver = LineEmbeddingService.embed_line
    else:
        expected = GraphService.outerplanar_oracle(g)
        embedded_kind = CertificateKind.OUTERPLANAR_EMBEDDING
        driver = PlaneEmbeddingService.embed_plane
    try:
        certificate = driver(g, factor=factor, seed=seed)
    except NullspaceEmbedError as e:
        return CrosscheckRow(n=n, edges=edges, kind=None, expected=expected, agrees=False,
                             verified=False, error=str(e))
    report = VerificationService.verify_certificate(certificate)
    return CrosscheckRow(
        n=n,
        edges=edges,
        kind=certificate.kind.value,
        expected=expected,
        agrees=(certificate.kind is embedded_kind) == expected,
        verified=report.passed,
    )


class CrosscheckService:

    @staticmethod
    def graphs(dimension: int, cap: int) -> list[Graph]:
        """Connected graphs (dimension 1) or 2-connected graphs (dimension 2) up to the cap."""
        if dimension == 1:
            return list(GraphService.enumerate_graphs(cap, n_min=2))
        return list(GraphService.enumerate_graphs(cap, GraphService.is_biconnected, n_min=3))

    @staticmethod
    def crosscheck(
        dimension: int,
        cap: int,
        factor: Optional[float] = None,
        seed: Optional[int] = None,
        workers: int = 1,
    ) -> CrosscheckSummary:
        """
        Run a driver on every graph up to `cap` nodes and compare its
        outcome with the combinatorial oracle.

        Rows come back in enumeration order whatever the number of workers.

        Raises:
            OracleSizeError: If cap exceeds settings.CROSSCHECK_SIZE_CAP
        """
        if cap > settings.CROSSCHECK_SIZE_CAP:
            raise OracleSizeError(f"cap {cap} > {settings.CROSSCHECK_SIZE_CAP}")
        factor = settings.EIGEN_TOLERANCE if factor is None else factor
        seed = settings.DEFAULT_SEED if seed is None else seed

        graphs = CrosscheckService.graphs(dimension, cap)
        logger.info(f"Crosscheck in dimension {dimension}: {len(graphs)} graphs up to n={cap}")
        jobs = [(dimension, g.n, g.edges, factor, seed) for g in graphs]

        summary = CrosscheckSummary(dimension=dimension, cap=cap)
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                summary.rows.extend(pool.map(_check_one, *zip(*jobs)) if jobs else [])
        else:
            summary.rows.extend(_check_one(*job) for job in jobs)

        for row in summary.disagreements:
            logger.warning(f"Disagreement on n={row.n} edges={[(i + 1, j + 1) for i, j in row.edges]}: "
                           f"{row.kind or row.error}")
        return summary
