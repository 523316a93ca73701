from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.core.config import settings
from src.core.constants import (
    LINE_CERTIFICATE_CORANK,
    LINE_DIMENSION,
    PATH_CLAIMED_CORANK,
)
from src.core.errors import DegeneracyError, NoJumpError, ParameterRangeError
from src.core.logger import get_logger
from src.core.preconditions import require_connected, require_in_range, require_min_nodes
from src.models.certificate import Certificate, CertificateKind
from src.models.graph import Graph
from src.models.matrices import EigenSummary, GMatrix
from src.models.representation import LineRep
from src.services.gmatrix import GMatrixService
from src.services.spectra import SpectraService

logger = get_logger(__name__)


@dataclass
class LineRun:
    """Trace of one 1-D driver run."""

    seed: int
    restarts: int = 0
    iterations: int = 0
    cases: list[str] = field(default_factory=list)
    flips: int = 0
    metric: list[tuple[int, int]] = field(default_factory=list)
    # (case, counts before, counts after) for every main step that re-enters
    reentries: list[tuple[str, tuple[int, int], tuple[int, int]]] = field(default_factory=list)
    interpolations: list[tuple[GMatrix, GMatrix]] = field(default_factory=list, repr=False)
    bracket_widths: list[float] = field(default_factory=list)

    def reset(self) -> None:
        self.iterations = 0
        self.cases.clear()
        self.flips = 0
        self.metric.clear()
        self.reentries.clear()
        self.interpolations.clear()
        self.bracket_widths.clear()

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "restarts": self.restarts,
            "iterations": self.iterations,
            "cases": list(self.cases),
            "flipped": self.flips > 0,
            "metric": [list(pair) for pair in self.metric],
            "bracket_width": max(self.bracket_widths) if self.bracket_widths else None,
        }


def _zero_threshold(u: np.ndarray, factor: float) -> float:
    return factor * len(u) * float(np.abs(u).max(initial=0.0))


def _snap(u: np.ndarray, factor: float) -> np.ndarray:
    """
    Set near-zero values to 0 and merge values within the threshold of
    the smallest value of their group.

    Groups never chain: a run of values spaced just under the threshold
    splits into several groups instead of collapsing into one.
    """
    u = np.array(u, dtype=float)
    threshold = _zero_threshold(u, factor)
    order = np.argsort(u, kind="stable")
    groups: list[list[int]] = []
    for i in order:
        if groups and u[i] - u[groups[-1][0]] <= threshold:
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
    for group in groups:
        values = u[group]
        u[group] = 0.0 if np.any(np.abs(values) <= threshold) else values.mean()
    return u


def _sign_counts(u: np.ndarray) -> tuple[int, int]:
    """Number of nodes with u_i >= 0 and with u_i > 0."""
    return int(np.count_nonzero(u >= 0)), int(np.count_nonzero(u > 0))


def _cell_distance(cell: tuple[float, float]) -> float:
    a, b = cell
    if a < 0 < b:
        return 0.0
    return min(abs(a), abs(b))


class LineEmbeddingService:

    @staticmethod
    def line_rep(g: Graph, u: np.ndarray) -> LineRep:
        """Distinct values of u, the cells between them and their edge coverage."""
        u = np.asarray(u, dtype=float)
        levels = tuple(sorted(set(float(x) for x in u)))
        index = {value: k for k, value in enumerate(levels)}
        level_of = tuple(index[float(x)] for x in u)
        cells = tuple(zip(levels[:-1], levels[1:]))

        covering: list[list[tuple[int, int]]] = [[] for _ in cells]
        for i, j in g.edges:
            lo, hi = sorted((level_of[i], level_of[j]))
            for k in range(lo, hi):
                covering[k].append((i, j))
        return LineRep(
            u=u,
            levels=levels,
            level_of=level_of,
            cells=cells,
            coverage=tuple(len(edges) for edges in covering),
            covering=tuple(tuple(edges) for edges in covering),
        )

    @staticmethod
    def perron_scale(m: GMatrix, u: np.ndarray, summary: Optional[EigenSummary] = None) -> tuple[GMatrix, np.ndarray]:
        """
        Node-scale by the positive eigenvector pi of the negative eigenvalue.

        Returns diag(pi) M diag(pi) and u / pi rescaled to max |u_i| = 1.
        Afterwards every node with u_i > 0 has a neighbor with a smaller value
        and every node with u_i < 0 has a neighbor with a larger one.

        Raises:
            DegeneracyError: If the eigenvector is not strictly one-signed
        """
        summary = summary or SpectraService.eigen_summary(m)
        pi = summary.perron
        if pi is None or np.any(pi <= 0):
            raise DegeneracyError("eigenvector of the negative eigenvalue is not positive")
        scaled = GMatrixService.node_scale(m, 1.0 / pi)
        w = np.asarray(u, dtype=float) / pi
        return scaled, w / np.abs(w).max()

    @staticmethod
    def wu_member(g: Graph, u: np.ndarray) -> Optional[GMatrix]:
        """
        A well-signed G-matrix M with M u = 0, or None.

        At every node p with u_p = 0, edges to positive neighbors get
        -2Q/(P+Q) and edges to negative neighbors -2P/(P+Q), where P and Q are
        the total absolute values on each side, so that sum_j M_pj u_j = 0.
        All other edges get -1. The diagonal follows from M u = 0 at nonzero
        nodes and is 0 at zero nodes.

        Returns:
            Optional[GMatrix]: None when some zero node has nonzero neighbors on
                one side only
        """
        u = np.asarray(u, dtype=float)
        values = {e: -1.0 for e in g.edges}
        for p in np.flatnonzero(u == 0.0):
            p = int(p)
            positive = sum(u[j] for j in g.neighbors(p) if u[j] > 0)
            negative = sum(-u[j] for j in g.neighbors(p) if u[j] < 0)
            if positive == 0.0 and negative == 0.0:
                continue
            if positive == 0.0 or negative == 0.0:
                logger.debug(f"Node {p + 1} has u = 0 and neighbors on one side only")
                return None
            total = positive + negative
            for j in g.neighbors(p):
                edge = (min(p, j), max(p, j))
                if u[j] > 0:
                    values[edge] = -2.0 * negative / total
                elif u[j] < 0:
                    values[edge] = -2.0 * positive / total

        offdiag = np.array([values[e] for e in g.edges])
        diag = np.zeros(g.n)
        for (i, j), value in zip(g.edges, offdiag):
            if u[i] != 0.0:
                diag[i] -= value * u[j] / u[i]
            if u[j] != 0.0:
                diag[j] -= value * u[i] / u[j]
        return GMatrix(graph=g, diag=diag, offdiag=offdiag)

    @staticmethod
    def interpolate(
        u: np.ndarray,
        m: GMatrix,
        m_prime: GMatrix,
        factor: Optional[float] = None,
        run: Optional[LineRun] = None,
    ) -> GMatrix:
        """
        First matrix of corank at least 2 on the segment (1 - t) M + t M'.

        Args:
            u: common kernel vector of both matrices
            m: member of W'_u (one negative eigenvalue)
            m_prime: member of W_u with at least two negative eigenvalues

        Raises:
            NoJumpError: If no corank jump is found on the segment
        """
        jump = SpectraService.corank_jump(lambda t: m.combine(m_prime, t), 1, factor=factor)
        if run is not None:
            run.interpolations.append((m, m_prime))
        if jump is None:
            raise NoJumpError("interpolation segment")
        if run is not None:
            run.bracket_widths.append(jump.bracket_width)
        return jump.matrix

    @staticmethod
    def double_node(u: np.ndarray, i: int, j: int, m: GMatrix) -> GMatrix:
        """
        Subtract t = 1 + 2 max(|M_ii|, |M_jj|, |M_ij|) from M_ii and M_jj.

        The principal block on {i, j} then has negative trace and positive
        determinant, so the result has at least two negative eigenvalues.

        Raises:
            ParameterRangeError: If u_i or u_j is nonzero, or i == j
        """
        u = np.asarray(u, dtype=float)
        if i == j or u[i] != 0.0 or u[j] != 0.0:
            raise ParameterRangeError(f"double node needs two nodes with u = 0, got {i + 1}, {j + 1}")
        t = 1.0 + 2.0 * max(abs(m.entry(i, i)), abs(m.entry(j, j)), abs(m.entry(i, j)))
        diag = np.array(m.diag)
        diag[i] -= t
        diag[j] -= t
        return m.with_diag(diag)

    @staticmethod
    def double_cover(
        u: np.ndarray,
        ab: tuple[int, int],
        cd: tuple[int, int],
        m: GMatrix,
    ) -> GMatrix:
        """
        M + t N^ab + t N^cd for two edges crossing the same cell.

        N^ab is supported on {a, b} with (a, b) entry u_b/u_a, (a, a) entry
        -u_b^2/u_a^2 and (b, b) entry -1, so that N^ab u = 0;
        t = 1 + 2 max(|M_bb|, |M_dd|, |M_bd|).

        Raises:
            ParameterRangeError: If u_a, u_c < 0 < u_b, u_d fails or b == d
        """
        u = np.asarray(u, dtype=float)
        (a, b), (c, d) = ab, cd
        if not (u[a] < 0 < u[b] and u[c] < 0 < u[d]):
            raise ParameterRangeError(f"edges {a + 1}{b + 1}, {c + 1}{d + 1} do not cross the origin cell")
        if b == d:
            raise ParameterRangeError(f"both edges end at node {b + 1}; use the reflected variant")

        t = 1.0 + 2.0 * max(abs(m.entry(b, b)), abs(m.entry(d, d)), abs(m.entry(b, d)))
        diag = np.array(m.diag)
        offdiag = np.array(m.offdiag)
        for x, y in (ab, cd):
            ratio = u[y] / u[x]
            diag[x] -= t * ratio ** 2
            diag[y] -= t
            offdiag[m.graph.edge_index[(min(x, y), max(x, y))]] += t * ratio
        return GMatrix(graph=m.graph, diag=diag, offdiag=offdiag)

    @staticmethod
    def case21_shift(u: np.ndarray, m: GMatrix, p: int, t: float) -> GMatrix:
        """
        A^t with A^t (u - t) = 0.

        Edges at p are rescaled by u_j / (u_j - t), the others are kept, and
        the diagonal is completed for the shifted vector. A^t tends to M with
        M_pp = 0 as t -> 0.

        Raises:
            ParameterRangeError: If u_p != 0 or t is outside (0, c), c the
                smallest positive value of u
        """
        u = np.asarray(u, dtype=float)
        if u[p] != 0.0:
            raise ParameterRangeError(f"u at node {p + 1} is {u[p]!r}, expected 0")
        c = float(u[u > 0].min(initial=np.inf))
        require_in_range("t", t, 0.0, c)

        offdiag = np.array(m.offdiag)
        for j in m.graph.neighbors(p):
            k = m.graph.edge_index[(min(p, j), max(p, j))]
            offdiag[k] *= u[j] / (u[j] - t)
        return GMatrixService.complete_diagonal(m.graph, offdiag, u - t)

    @staticmethod
    def case22_shift(u: np.ndarray, b: GMatrix, p: int, t: float) -> GMatrix:
        """
        B^t with B^t (u - t) = 0, for B in W_{u - u_p}.

        Edges at p are rescaled by (u_j - u_p) / (u_j - t); B^t tends to B as
        t -> u_p.

        Raises:
            ParameterRangeError: If t is outside [0, u_p)
        """
        u = np.asarray(u, dtype=float)
        up = float(u[p])
        require_in_range("t", t, 0.0, up, low_closed=True)

        offdiag = np.array(b.offdiag)
        for j in b.graph.neighbors(p):
            k = b.graph.edge_index[(min(p, j), max(p, j))]
            offdiag[k] *= (u[j] - up) / (u[j] - t)
        return GMatrixService.complete_diagonal(b.graph, offdiag, u - t)

    # ------------------------------------------------------------------
    # Driver
    # ------------------------------------------------------------------

    @staticmethod
    def embed_line(
        g: Graph,
        factor: Optional[float] = None,
        seed: Optional[int] = None,
    ) -> Certificate:
        """Embed g in the line or certify corank >= 2; see run_line."""
        certificate, _ = LineEmbeddingService.run_line(g, factor=factor, seed=seed)
        return certificate

    @staticmethod
    def run_line(
        g: Graph,
        factor: Optional[float] = None,
        seed: Optional[int] = None,
        initial: Optional[GMatrix] = None,
    ) -> tuple[Certificate, LineRun]:
        """
        Either a path embedding of g in the line or a well-signed G-matrix
        with one negative eigenvalue and corank at least 2.

        Args:
            g: connected graph with at least 2 nodes
            factor: relative tolerance factor (settings.EIGEN_TOLERANCE)
            seed: 0 starts from the all -1 matrix; other seeds draw random
                edge entries. Restarts use seed + 1, seed + 2, ...
            initial: a good matrix to start from instead of the generated one

        Returns:
            tuple[Certificate, LineRun]: the certificate and the run trace

        Raises:
            DisconnectedGraphError: If g is not connected
            DegeneracyError: If every attempt within the retry budget hit a
                numerical degeneracy
        """
        require_min_nodes(g, 2)
        require_connected(g)
        factor = settings.EIGEN_TOLERANCE if factor is None else factor
        seed = settings.DEFAULT_SEED if seed is None else seed
        run = LineRun(seed=seed)
        logger.info(f"Embedding graph n={g.n} m={g.m} in the line (seed={seed})")

        last_error: Optional[DegeneracyError] = None
        for attempt in range(settings.RETRY_BUDGET + 1):
            run.restarts = attempt
            run.reset()
            current = seed + attempt
            rng = np.random.default_rng(current) if current != 0 else None
            start = initial if (attempt == 0 and initial is not None) else GMatrixService.initial_good_matrix(g, rng)
            try:
                certificate = _attempt(g, start, factor, run)
            except DegeneracyError as e:
                last_error = e
                logger.warning(f"Line attempt {attempt} (seed {current}) degenerate: {e}")
                continue
            certificate.report["run"] = run.summary()
            logger.info(
                f"Line embedding finished: {certificate.kind.value} after {run.iterations} "
                f"iterations, {run.restarts} restarts"
            )
            return certificate, run

        raise DegeneracyError(f"{settings.RETRY_BUDGET} restarts exhausted; last: {last_error}")


def _certificate(g: Graph, m: GMatrix, summary: EigenSummary) -> Certificate:
    if not GMatrixService.is_well_signed(m):
        raise DegeneracyError("certificate matrix is not well-signed")
    if summary.n_negative != 1 or summary.corank < LINE_CERTIFICATE_CORANK:
        raise DegeneracyError(f"certificate signature negative={summary.n_negative} corank={summary.corank}")
    return Certificate(
        kind=CertificateKind.HIGH_CORANK_MATRIX,
        graph=g,
        matrix=m,
        eigen=summary,
        dimension=LINE_DIMENSION,
        claimed_corank=LINE_CERTIFICATE_CORANK,
    )


def _finish(g: Graph, m: GMatrix, factor: float) -> Certificate:
    return _certificate(g, m, SpectraService.eigen_summary(m, factor=factor))


def _attempt(g: Graph, m: GMatrix, factor: float, run: LineRun) -> Certificate:
    service = LineEmbeddingService
    summary = SpectraService.eigen_summary(m, factor=factor)
    if summary.corank >= LINE_CERTIFICATE_CORANK:
        run.cases.append("initial")
        return _certificate(g, m, summary)
    if summary.corank == 0 or summary.n_negative != 1:
        raise DegeneracyError(f"initial matrix negative={summary.n_negative} corank={summary.corank}")

    u = SpectraService.nullspace_basis(m, summary.tol)[0]
    m, u = service.perron_scale(m, u, summary)
    u = _snap(u, factor)
    rep = service.line_rep(g, u)

    if not rep.doubly_covered():
        zeros = rep.zero_nodes()
        if len(zeros) >= 2:
            run.cases.append("double-node")
            return _finish(g, service.interpolate(u, m, service.double_node(u, zeros[0], zeros[1], m), factor, run), factor)
        if not rep.distinct:
            raise DegeneracyError("coincident node values on a singly covered line")
        run.cases.append("path")
        return Certificate(
            kind=CertificateKind.PATH_EMBEDDING,
            graph=g,
            matrix=m,
            eigen=SpectraService.eigen_summary(m, factor=factor),
            dimension=LINE_DIMENSION,
            claimed_corank=PATH_CLAIMED_CORANK,
            embedding=u.reshape(-1, 1),
        )

    for _ in range(4 * g.n + 4):
        run.iterations += 1
        rep = service.line_rep(g, u)
        doubly = rep.doubly_covered()
        if not doubly:
            raise DegeneracyError("no doubly covered cell left")
        k = min(doubly, key=lambda k: (_cell_distance(rep.cells[k]), rep.cells[k][0]))
        a, b = rep.cells[k]
        if b <= 0:
            u = -u
            a, b = -b, -a
            run.flips += 1
            logger.debug(f"Flipped u so that the chosen cell is ({a:.6g}, {b:.6g})")
            rep = service.line_rep(g, u)
            k = rep.cells.index((a, b))
        run.metric.append(_sign_counts(u))

        if a < 0:
            run.cases.append("1")
            (x1, y1), (x2, y2) = [(i, j) if u[i] < 0 else (j, i) for i, j in rep.covering[k][:2]]
            if y1 != y2:
                m_prime = service.double_cover(u, (x1, y1), (x2, y2), m)
            else:
                m_prime = service.double_cover(-u, (y1, x1), (y2, x2), m)
            return _finish(g, service.interpolate(u, m, m_prime, factor, run), factor)

        p = int(min(np.flatnonzero(u >= 0), key=lambda i: u[i]))
        if u[p] == 0.0:
            run.cases.append("2.1")
            outcome = _case21(g, u, m, p, factor, run)
            if isinstance(outcome, Certificate):
                return outcome
            run.reentries.append(("2.1", run.metric[-1], _sign_counts(outcome[0])))
            u, m = outcome
        else:
            run.cases.append("2.2")
            outcome = _case22(g, u, m, p, factor, run)
            if isinstance(outcome, Certificate):
                return outcome
            run.reentries.append(("2.2", run.metric[-1], _sign_counts(outcome[0])))
            u, m = outcome
        logger.debug(f"Main step re-entry {run.iterations}: metric {run.metric[-1]}")

    raise DegeneracyError(f"main step did not terminate within {4 * g.n + 4} iterations")


def _case21(g: Graph, u: np.ndarray, m: GMatrix, p: int, factor: float, run: LineRun):
    service = LineEmbeddingService
    others = [j for j in np.flatnonzero(u == 0.0) if j != p]
    if others:
        return _finish(g, service.interpolate(u, m, service.double_node(u, p, int(others[0]), m), factor, run), factor)

    c = float(u[u > 0].min())
    diag = np.array(m.diag)
    diag[p] = 0.0
    m_prime = m.with_diag(diag)
    summary = SpectraService.eigen_summary(m_prime, factor=factor)
    if summary.n_negative >= 2:
        return _finish(g, service.interpolate(u, m, m_prime, factor, run), factor)
    if summary.n_negative == 0:
        raise DegeneracyError("zeroing the diagonal left no negative eigenvalue")
    if summary.corank >= LINE_CERTIFICATE_CORANK:
        return _certificate(g, m_prime, summary)

    half = 0.5 * c
    shifted = service.case21_shift(u, m, p, half)
    summary = SpectraService.eigen_summary(shifted, factor=factor)
    if summary.n_negative == 1:
        if summary.corank >= LINE_CERTIFICATE_CORANK:
            return _certificate(g, shifted, summary)
        return u - half, shifted
    if summary.n_negative == 0:
        raise DegeneracyError("shifted matrix has no negative eigenvalue")

    jump = SpectraService.corank_jump(
        lambda s: m_prime if s == 0.0 else service.case21_shift(u, m, p, s * half), 1, factor=factor
    )
    if jump is None:
        raise NoJumpError("shift towards the next value")
    run.bracket_widths.append(jump.bracket_width)
    return _certificate(g, jump.matrix, jump.eigen)


def _case22(g: Graph, u: np.ndarray, m: GMatrix, p: int, factor: float, run: LineRun):
    service = LineEmbeddingService
    up = float(u[p])
    moved = u - up
    member = service.wu_member(g, moved)
    if member is None:
        raise DegeneracyError(f"no well-signed matrix annihilates u - u_{p + 1}")
    summary = SpectraService.eigen_summary(member, factor=factor)
    if summary.n_negative == 1:
        if summary.corank >= LINE_CERTIFICATE_CORANK:
            return _certificate(g, member, summary)
        return moved, member
    if summary.n_negative == 0:
        raise DegeneracyError("member matrix has no negative eigenvalue")

    start = service.case22_shift(u, member, p, 0.0)
    summary = SpectraService.eigen_summary(start, factor=factor)
    if summary.n_negative >= 2:
        return _finish(g, service.interpolate(u, m, start, factor, run), factor)
    if summary.n_negative == 1 and summary.corank >= LINE_CERTIFICATE_CORANK:
        return _certificate(g, start, summary)

    jump = SpectraService.corank_jump(
        lambda s: member if s >= 1.0 else service.case22_shift(u, member, p, s * up), 1, factor=factor
    )
    if jump is None:
        raise NoJumpError("shift towards the smallest positive value")
    run.bracket_widths.append(jump.bracket_width)
    return _certificate(g, jump.matrix, jump.eigen)
