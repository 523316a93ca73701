from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Union

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from src.core.config import settings
from src.core.constants import (
    MAX_DOUBLINGS,
    MAX_HALVINGS,
    OUTERPLANAR_CLAIMED_CORANK,
    PLANE_CERTIFICATE_CORANK,
    PLANE_DIMENSION,
)
from src.core.errors import (
    DegeneracyError,
    EscalationBudgetError,
    EvaluatorError,
    NoJumpError,
    PreconditionError,
    ResidualError,
)
from src.core.logger import get_logger
from src.core.preconditions import require_biconnected
from src.models.certificate import Certificate, CertificateKind
from src.models.graph import Graph
from src.models.matrices import CorankJump, EigenSummary, GMatrix
from src.models.plane import Cell, CellComplex, CellDimension, Circulation, EdgeSplit, OuterplanarCheck
from src.models.representation import PlaneRep
from src.services.cells import CellComplexService
from src.services.circulation import CirculationService, EdgeMap
from src.services.gmatrix import GMatrixService
from src.services.line import LineEmbeddingService
from src.services.spectra import MatrixFamily, SpectraService

logger = get_logger(__name__)

GEOMETRY_TOLERANCE = 1e-9


@dataclass
class PlaneRun:
    """Trace of one 2-D driver run."""

    seed: int
    restarts: int = 0
    escalations: list[str] = field(default_factory=list)
    cells_visited: int = 0
    transitions: int = 0
    failures: int = 0
    bracket_widths: list[float] = field(default_factory=list)
    line: Optional[dict] = None

    def reset(self) -> None:
        self.escalations.clear()
        self.cells_visited = 0
        self.transitions = 0
        self.failures = 0
        self.bracket_widths.clear()
        self.line = None

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "restarts": self.restarts,
            "escalations": list(self.escalations),
            "cells_visited": self.cells_visited,
            "transitions": self.transitions,
            "failures": self.failures,
            "bracket_width": max(self.bracket_widths) if self.bracket_widths else None,
            "line": self.line,
        }


def _orient(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    return float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def _on_segment(a: np.ndarray, b: np.ndarray, p: np.ndarray, tol: float) -> bool:
    return bool(np.all(p >= np.minimum(a, b) - tol) and np.all(p <= np.maximum(a, b) + tol))


def _segments_meet(a, b, c, d, tol: float) -> bool:
    """Closed segments ab and cd intersect (touching counts)."""
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0 and min(abs(o1), abs(o2), abs(o3), abs(o4)) > tol:
        return True
    return (
        (abs(o1) <= tol and _on_segment(a, b, c, tol))
        or (abs(o2) <= tol and _on_segment(a, b, d, tol))
        or (abs(o3) <= tol and _on_segment(c, d, a, tol))
        or (abs(o4) <= tol and _on_segment(c, d, b, tol))
    )


def _chain(pieces: list[MatrixFamily]) -> MatrixFamily:
    """Run several families on [0, 1] one after the other over [0, 1]."""
    count = len(pieces)

    def family(s: float) -> GMatrix:
        k = min(int(s * count), count - 1)
        return pieces[k](s * count - k)

    return family


class PlaneEmbeddingService:

    @staticmethod
    def verify_outerplanar(
        rep: Union[PlaneRep, np.ndarray],
        g: Graph,
        tol: Optional[float] = None,
    ) -> OuterplanarCheck:
        """
        Geometric test that a point assignment is an outerplanar embedding.

        Checks, in order: points pairwise distinct, every point a vertex of
        the convex hull, no two edges with disjoint endpoints meeting.
        """
        points = np.asarray(rep.points if isinstance(rep, PlaneRep) else rep, dtype=float).reshape(-1, 2)
        tol = GEOMETRY_TOLERANCE if tol is None else tol

        coincident = [(i + 1, j + 1) for i, j in combinations(range(len(points)), 2)
                      if np.linalg.norm(points[i] - points[j]) <= tol]
        if coincident:
            return OuterplanarCheck(ok=False, claim="coincident", witnesses=tuple(coincident))

        if len(points) >= 3:
            try:
                on_hull = set(int(v) for v in ConvexHull(points).vertices)
            except QhullError:
                on_hull = set()
            inner = tuple(i + 1 for i in range(len(points)) if i not in on_hull)
            if inner:
                return OuterplanarCheck(ok=False, claim="hull", witnesses=inner)

        for (a, b), (c, d) in combinations(g.edges, 2):
            if {a, b} & {c, d}:
                continue
            if _segments_meet(points[a], points[b], points[c], points[d], tol):
                return OuterplanarCheck(
                    ok=False, claim="crossing", witnesses=((a + 1, b + 1), (c + 1, d + 1)))
        return OuterplanarCheck(ok=True)

    @staticmethod
    def outer_cycle(rep: Union[PlaneRep, np.ndarray]) -> list[int]:
        """Nodes in counterclockwise angular order around the origin (0-based)."""
        shifted = rep.shifted if isinstance(rep, PlaneRep) else np.asarray(rep, dtype=float).reshape(-1, 2)
        angles = np.arctan2(shifted[:, 1], shifted[:, 0])
        return [int(i) for i in np.argsort(angles, kind="stable")]

    @staticmethod
    def zero_vector_family(m: GMatrix, node: int) -> MatrixFamily:
        """s -> M - s e_i e_i^T; keeps the kernel when u_i = 0."""

        def family(s: float) -> GMatrix:
            diag = np.array(m.diag)
            diag[node] -= s
            return m.with_diag(diag)

        return family

    @staticmethod
    def coincident_family(m: GMatrix, members: list[int]) -> MatrixFamily:
        """
        a -> M + a sum_ij M_ij (e_i - e_j)(e_i - e_j)^T over the edges
        inside a class of nodes sharing a point.

        Every kernel vector is constant on the class, so the kernel of M is
        kept; at a = 1 the entries inside the class vanish.
        """
        inside = set(members)
        diag_step = np.zeros(m.n)
        offdiag_step = np.zeros(m.graph.m)
        for k, (i, j) in enumerate(m.graph.edges):
            if i in inside and j in inside:
                value = float(m.offdiag[k])
                diag_step[i] += value
                diag_step[j] += value
                offdiag_step[k] -= value

        def family(a: float) -> GMatrix:
            return GMatrix(graph=m.graph, diag=m.diag + a * diag_step, offdiag=m.offdiag + a * offdiag_step)

        return family

    # ------------------------------------------------------------------
    # Driver
    # ------------------------------------------------------------------

    @staticmethod
    def embed_plane(
        g: Graph,
        factor: Optional[float] = None,
        seed: Optional[int] = None,
    ) -> Certificate:
        """Embed g as an outerplanar graph or certify corank >= 3; see run_plane."""
        certificate, _ = PlaneEmbeddingService.run_plane(g, factor=factor, seed=seed)
        return certificate

    @staticmethod
    def run_plane(
        g: Graph,
        factor: Optional[float] = None,
        seed: Optional[int] = None,
    ) -> tuple[Certificate, PlaneRun]:
        """
        Either an outerplanar embedding of g on the unit circle or a
        well-signed G-matrix with one negative eigenvalue and corank at
        least 3.

        The embedding is the normalized nullspace representation of a good
        matrix of corank 2 and is accepted only after verify_outerplanar.
        When that test fails the origin is walked through the cells of the
        line arrangement, keeping a good matrix whose kernel contains the
        shifted representation, until a family of such matrices gains a
        third kernel dimension.

        Raises:
            DisconnectedGraphError: If g is not connected
            NotBiconnectedError: If g has a cut node or fewer than 3 nodes
            EscalationBudgetError: If every restart failed; the detail lists
                the escalations tried
        """
        require_biconnected(g)
        factor = settings.EIGEN_TOLERANCE if factor is None else factor
        seed = settings.DEFAULT_SEED if seed is None else seed
        run = PlaneRun(seed=seed)
        logger.info(f"Embedding graph n={g.n} m={g.m} in the plane (seed={seed})")

        failures: list[str] = []
        for attempt in range(settings.RETRY_BUDGET + 1):
            run.restarts = attempt
            run.reset()
            current = seed + attempt
            rng = np.random.default_rng(current) if current != 0 else None
            try:
                certificate = _attempt(g, GMatrixService.initial_good_matrix(g, rng), factor, current, run)
            except DegeneracyError as e:
                failures.append(f"seed {current}: {e}")
                logger.warning(f"Plane attempt {attempt} (seed {current}) failed: {e}")
                continue
            certificate.report["run"] = run.summary()
            logger.info(
                f"Plane embedding finished: {certificate.kind.value} after "
                f"{run.cells_visited} cells, {run.restarts} restarts"
            )
            return certificate, run

        raise EscalationBudgetError("; ".join(failures))


def _certificate(g: Graph, m: GMatrix, summary: EigenSummary) -> Certificate:
    if not GMatrixService.is_well_signed(m):
        raise DegeneracyError("certificate matrix is not well-signed")
    if summary.n_negative != 1 or summary.corank < PLANE_CERTIFICATE_CORANK:
        raise DegeneracyError(f"certificate signature negative={summary.n_negative} corank={summary.corank}")
    return Certificate(
        kind=CertificateKind.HIGH_CORANK_MATRIX,
        graph=g,
        matrix=m,
        eigen=summary,
        dimension=PLANE_DIMENSION,
        claimed_corank=PLANE_CERTIFICATE_CORANK,
    )


def _attempt(g: Graph, m: GMatrix, factor: float, seed: int, run: PlaneRun) -> Certificate:
    summary = SpectraService.eigen_summary(m, factor=factor)
    if summary.n_negative != 1 or summary.corank == 0:
        raise DegeneracyError(f"initial matrix negative={summary.n_negative} corank={summary.corank}")

    if summary.corank == 1:
        run.escalations.append("line")
        line_certificate, line_run = LineEmbeddingService.run_line(g, factor=factor, seed=seed, initial=m)
        run.line = line_run.summary()
        if line_certificate.kind is not CertificateKind.HIGH_CORANK_MATRIX:
            raise DegeneracyError("line pipeline embedded a 2-connected graph as a path")
        m, summary = line_certificate.matrix, line_certificate.eigen

    if summary.corank >= PLANE_CERTIFICATE_CORANK:
        run.escalations.append("initial")
        return _certificate(g, m, summary)

    rep = GMatrixService.nullspace_rep(m, summary.tol)
    norms = rep.norms()
    zero = np.flatnonzero(norms <= factor * g.n * max(1.0, float(norms.max())))
    if zero.size:
        run.escalations.append("zero-vector")
        return _zero_vector(g, m, int(zero[0]), factor, run)

    normalized = GMatrixService.normalize_rep(rep)
    points = normalized.points
    check = PlaneEmbeddingService.verify_outerplanar(points, g)
    if check:
        matrix = normalized.source
        certificate = Certificate(
            kind=CertificateKind.OUTERPLANAR_EMBEDDING,
            graph=g,
            matrix=matrix,
            eigen=SpectraService.eigen_summary(matrix, factor=factor),
            dimension=PLANE_DIMENSION,
            claimed_corank=OUTERPLANAR_CLAIMED_CORANK,
            embedding=np.array(points),
        )
        certificate.report["outer_cycle"] = [i + 1 for i in PlaneEmbeddingService.outer_cycle(points)]
        return certificate

    logger.debug(f"Nullspace representation is not outerplanar: {check.claim} {check.witnesses}")
    run.escalations.append(check.claim)
    try:
        return _CellWalk(g, normalized.source, points, factor, run, normalized.tol).run()
    except PreconditionError as e:
        raise DegeneracyError(f"cell walk: {e}") from e


def _zero_vector(g: Graph, m: GMatrix, node: int, factor: float, run: PlaneRun) -> Certificate:
    family = PlaneEmbeddingService.zero_vector_family(m, node)
    reach = max(1.0, m.norm_inf())
    for _ in range(MAX_DOUBLINGS):
        if SpectraService.eigen_summary(family(reach), factor=factor).n_negative >= 2:
            break
        reach *= 2.0
    else:
        raise DegeneracyError(f"no second negative eigenvalue below node {node + 1}")
    jump = SpectraService.corank_jump(lambda s: family(s * reach), 2, factor=factor)
    if jump is None:
        raise NoJumpError(f"zero vector at node {node + 1}")
    run.bracket_widths.append(jump.bracket_width)
    return _certificate(g, jump.matrix, jump.eigen)


@dataclass
class _CellState:
    cell: Cell
    point: np.ndarray
    h: Circulation
    g_map: EdgeMap
    matrix: GMatrix


class _CellWalk:
    """
    Breadth-first walk of the origin over the 2-cells of the arrangement.

    Every state holds a good matrix M(u - p, h, g) for p in its cell. In
    each cell the walk tries the crossing vertices and the coincident
    points of the cell's closure; then it moves to the neighboring cells
    through their common 1-cells.
    """

    def __init__(self, g: Graph, m: GMatrix, points: np.ndarray, factor: float, trace: PlaneRun, tol: float):
        self.g = g
        self.m = m
        self.original = np.asarray(points, dtype=float)
        self.factor = factor
        self.trace = trace
        self.tol = tol
        self.points, self.classes = CellComplexService.merge_coincident(points, factor)
        self.rep = PlaneRep(points=self.points)
        self.cplx: CellComplex = CellComplexService.build_complex(
            self.rep, g, allow_coincident=True, factor=factor)
        separating = CellComplexService.separating_segments(self.rep, g, self.cplx)
        self.separating = {cell.index for cell in separating}
        self.node_tol = factor * g.n * max(1.0, float(np.abs(self.points).max()))
        self._components: dict[int, int] = {}

    # -- bookkeeping -----------------------------------------------------

    def _fail(self, reason: str) -> None:
        self.trace.failures += 1
        logger.debug(f"Escalation failed ({self.trace.failures}): {reason}")
        if self.trace.failures > settings.ESCALATION_BUDGET:
            raise EscalationBudgetError(f"{self.trace.failures} failed escalations; last: {reason}")

    def _jump(self, family: MatrixFamily, label: str) -> tuple[Optional[CorankJump], Optional[GMatrix]]:
        """Corank jump on a family starting at a good corank-2 matrix, and its end matrix."""
        try:
            jump = SpectraService.corank_jump(family, 2, factor=self.factor)
            end = None if jump is not None else family(1.0)
        except (EvaluatorError, PreconditionError) as e:
            self._fail(f"{label}: {e}")
            return None, None
        if jump is not None:
            self.trace.bracket_widths.append(jump.bracket_width)
        return jump, end

    def _certify(self, jump: CorankJump, label: str) -> Optional[Certificate]:
        try:
            certificate = _certificate(self.g, jump.matrix, jump.eigen)
        except DegeneracyError as e:
            self._fail(f"{label}: {e}")
            return None
        self.trace.escalations.append(label)
        return certificate

    # -- start -----------------------------------------------------------

    def _start(self) -> tuple[Cell, Circulation, EdgeMap]:
        origin = np.zeros(2)
        cell = CellComplexService.locate(self.cplx, origin, self.factor)
        if cell is None or cell.dim == CellDimension.VERTEX:
            raise DegeneracyError("origin does not lie in a 2-cell or 1-cell of the arrangement")
        try:
            h, g_map = CirculationService.decompose(
                PlaneRep(points=self.original), self.g, cell.signature, self.m, tol=self.tol)
        except ResidualError as e:
            raise DegeneracyError(f"starting matrix: {e}") from e
        h = CirculationService.project(h, self.g.n)
        if not h.is_positive() or any(value >= 0 for value in g_map.values()):
            raise DegeneracyError("starting matrix does not split into a positive circulation")
        return cell, h, g_map

    def run(self) -> Certificate:
        cell, h, g_map = self._start()
        origin = np.zeros(2)
        queue: deque[_CellState] = deque()
        visited: set[int] = set()

        if cell.dim == CellDimension.FACE:
            matrix = CirculationService.assemble(self.rep, self.g, cell.signature, h, g_map)
            summary = SpectraService.eigen_summary(matrix, factor=self.factor)
            if summary.n_negative != 1:
                raise DegeneracyError(f"snapped start matrix has {summary.n_negative} negative eigenvalues")
            if summary.corank >= PLANE_CERTIFICATE_CORANK:
                return _certificate(self.g, matrix, summary)
            queue.append(_CellState(cell, origin, h, g_map, matrix))
            visited.add(cell.index)
        else:
            for index in sorted(self.cplx.incident(cell.index)):
                target = self.cplx.cells[index]
                if target.dim != CellDimension.FACE:
                    continue
                outcome = self._enter(target, [], origin, cell.signature, h, g_map)
                if isinstance(outcome, Certificate):
                    return outcome
                if outcome is not None:
                    queue.append(outcome)
                    visited.add(target.index)

        while queue:
            state = queue.popleft()
            self.trace.cells_visited += 1
            certificate = self._targets(state)
            if certificate is not None:
                return certificate
            for boundary in self._boundaries(state.cell):
                for index in sorted(self.cplx.incident(boundary.index)):
                    target = self.cplx.cells[index]
                    if target.dim != CellDimension.FACE or target.index in visited:
                        continue
                    outcome = self._cross(state, boundary, target)
                    if isinstance(outcome, Certificate):
                        return outcome
                    if outcome is not None:
                        queue.append(outcome)
                        visited.add(target.index)

        raise DegeneracyError(f"cell walk visited {self.trace.cells_visited} cells without a corank jump")

    # -- targets inside a cell ------------------------------------------

    def _is_node_point(self, point: np.ndarray) -> bool:
        return bool(np.any(np.linalg.norm(self.points - point, axis=1) <= self.node_tol))

    def _crossing_count(self, vertex: Cell) -> int:
        if vertex.index not in self._components:
            self._components[vertex.index] = CirculationService.nondegenerate_components(
                self.rep.at(vertex.point), self.g, vertex.signature, self.factor)
        return self._components[vertex.index]

    def _targets(self, state: _CellState) -> Optional[Certificate]:
        for vertex in self.cplx.vertices:
            if not self.cplx.in_closure(vertex.index, state.cell.index) or self._is_node_point(vertex.point):
                continue
            if self._crossing_count(vertex) < 2:
                continue
            try:
                _, evaluate = CellComplexService.shift_limit(
                    self.rep.at(state.point), self.g, self.cplx, state.cell, vertex.point, state.matrix)
            except PreconditionError as e:
                self._fail(f"crossing vertex {vertex.index}: {e}")
                continue
            jump, end = self._jump(lambda s: evaluate(1.0 - s), "crossing")
            if jump is None:
                if end is not None:
                    self._fail(f"no jump towards crossing vertex {vertex.index}")
                continue
            certificate = self._certify(jump, "crossing")
            if certificate is not None:
                return certificate

        for members in self.classes:
            certificate = self._coincident(state, members)
            if certificate is not None:
                return certificate
        return None

    def _coincident(self, state: _CellState, members: list[int]) -> Optional[Certificate]:
        v = self.points[members[0]]
        signs = CellComplexService.signs_at(self.cplx, v, self.factor)
        if not all(x == 0 or x == y for x, y in zip(signs, state.cell.signs)):
            return None
        others = [i for i in range(self.g.n) if i not in members]
        if not others:
            return None

        epsilon = 0.5
        for _ in range(MAX_HALVINGS):
            p = v + epsilon * (state.point - v)
            if GMatrixService.origin_interior_margin((self.points[others] - p).T) < 0:
                break
            epsilon *= 0.5
        else:
            self._fail(f"no origin outside the hull of the nodes apart from {[i + 1 for i in members]}")
            return None

        split = state.cell.signature

        def approach(s: float) -> GMatrix:
            return CellComplexService.path_matrix(
                self.points, self.g, state.point, p, 1.0 - s, split, frozenset(), state.h, state.g_map, state.h)

        merge = PlaneEmbeddingService.coincident_family(approach(1.0), members)
        jump, end = self._jump(_chain([approach, merge]), "coincident")
        if jump is None:
            if end is not None:
                self._fail(f"no jump at the coincident nodes {[i + 1 for i in members]}")
            return None
        return self._certify(jump, "coincident")

    # -- moving between cells -------------------------------------------

    def _boundaries(self, cell: Cell) -> list[Cell]:
        segments = [self.cplx.cells[k] for k in self.cplx.incident(cell.index)
                    if self.cplx.cells[k].dim == CellDimension.EDGE]
        return sorted(segments, key=lambda c: (c.index not in self.separating, c.index))

    def _boundary_flow(self, state: _CellState, split: EdgeSplit, held: frozenset) -> Optional[Circulation]:
        """A positive circulation on the arcs of a boundary cell, rerouting h where possible."""
        f: Optional[Circulation] = state.h
        for i, j in sorted(held):
            arc = state.cell.signature.arc_of(i, j)
            f = CirculationService.reroute(EdgeSplit(arcs=f.arcs, degenerate=()), f, arc)
            if f is None:
                break
        if f is not None and f.is_positive() and set(f.arcs) == set(split.arcs):
            flows = f.as_dict()
            return Circulation(arcs=split.arcs, values=np.array([flows[a] for a in split.arcs]))
        return CirculationService.positive_circulation(split)

    def _cross(self, state: _CellState, boundary: Cell, target: Cell):
        split = boundary.signature
        held = CellComplexService.held_edges(state.cell.signature, split)
        f = self._boundary_flow(state, split, held)
        if f is None:
            logger.debug(f"Boundary cell {boundary.index} carries no positive circulation")
            return None
        g_boundary = CellComplexService.limit_values(self.points, state.point, held, state.h, state.g_map)

        def descend(s: float) -> GMatrix:
            return CellComplexService.path_matrix(
                self.points, self.g, state.point, boundary.point, 1.0 - s,
                state.cell.signature, held, state.h, state.g_map, f)

        return self._enter(target, [descend], boundary.point, split, f, g_boundary)

    def _enter(
        self,
        target: Cell,
        pieces: list[MatrixFamily],
        boundary_point: np.ndarray,
        split: EdgeSplit,
        f: Circulation,
        g_boundary: EdgeMap,
    ):
        """
        Continue a family from M(u - r, f, g) at a boundary point r into
        the 2-cell `target`, ending at its interior point.

        Returns a certificate when the family gains a kernel dimension, the
        new state when it arrives with one negative eigenvalue, and None
        when the move is blocked or failed.
        """
        h = CirculationService.positive_circulation(target.signature)
        if h is None:
            logger.debug(f"Cell {target.index} carries no positive circulation")
            return None
        self.trace.transitions += 1
        held = CellComplexService.held_edges(target.signature, split)
        g_target = {edge: g_boundary[edge] for edge in target.signature.degenerate}
        g_far = CellComplexService.limit_values(self.points, target.point, held, h, g_target)
        at_boundary = self.rep.at(boundary_point)

        def mix(beta: float) -> GMatrix:
            values = {edge: (1.0 - beta) * g_boundary[edge] + beta * g_far[edge] for edge in split.degenerate}
            return CirculationService.assemble(at_boundary, self.g, split, f, values)

        def ascend(alpha: float) -> GMatrix:
            return CellComplexService.path_matrix(
                self.points, self.g, target.point, boundary_point, alpha,
                target.signature, held, h, g_target, f)

        jump, end = self._jump(_chain(pieces + [mix, ascend]), "transition")
        if jump is not None:
            return self._certify(jump, "transition")
        if end is None:
            return None
        summary = SpectraService.eigen_summary(end, factor=self.factor)
        if summary.n_negative != 1:
            self._fail(f"cell {target.index} reached with {summary.n_negative} negative eigenvalues")
            return None
        return _CellState(target, np.array(target.point), h, g_target, end)
