from fractions import Fraction
from itertools import combinations
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linprog

from src.core.config import settings
from src.core.constants import SIGN_GRID
from src.core.errors import ClosureError, CoincidentPointsError
from src.core.logger import get_logger
from src.models.graph import Graph
from src.models.matrices import GMatrix
from src.models.plane import ArrangementLine, Cell, CellComplex, CellDimension, Circulation, EdgeSplit
from src.models.representation import PlaneRep
from src.services.circulation import CirculationService, EdgeMap
from src.services.gmatrix import GMatrixService

logger = get_logger(__name__)

Signs = tuple[int, ...]


def _tolerance(points: np.ndarray, factor: Optional[float]) -> float:
    factor = settings.EIGEN_TOLERANCE if factor is None else factor
    scale = max(1.0, float(np.abs(points).max(initial=0.0)))
    return factor * len(points) * scale


def _grid(value: float) -> Fraction:
    return Fraction(round(value * SIGN_GRID), SIGN_GRID)


def _exact_side(a: np.ndarray, b: np.ndarray, p: np.ndarray) -> int:
    """Sign of det(b - a, p - a) on grid-snapped rationals."""
    ax, ay = _grid(a[0]), _grid(a[1])
    bx, by = _grid(b[0]), _grid(b[1])
    px, py = _grid(p[0]), _grid(p[1])
    value = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    return (value > 0) - (value < 0)


def _direction(line: ArrangementLine) -> np.ndarray:
    return np.array([line.normal[1], -line.normal[0]])


def _chebyshev_center(lines: tuple[ArrangementLine, ...], signs: Signs, bound: float) -> Optional[np.ndarray]:
    """Center of the largest disc inside the cell clipped to a box."""
    rows, rhs = [], []
    for line, sign in zip(lines, signs):
        # sign * (n . x - c) >= rho
        rows.append([-sign * line.normal[0], -sign * line.normal[1], 1.0])
        rhs.append(-sign * line.offset)
    for axis in range(2):
        for direction in (1.0, -1.0):
            row = [0.0, 0.0, 1.0]
            row[axis] = direction
            rows.append(row)
            rhs.append(bound)
    result = linprog(
        np.array([0.0, 0.0, -1.0]),
        A_ub=np.array(rows),
        b_ub=np.array(rhs),
        bounds=[(None, None), (None, None), (0.0, None)],
        method="highs",
    )
    if result.status != 0 or result.x[2] <= 0:
        return None
    return np.array(result.x[:2])


class CellComplexService:

    @staticmethod
    def merge_coincident(points: np.ndarray, factor: Optional[float] = None) -> tuple[np.ndarray, list[list[int]]]:
        """
        Replace points closer than the tolerance by their mean.

        Returns:
            tuple[np.ndarray, list[list[int]]]: the merged points and the
                classes of at least two nodes sharing a point
        """
        points = np.array(points, dtype=float)
        tol = _tolerance(points, factor)
        classes: list[list[int]] = []
        assigned = [False] * len(points)
        for i in range(len(points)):
            if assigned[i]:
                continue
            members = [j for j in range(i, len(points))
                       if not assigned[j] and np.linalg.norm(points[j] - points[i]) <= tol]
            for j in members:
                assigned[j] = True
            if len(members) > 1:
                points[members] = points[members].mean(axis=0)
                classes.append(members)
        return points, classes

    @staticmethod
    def build_complex(
        rep: PlaneRep,
        g: Graph,
        allow_coincident: bool = False,
        factor: Optional[float] = None,
    ) -> CellComplex:
        """
        Arrangement of the lines through u_i and u_j for edges ij with
        distinct points.

        0-cells are the pairwise line intersections and the node points,
        1-cells the segments and rays between consecutive 0-cells on a line,
        2-cells are found by stepping off every 1-cell to both sides and are
        identified by their sign vectors. Every cell carries an interior
        point and its signature (A_c, E_c).

        Args:
            rep: the points; the origin of rep is ignored
            g: the graph whose edges define the lines
            allow_coincident: accept edges whose endpoints share a point;
                such edges are degenerate in every cell

        Raises:
            CoincidentPointsError: If adjacent nodes share a point and
                allow_coincident is False
        """
        points = np.asarray(rep.points, dtype=float)
        tol = _tolerance(points, factor)

        coincident = tuple(e for e in g.edges if np.linalg.norm(points[e[0]] - points[e[1]]) <= tol)
        if coincident and not allow_coincident:
            raise CoincidentPointsError(f"edges {[(i + 1, j + 1) for i, j in coincident]}")

        grouped: list[dict] = []
        for i, j in g.edges:
            if (i, j) in coincident:
                continue
            for entry in grouped:
                if abs(entry["normal"] @ points[i] - entry["offset"]) <= tol and \
                        abs(entry["normal"] @ points[j] - entry["offset"]) <= tol:
                    entry["edges"].append((i, j))
                    break
            else:
                step = points[j] - points[i]
                normal = np.array([-step[1], step[0]]) / np.linalg.norm(step)
                grouped.append({"anchor": (i, j), "normal": normal,
                                "offset": float(normal @ points[i]), "edges": [(i, j)]})

        lines = []
        for entry in grouped:
            a, b = entry["anchor"]
            along = points[b] - points[a]
            orientation = tuple(1 if (points[j] - points[i]) @ along > 0 else -1 for i, j in entry["edges"])
            lines.append(ArrangementLine(
                normal=entry["normal"],
                offset=entry["offset"],
                anchor=entry["anchor"],
                edges=tuple(entry["edges"]),
                orientation=orientation,
            ))
        lines = tuple(lines)

        def side(k: int, point: np.ndarray) -> int:
            a, b = lines[k].anchor
            return _exact_side(points[a], points[b], point)

        def signs_of(point: np.ndarray, zero: frozenset[int] = frozenset()) -> Signs:
            return tuple(0 if k in zero or abs(lines[k].distance(point)) <= tol else side(k, point)
                         for k in range(len(lines)))

        # 0-cells
        candidates = [points[i] for i in range(g.n)]
        for k1, k2 in combinations(range(len(lines)), 2):
            normals = np.array([lines[k1].normal, lines[k2].normal])
            if abs(np.linalg.det(normals)) <= tol:
                continue
            candidates.append(np.linalg.solve(normals, np.array([lines[k1].offset, lines[k2].offset])))
        vertices: list[np.ndarray] = []
        for candidate in candidates:
            if all(np.linalg.norm(candidate - v) > tol for v in vertices):
                vertices.append(np.asarray(candidate, dtype=float))
        vertex_signs = [signs_of(v) for v in vertices]

        # 1-cells
        segments: list[tuple[np.ndarray, Signs, int, list[int]]] = []
        for k, line in enumerate(lines):
            direction = _direction(line)
            on_line = sorted((float(direction @ vertices[v]), v) for v in range(len(vertices))
                             if vertex_signs[v][k] == 0)
            if not on_line:
                continue
            span = on_line[-1][0] - on_line[0][0]
            first, last = on_line[0], on_line[-1]
            pieces = [(vertices[first[1]] - direction * (1.0 + span), [first[1]])]
            for (t1, v1), (t2, v2) in zip(on_line[:-1], on_line[1:]):
                if t2 - t1 > tol:
                    pieces.append((0.5 * (vertices[v1] + vertices[v2]), [v1, v2]))
            pieces.append((vertices[last[1]] + direction * (1.0 + span), [last[1]]))
            for point, ends in pieces:
                segments.append((point, signs_of(point, frozenset({k})), k, ends))

        # 2-cells
        face_of: dict[Signs, int] = {}
        face_points: list[np.ndarray] = []
        segment_faces: list[set[int]] = []
        for point, _, k, _ in segments:
            others = [abs(lines[j].distance(point)) for j in range(len(lines)) if j != k]
            epsilon = max(0.5 * min(others), tol) if others else 1.0
            touching = set()
            for direction in (1.0, -1.0):
                sample = point + direction * epsilon * lines[k].normal
                signs = tuple(side(j, sample) for j in range(len(lines)))
                if 0 in signs:
                    logger.debug(f"Side sample of a 1-cell on line {k} landed on a line")
                    continue
                if signs not in face_of:
                    face_of[signs] = len(face_points)
                    face_points.append(sample)
                touching.add(face_of[signs])
            segment_faces.append(touching)
        if not lines:
            face_of[()] = 0
            face_points.append(np.zeros(2))

        bound = 2.0 + 2.0 * max((float(np.abs(v).max()) for v in vertices), default=0.0)
        n_vertices, n_segments = len(vertices), len(segments)
        cells: list[Cell] = []
        for v, point in enumerate(vertices):
            signs = vertex_signs[v]
            cells.append(Cell(index=v, dim=CellDimension.VERTEX, signs=signs, point=point,
                              signature=CellComplexService.signature_of(lines, coincident, g, signs)))
        for s, (point, signs, _, _) in enumerate(segments):
            cells.append(Cell(index=n_vertices + s, dim=CellDimension.EDGE, signs=signs, point=point,
                              signature=CellComplexService.signature_of(lines, coincident, g, signs)))
        for signs, f in sorted(face_of.items(), key=lambda item: item[1]):
            center = _chebyshev_center(lines, signs, bound) if lines else None
            point = center if center is not None else face_points[f]
            cells.append(Cell(index=n_vertices + n_segments + f, dim=CellDimension.FACE, signs=signs,
                              point=point, signature=CellComplexService.signature_of(lines, coincident, g, signs)))

        incidence: dict[int, set[int]] = {cell.index: set() for cell in cells}

        def link(a: int, b: int) -> None:
            incidence[a].add(b)
            incidence[b].add(a)

        for s, (_, _, _, ends) in enumerate(segments):
            for v in ends:
                link(n_vertices + s, v)
            for f in segment_faces[s]:
                link(n_vertices + s, n_vertices + n_segments + f)
                for v in ends:
                    link(v, n_vertices + n_segments + f)

        complex_ = CellComplex(
            points=points,
            coincident=coincident,
            lines=lines,
            cells=tuple(cells),
            incidence={k: frozenset(v) for k, v in incidence.items()},
        )
        logger.debug(
            f"Arrangement with {len(lines)} lines: {n_vertices} vertices, "
            f"{n_segments} edges, {len(face_of)} faces"
        )
        return complex_

    @staticmethod
    def signature_of(
        lines: tuple[ArrangementLine, ...],
        coincident: tuple[tuple[int, int], ...],
        g: Graph,
        signs: Signs,
    ) -> EdgeSplit:
        """(A_c, E_c) read off a sign vector."""
        side_of_edge: dict[tuple[int, int], int] = {}
        for k, line in enumerate(lines):
            for edge, orientation in zip(line.edges, line.orientation):
                side_of_edge[edge] = orientation * signs[k]
        arcs, degenerate = [], []
        for i, j in g.edges:
            value = 0 if (i, j) in coincident else side_of_edge[(i, j)]
            if value > 0:
                arcs.append((i, j))
            elif value < 0:
                arcs.append((j, i))
            else:
                degenerate.append((i, j))
        return EdgeSplit(arcs=tuple(arcs), degenerate=tuple(degenerate))

    @staticmethod
    def signs_at(cplx: CellComplex, point: np.ndarray, factor: Optional[float] = None) -> Signs:
        """Side of every line at a point; 0 within the tolerance of a line."""
        point = np.asarray(point, dtype=float)
        tol = _tolerance(cplx.points, factor)
        signs = []
        for line in cplx.lines:
            if abs(line.distance(point)) <= tol:
                signs.append(0)
            else:
                a, b = line.anchor
                signs.append(_exact_side(cplx.points[a], cplx.points[b], point))
        return tuple(signs)

    @staticmethod
    def locate(cplx: CellComplex, point: np.ndarray, factor: Optional[float] = None) -> Optional[Cell]:
        return cplx.locate(CellComplexService.signs_at(cplx, point, factor))

    @staticmethod
    def separating_segments(rep: PlaneRep, g: Graph, cplx: CellComplex) -> list[Cell]:
        """
        1-cells on separating segments.

        The segment u_a u_b of an edge ab is separating when no other node
        lies on its line, the remaining nodes fall on both sides of it, and
        no edge joins the two sides.
        """
        points = cplx.points
        tol = _tolerance(points, None)
        found: dict[int, Cell] = {}
        for k, line in enumerate(cplx.lines):
            direction = _direction(line)
            for a, b in line.edges:
                rest = [v for v in range(g.n) if v not in (a, b)]
                if any(abs(line.distance(points[v])) <= tol for v in rest):
                    continue
                sides = {v: _exact_side(points[line.anchor[0]], points[line.anchor[1]], points[v]) for v in rest}
                x = {v for v in rest if sides[v] > 0}
                y = {v for v in rest if sides[v] < 0}
                if not x or not y:
                    continue
                if any((i in x and j in y) or (i in y and j in x) for i, j in g.edges):
                    continue
                low, high = sorted((float(direction @ points[a]), float(direction @ points[b])))
                for cell in cplx.segments:
                    if cell.signs[k] == 0 and low + tol < float(direction @ cell.point) < high - tol:
                        found[cell.index] = cell
        return [found[k] for k in sorted(found)]

    @staticmethod
    def path_matrix(
        points: np.ndarray,
        g: Graph,
        start: np.ndarray,
        target: np.ndarray,
        alpha: float,
        split: EdgeSplit,
        held: frozenset[tuple[int, int]],
        h: Circulation,
        g_map: EdgeMap,
        target_flow: Optional[Circulation] = None,
    ) -> GMatrix:
        """
        M(u - p_a, a h + (1 - a) f, g') on the segment p_a = (1 - a) q + a p.

        `split` is the signature at the start point p, `held` the arcs of
        it that become degenerate at the target q; their entries stay at
        -h_ij / T(u - p)_ij along the whole segment, which is the value of
        -a h_ij / T(u - p_a)_ij. `target_flow` f lives on the remaining arcs
        and defaults to 0.
        """
        start = np.asarray(start, dtype=float)
        target = np.asarray(target, dtype=float)
        origin = (1.0 - alpha) * target + alpha * start
        shifted = points - origin
        from_start = points - start
        start_flows = h.as_dict()
        end_flows = target_flow.as_dict() if target_flow is not None else {}

        offdiag = np.zeros(g.m)
        for i, j in split.arcs:
            k = g.edge_index[(min(i, j), max(i, j))]
            edge = (min(i, j), max(i, j))
            if edge in held:
                area = from_start[i, 0] * from_start[j, 1] - from_start[i, 1] * from_start[j, 0]
                offdiag[k] = -start_flows[(i, j)] / area
            else:
                area = shifted[i, 0] * shifted[j, 1] - shifted[i, 1] * shifted[j, 0]
                flow = alpha * start_flows[(i, j)] + (1.0 - alpha) * end_flows.get((i, j), 0.0)
                offdiag[k] = -flow / area
        for edge in split.degenerate:
            offdiag[g.edge_index[edge]] = g_map[edge]
        return GMatrixService.complete_diagonal(g, offdiag, shifted.T)

    @staticmethod
    def held_edges(start: EdgeSplit, target: EdgeSplit) -> frozenset[tuple[int, int]]:
        """Edges that are arcs at the start and degenerate at the target."""
        degenerate = set(target.degenerate)
        return frozenset((min(i, j), max(i, j)) for i, j in start.arcs if (min(i, j), max(i, j)) in degenerate)

    @staticmethod
    def limit_values(
        points: np.ndarray,
        start: np.ndarray,
        held: frozenset[tuple[int, int]],
        h: Circulation,
        g_map: EdgeMap,
    ) -> EdgeMap:
        """Values on E_q of the limit M(u - q, f, g): g' plus -h/T(u - p) on held edges."""
        from_start = points - np.asarray(start, dtype=float)
        values = dict(g_map)
        flows = h.as_dict()
        for i, j in held:
            arc = (i, j) if (i, j) in flows else (j, i)
            a, b = arc
            area = from_start[a, 0] * from_start[b, 1] - from_start[a, 1] * from_start[b, 0]
            values[(i, j)] = -flows[arc] / area
        return values

    @staticmethod
    def shift_limit(
        rep: PlaneRep,
        g: Graph,
        cplx: CellComplex,
        cell: Cell,
        q: np.ndarray,
        witness: GMatrix,
    ) -> tuple[GMatrix, Callable[[float], GMatrix]]:
        """
        Move the origin from p = rep.origin in `cell` to a point q of its
        closure, scaling the circulation down on the way.

        With witness = M(u - p, h, g'), the family a -> M(u - p_a, a h, g')
        tends to M(u - q, 0, g) as a -> 0, where g extends g' by the entries
        of the arcs that become degenerate at q.

        Returns:
            tuple: the limit matrix and the evaluator a -> M_a on [0, 1]

        Raises:
            ClosureError: If q is not in the closure of the cell
            ResidualError: If the witness does not annihilate u - p
        """
        q = np.asarray(q, dtype=float)
        q_signs = CellComplexService.signs_at(cplx, q)
        if not all(x == 0 or x == y for x, y in zip(q_signs, cell.signs)):
            raise ClosureError(f"q = ({q[0]:.6g}, {q[1]:.6g}) and cell {cell.index}")
        h, g_map = CirculationService.decompose(rep, g, cell.signature, witness)
        target = CellComplexService.signature_of(cplx.lines, cplx.coincident, g, q_signs)
        held = CellComplexService.held_edges(cell.signature, target)
        points = np.asarray(rep.points, dtype=float)

        def evaluate(alpha: float) -> GMatrix:
            return CellComplexService.path_matrix(
                points, g, rep.origin, q, alpha, cell.signature, held, h, g_map)

        return evaluate(0.0), evaluate
