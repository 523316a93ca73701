from typing import Optional

import networkx as nx
import numpy as np

from src.core.config import settings
from src.core.constants import FLOW_CONSERVATION_TOLERANCE
from src.core.errors import FlowConservationError, ResidualError
from src.core.logger import get_logger
from src.core.preconditions import require_nonzero_vectors
from src.models.graph import Graph
from src.models.matrices import GMatrix
from src.models.plane import AreaMatrix, Circulation, EdgeSplit
from src.models.representation import PlaneRep
from src.services.gmatrix import GMatrixService

logger = get_logger(__name__)

EdgeMap = dict[tuple[int, int], float]


def _digraph(arcs) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_edges_from(arcs)
    return graph


def _require_conservation(f: Circulation, n: int) -> None:
    scale = float(np.abs(f.values).max(initial=0.0))
    imbalance = float(np.abs(f.imbalance(n)).max(initial=0.0))
    if imbalance > FLOW_CONSERVATION_TOLERANCE * max(1.0, scale):
        raise FlowConservationError(f"max imbalance {imbalance:.3g}")


class CirculationService:

    @staticmethod
    def area_matrix(rep: PlaneRep) -> AreaMatrix:
        """T_ij = det(u_i - p, u_j - p), exactly skew-symmetric."""
        shifted = rep.shifted
        x, y = shifted[:, 0], shifted[:, 1]
        return AreaMatrix(t=np.outer(x, y) - np.outer(y, x))

    @staticmethod
    def split_edges(rep: PlaneRep, g: Graph, factor: Optional[float] = None) -> EdgeSplit:
        """
        Orient every edge counterclockwise as seen from the origin, or mark
        it degenerate when |T_ij| <= tol * ||u_i - p|| * ||u_j - p||.

        Raises:
            ZeroVectorError: If some shifted vector is zero
        """
        factor = settings.EIGEN_TOLERANCE if factor is None else factor
        shifted = rep.shifted
        require_nonzero_vectors(shifted)
        t = CirculationService.area_matrix(rep).t
        norms = np.linalg.norm(shifted, axis=1)

        arcs: list[tuple[int, int]] = []
        degenerate: list[tuple[int, int]] = []
        for i, j in g.edges:
            if abs(t[i, j]) <= factor * g.n * norms[i] * norms[j]:
                degenerate.append((i, j))
            elif t[i, j] > 0:
                arcs.append((i, j))
            else:
                arcs.append((j, i))
        return EdgeSplit(arcs=tuple(arcs), degenerate=tuple(degenerate))

    @staticmethod
    def positive_circulation(split: EdgeSplit) -> Optional[Circulation]:
        """
        A circulation that is positive on every arc, or None.

        One exists iff every arc lies inside a strongly connected component
        of the oriented graph. The result is a sum of directed cycles, one
        through each arc not yet covered, so its values are positive
        integers.
        """
        if not split.arcs:
            return Circulation(arcs=(), values=np.zeros(0))
        digraph = _digraph(split.arcs)
        component = {}
        for k, nodes in enumerate(nx.strongly_connected_components(digraph)):
            for node in nodes:
                component[node] = k
        if any(component[x] != component[y] for x, y in split.arcs):
            return None

        position = {arc: k for k, arc in enumerate(split.arcs)}
        values = np.zeros(len(split.arcs))
        for k, (x, y) in enumerate(split.arcs):
            if values[k] > 0:
                continue
            back = nx.shortest_path(digraph, y, x)
            values[k] += 1.0
            for a, b in zip(back[:-1], back[1:]):
                values[position[(a, b)]] += 1.0
        return Circulation(arcs=split.arcs, values=values)

    @staticmethod
    def reroute(split: EdgeSplit, f: Circulation, arc: tuple[int, int]) -> Optional[Circulation]:
        """
        Remove `arc` = (x, y) and push its flow along a shortest directed
        path from x to y among the remaining arcs.

        Returns:
            Optional[Circulation]: a circulation on the arcs of `split` other
                than `arc`, positive where f is positive; None when y cannot
                be reached from x
        """
        remaining = tuple(a for a in split.arcs if a != arc)
        digraph = _digraph(remaining)
        x, y = arc
        if x not in digraph or y not in digraph or not nx.has_path(digraph, x, y):
            return None
        path = nx.shortest_path(digraph, x, y)
        flows = f.as_dict()
        amount = flows.get(arc, 0.0)
        values = {a: flows.get(a, 0.0) for a in remaining}
        for a, b in zip(path[:-1], path[1:]):
            values[(a, b)] += amount
        return Circulation(arcs=remaining, values=np.array([values[a] for a in remaining]))

    @staticmethod
    def project(f: Circulation, n: int) -> Circulation:
        """Orthogonal projection of an arc function onto the circulations."""
        if not f.arcs:
            return f
        incidence = np.zeros((n, len(f.arcs)))
        for k, (i, j) in enumerate(f.arcs):
            incidence[i, k] = 1.0
            incidence[j, k] = -1.0
        values = f.values - np.linalg.pinv(incidence) @ (incidence @ f.values)
        return Circulation(arcs=f.arcs, values=values)

    @staticmethod
    def assemble(rep: PlaneRep, g: Graph, split: EdgeSplit, f: Circulation, g_map: EdgeMap) -> GMatrix:
        """
        M(u - p, f, g): -f_ij / T_ij on arcs, g on degenerate edges, and the
        diagonal completing U M = 0 for the shifted vectors.

        Raises:
            FlowConservationError: If f is not a circulation
            ZeroVectorError: If some shifted vector is zero
        """
        _require_conservation(f, g.n)
        t = CirculationService.area_matrix(rep).t
        flows = f.as_dict()
        offdiag = np.zeros(g.m)
        for i, j in split.arcs:
            offdiag[g.edge_index[(min(i, j), max(i, j))]] = -flows.get((i, j), 0.0) / t[i, j]
        for edge in split.degenerate:
            offdiag[g.edge_index[edge]] = g_map[edge]
        return GMatrixService.complete_diagonal(g, offdiag, rep.shifted.T)

    @staticmethod
    def decompose(
        rep: PlaneRep,
        g: Graph,
        split: EdgeSplit,
        m: GMatrix,
        tol: Optional[float] = None,
    ) -> tuple[Circulation, EdgeMap]:
        """
        Inverse of assemble: f_ij = -T_ij M_ij on arcs, g = M on degenerate edges.

        Args:
            tol: absolute bound on max |(U M)_kj|; pass the tolerance the
                kernel of m was read at. Defaults to
                EIGEN_TOLERANCE * n * max(1, ||M||) * max |u_i - p|.

        Raises:
            ResidualError: If M does not annihilate the shifted vectors
        """
        shifted = rep.shifted
        residual = GMatrixService.residual(m, shifted.T)
        if tol is None:
            scale = max(1.0, float(np.abs(shifted).max(initial=0.0)))
            threshold = settings.EIGEN_TOLERANCE * g.n * max(1.0, m.norm_inf()) * scale
        else:
            threshold = tol
        if residual > threshold:
            raise ResidualError(f"||U M|| = {residual:.3g} > {threshold:.3g}")

        t = CirculationService.area_matrix(rep).t
        values = np.array([-t[i, j] * m.entry(i, j) for i, j in split.arcs])
        g_map = {edge: m.entry(*edge) for edge in split.degenerate}
        return Circulation(arcs=split.arcs, values=values), g_map

    @staticmethod
    def nondegenerate_components(rep: PlaneRep, g: Graph, split: EdgeSplit, factor: Optional[float] = None) -> int:
        """
        Number of components of (V, E_u) whose shifted points are not
        contained in one closed semiline from the origin.

        Components without edges never count.
        """
        factor = settings.EIGEN_TOLERANCE if factor is None else factor
        if not split.degenerate:
            return 0
        shifted = rep.shifted
        graph = nx.Graph()
        graph.add_edges_from(split.degenerate)
        count = 0
        for nodes in nx.connected_components(graph):
            points = shifted[sorted(nodes)]
            norms = np.linalg.norm(points, axis=1)
            anchor = points[int(np.argmax(norms))]
            length = float(np.linalg.norm(anchor))
            if length == 0.0:
                continue
            projections = points @ (anchor / length)
            threshold = factor * g.n * length
            if projections.min() < -threshold and projections.max() > threshold:
                count += 1
        return count
