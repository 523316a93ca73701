from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterator, Optional

import networkx as nx

from src.core.logger import get_logger
from src.core.preconditions import require_oracle_size
from src.models.graph import Graph

logger = get_logger(__name__)

ATLAS_MAX_NODES = 7

_K4 = nx.complete_graph(4)
_K23 = nx.complete_bipartite_graph(2, 3)

# WL hash -> [(graph, contains_target)]
_MINOR_MEMO: dict[str, list[tuple[nx.Graph, bool]]] = {}


def _reduce(graph: nx.Graph) -> nx.Graph:
    """
    Shrink a graph without changing whether it has a K4 or K2,3 minor.

    Only nodes of degree <= 1 are deleted: both targets have minimum
    degree 2. Degree-2 nodes must stay, since the three degree-2 nodes
    of K2,3 are branch nodes of the minor.
    """
    graph = nx.Graph(graph)
    leaves = [node for node, degree in graph.degree() if degree <= 1]
    while leaves:
        node = leaves.pop()
        if node not in graph:
            continue
        neighbors = list(graph.neighbors(node))
        graph.remove_node(node)
        leaves.extend(v for v in neighbors if graph.degree(v) <= 1)
    return graph


def _lookup(graph: nx.Graph) -> Optional[bool]:
    key = nx.weisfeiler_lehman_graph_hash(graph)
    for known, verdict in _MINOR_MEMO.get(key, []):
        if nx.is_isomorphic(known, graph):
            return verdict
    return None


def _remember(graph: nx.Graph, verdict: bool) -> bool:
    key = nx.weisfeiler_lehman_graph_hash(graph)
    _MINOR_MEMO.setdefault(key, []).append((nx.Graph(graph), verdict))
    return verdict


def _has_forbidden_minor(graph: nx.Graph) -> bool:
    graph = _reduce(graph)
    n, m = graph.number_of_nodes(), graph.number_of_edges()
    if n < 4 or m < 6:
        return False
    if not nx.is_biconnected(graph):
        return any(
            _has_forbidden_minor(graph.subgraph(block).copy())
            for block in nx.biconnected_components(graph)
            if len(block) >= 4
        )
    if m == n:
        return False
    if m > 2 * n - 3:
        # Euler bound for outerplanar graphs
        return True
    if nx.is_isomorphic(graph, _K4) or nx.is_isomorphic(graph, _K23):
        return True

    known = _lookup(graph)
    if known is not None:
        return known

    for a, b in list(graph.edges()):
        deleted = nx.Graph(graph)
        deleted.remove_edge(a, b)
        if _has_forbidden_minor(deleted):
            return _remember(graph, True)
        contracted = nx.contracted_nodes(graph, a, b, self_loops=False)
        if _has_forbidden_minor(nx.Graph(contracted)):
            return _remember(graph, True)
    return _remember(graph, False)


@lru_cache(maxsize=None)
def _connected_graphs(n: int) -> tuple[nx.Graph, ...]:
    """All connected graphs on n nodes up to isomorphism."""
    if n <= ATLAS_MAX_NODES:
        return tuple(
            g for g in nx.graph_atlas_g()
            if g.number_of_nodes() == n and (n == 0 or nx.is_connected(g))
        )

    buckets: dict[str, list[nx.Graph]] = {}
    found: list[nx.Graph] = []
    for base in _connected_graphs(n - 1):
        for size in range(1, n):
            for neighbors in combinations(range(n - 1), size):
                candidate = nx.Graph(base)
                candidate.add_node(n - 1)
                candidate.add_edges_from((n - 1, v) for v in neighbors)
                key = nx.weisfeiler_lehman_graph_hash(candidate)
                bucket = buckets.setdefault(key, [])
                if any(nx.is_isomorphic(candidate, other) for other in bucket):
                    continue
                bucket.append(candidate)
                found.append(candidate)
    logger.info(f"Enumerated {len(found)} connected graphs on {n} nodes")
    return tuple(found)


class GraphService:

    @staticmethod
    def is_connected(g: Graph) -> bool:
        """True iff g has exactly one connected component."""
        return nx.is_connected(g.to_networkx())

    @staticmethod
    def is_biconnected(g: Graph) -> bool:
        """True iff g is connected, has at least 3 nodes and has no cut node."""
        return g.n >= 3 and nx.is_biconnected(g.to_networkx())

    @staticmethod
    def path_order(g: Graph) -> Optional[list[int]]:
        """
        Node order of g when g is a simple path.

        Args:
            g: a connected graph

        Returns:
            Optional[list[int]]: the 0-based nodes along the path, starting at
                the smaller endpoint; None when g is not a path

        Note:
            - n = 1 gives [0]; n = 2 with its single edge gives [0, 1]
        """
        if g.n == 1:
            return [0]
        if g.m != g.n - 1:
            return None
        degrees = [g.degree(i) for i in range(g.n)]
        if any(d == 0 or d > 2 for d in degrees):
            return None
        ends = [i for i, d in enumerate(degrees) if d == 1]
        if len(ends) != 2:
            return None

        order = [ends[0]]
        previous = None
        while len(order) < g.n:
            current = order[-1]
            following = [j for j in g.neighbors(current) if j != previous]
            if len(following) != 1:
                return None
            previous = current
            order.append(following[0])
        return order if order[-1] == ends[1] else None

    @staticmethod
    def outerplanar_oracle(g: Graph, cap: Optional[int] = None) -> bool:
        """
        Decide outerplanarity by searching for a K4 or K2,3 minor.

        The search deletes and contracts edges exhaustively, after safe
        reductions (leaf deletion, splitting into blocks, the bound
        |E| <= 2n - 3). Visited graphs are memoized
        by Weisfeiler-Lehman hash and isomorphism.

        Args:
            g: any graph
            cap: size cap, settings.ORACLE_SIZE_CAP by default

        Returns:
            bool: True iff g has neither a K4 nor a K2,3 minor

        Raises:
            OracleSizeError: If g.n exceeds the cap
        """
        require_oracle_size(g, cap)
        return not _has_forbidden_minor(g.to_networkx())

    @staticmethod
    def enumerate_graphs(
        n_max: int,
        predicate: Optional[Callable[[Graph], bool]] = None,
        n_min: int = 1,
    ) -> Iterator[Graph]:
        """
        Yield all connected graphs with n_min <= n <= n_max nodes, up to
        isomorphism, that satisfy `predicate`.

        Graphs with at most 7 nodes come from the networkx graph atlas; larger
        ones by adding a node to every connected graph one size smaller and
        discarding isomorphic duplicates.
        """
        for n in range(max(1, n_min), n_max + 1):
            for nx_graph in _connected_graphs(n):
                graph = Graph.from_networkx(nx_graph)
                if predicate is None or predicate(graph):
                    yield graph

    # ------------------------------------------------------------------
    # Graph zoo
    # ------------------------------------------------------------------

    @staticmethod
    def path(n: int) -> Graph:
        return Graph.from_networkx(nx.path_graph(n))

    @staticmethod
    def cycle(n: int) -> Graph:
        return Graph.from_networkx(nx.cycle_graph(n))

    @staticmethod
    def complete(n: int) -> Graph:
        return Graph.from_networkx(nx.complete_graph(n))

    @staticmethod
    def star(leaves: int) -> Graph:
        """K1,leaves with the center as node 0."""
        return Graph.from_networkx(nx.star_graph(leaves))

    @staticmethod
    def complete_bipartite(a: int, b: int) -> Graph:
        return Graph.from_networkx(nx.complete_bipartite_graph(a, b))

    @staticmethod
    def wheel(n: int) -> Graph:
        """Hub 0 joined to a cycle on nodes 1..n-1."""
        return Graph.from_networkx(nx.wheel_graph(n))

    @staticmethod
    def fan(n: int) -> Graph:
        """Hub 0 joined to a path on nodes 1..n-1: a triangulated polygon."""
        graph = nx.path_graph(range(1, n))
        graph.add_edges_from((0, v) for v in range(1, n))
        return Graph.from_networkx(graph)
