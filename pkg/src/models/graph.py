from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx

from src.core.errors import DuplicateEdgeError, LoopError, NodeIndexError


@dataclass(frozen=True)
class Graph:
    """
    Simple undirected graph on nodes 0..n-1.

    Edges are stored as sorted pairs (i, j) with i < j, in lexicographic
    order. External documents use 1-based indices; conversion happens in
    the repositories and schemas.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)
    edge_index: dict[tuple[int, int], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise NodeIndexError(f"node count {self.n}")
        adjacency: list[set[int]] = [set() for _ in range(self.n)]
        seen: set[tuple[int, int]] = set()
        for i, j in self.edges:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise NodeIndexError(f"edge {i + 1} {j + 1} with n = {self.n}")
            if i == j:
                raise LoopError(f"node {i + 1}")
            if i > j:
                raise NodeIndexError(f"edge {i + 1} {j + 1} is not ordered")
            if (i, j) in seen:
                raise DuplicateEdgeError(f"{i + 1} {j + 1}")
            seen.add((i, j))
            adjacency[i].add(j)
            adjacency[j].add(i)
        object.__setattr__(self, "adjacency", tuple(frozenset(a) for a in adjacency))
        object.__setattr__(self, "edge_index", {e: k for k, e in enumerate(self.edges)})

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph from 0-based pairs in any order and orientation."""
        normalized = []
        for i, j in edges:
            if i == j:
                raise LoopError(f"node {i + 1}")
            normalized.append((min(i, j), max(i, j)))
        return cls(n=n, edges=tuple(sorted(normalized)))

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "Graph":
        nodes = sorted(graph.nodes())
        index = {node: k for k, node in enumerate(nodes)}
        return cls.from_edges(len(nodes), ((index[a], index[b]) for a, b in graph.edges()))

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, i: int) -> frozenset[int]:
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.adjacency[i]

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges)
        return graph

    def one_based_edges(self) -> list[list[int]]:
        return [[i + 1, j + 1] for i, j in self.edges]

    def __repr__(self):
        return f"<Graph n={self.n} m={self.m}>"
