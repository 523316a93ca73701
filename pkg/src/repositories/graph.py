import sys
from pathlib import Path

from src.core.errors import (
    DuplicateEdgeError,
    LoopError,
    MalformedEdgeListError,
    MalformedHeaderError,
    NodeIndexError,
)
from src.core.logger import get_logger
from src.models.graph import Graph

logger = get_logger(__name__)


class GraphRepository:

    @staticmethod
    def parse(text: str) -> Graph:
        """
        Parse an edge-list document.

        The first non-empty line holds "n m"; the next m non-empty lines hold
        one edge "i j" each, with 1-based node indices and i < j. Blank lines
        are skipped; error messages cite physical line numbers.

        Args:
            text: the document, UTF-8 decoded

        Returns:
            Graph: the described graph with 0-based nodes

        Raises:
            MalformedHeaderError: missing header, non-integer fields, n < 1 or m < 0
            MalformedEdgeListError: wrong number of edge lines or malformed line
            NodeIndexError: an index outside 1..n, or i > j
            LoopError: an edge "i i"
            DuplicateEdgeError: the same unordered pair twice
        """
        lines = [(number, line.split()) for number, line in enumerate(text.splitlines(), start=1) if line.strip()]
        if not lines or len(lines[0][1]) != 2:
            raise MalformedHeaderError()
        header = lines[0][1]
        try:
            n, m = int(header[0]), int(header[1])
        except ValueError:
            raise MalformedHeaderError(" ".join(header))
        if n < 1 or m < 0:
            raise MalformedHeaderError(f"n = {n}, m = {m}")

        body = lines[1:]
        if len(body) != m:
            raise MalformedEdgeListError(f"header announces {m} edges, found {len(body)}")

        edges: list[tuple[int, int]] = []
        seen: set[tuple[int, int]] = set()
        for number, tokens in body:
            if len(tokens) != 2:
                raise MalformedEdgeListError(f"line {number}: {' '.join(tokens)!r}")
            try:
                i, j = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise MalformedEdgeListError(f"line {number}: {' '.join(tokens)!r}")
            if not (1 <= i <= n and 1 <= j <= n):
                raise NodeIndexError(f"line {number}: {i} {j} with n = {n}")
            if i == j:
                raise LoopError(f"line {number}: node {i}")
            if i > j:
                raise NodeIndexError(f"line {number}: {i} {j} is not ordered")
            pair = (i - 1, j - 1)
            if pair in seen:
                raise DuplicateEdgeError(f"line {number}: {i} {j}")
            seen.add(pair)
            edges.append(pair)

        graph = Graph.from_edges(n, edges)
        logger.debug(f"Parsed graph with n={graph.n}, m={graph.m}")
        return graph

    @staticmethod
    def render(g: Graph) -> str:
        """Canonical edge-list document: header, then edges in lexicographic order."""
        lines = [f"{g.n} {g.m}"]
        lines.extend(f"{i + 1} {j + 1}" for i, j in g.edges)
        return "\n".join(lines) + "\n"

    @staticmethod
    def load(source: str) -> Graph:
        """Read a graph from a path, or from standard input when source is "-"."""
        if source == "-":
            text = sys.stdin.read()
        else:
            text = Path(source).read_text(encoding="utf-8")
        return GraphRepository.parse(text)

    @staticmethod
    def save(g: Graph, path: str) -> None:
        Path(path).write_text(GraphRepository.render(g), encoding="utf-8")
