"""
Centralized precondition checks.

This module provides reusable guard functions so that drivers and
operations validate their inputs the same way. `require_*` functions
raise; they never return a value.
"""

from typing import Optional

import networkx as nx
import numpy as np

from src.core.config import settings
from src.core.errors import (
    DisconnectedGraphError,
    NotBiconnectedError,
    OracleSizeError,
    ParameterRangeError,
    PreconditionError,
    ZeroScaleError,
    ZeroVectorError,
    ERROR_TOO_SMALL,
)
from src.models.graph import Graph


def require_min_nodes(g: Graph, minimum: int) -> None:
    """
    Verify that the graph has at least `minimum` nodes.

    Raises:
        PreconditionError: If g.n < minimum
    """
    if g.n < minimum:
        raise PreconditionError(f"{ERROR_TOO_SMALL}: n = {g.n}, need at least {minimum}")


def require_connected(g: Graph) -> None:
    """
    Verify that the graph has exactly one connected component.

    Args:
        g: Graph to check

    Raises:
        DisconnectedGraphError: If the graph has two or more components;
            the detail names the component count

    Usage:
        Gate for every driver; a good G-matrix is only meaningful on a
        connected graph.
    """
    components = nx.number_connected_components(g.to_networkx())
    if components != 1:
        raise DisconnectedGraphError(f"{components} components")


def require_biconnected(g: Graph) -> None:
    """
    Verify that the graph is 2-connected.

    A graph is 2-connected when it is connected, has at least 3 nodes and
    has no cut node.

    Args:
        g: Graph to check

    Raises:
        DisconnectedGraphError: If the graph is not connected
        NotBiconnectedError: If the graph is too small or has a cut node;
            `cut_node` holds the smallest cut node (1-based) when one exists

    Example:
        >>> require_biconnected(path_on_three_nodes)
        NotBiconnectedError: Graph is not 2-connected: cut node 2
    """
    require_connected(g)
    if g.n < 3:
        raise NotBiconnectedError(f"n = {g.n}")
    cut_nodes = sorted(nx.articulation_points(g.to_networkx()))
    if cut_nodes:
        node = cut_nodes[0] + 1
        raise NotBiconnectedError(f"cut node {node}", cut_node=node)


def require_nonzero_vectors(points: np.ndarray, tol: float = 0.0) -> None:
    """
    Verify that no node vector vanishes.

    Args:
        points: n x d array of node vectors
        tol: vectors with Euclidean norm <= tol count as zero

    Raises:
        ZeroVectorError: naming the offending nodes (1-based)
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    norms = np.linalg.norm(points, axis=1)
    zero = tuple(int(i) for i in np.flatnonzero(norms <= tol))
    if zero:
        raise ZeroVectorError(f"nodes {[i + 1 for i in zero]}", nodes=zero)


def require_nonzero_scale(d_vec: np.ndarray) -> None:
    """
    Verify that a node scaling vector has no zero entry.

    Raises:
        ZeroScaleError: naming the offending nodes (1-based)
    """
    d_vec = np.asarray(d_vec, dtype=float)
    zero = np.flatnonzero(d_vec == 0.0)
    if zero.size:
        raise ZeroScaleError(f"nodes {[int(i) + 1 for i in zero]}")


def require_oracle_size(g: Graph, cap: Optional[int] = None) -> None:
    """
    Verify that the graph is small enough for the brute-force oracles.

    Raises:
        OracleSizeError: If g.n exceeds the cap (settings.ORACLE_SIZE_CAP
            by default)
    """
    cap = settings.ORACLE_SIZE_CAP if cap is None else cap
    if g.n > cap:
        raise OracleSizeError(f"n = {g.n} > {cap}")


def require_in_range(
    name: str,
    value: float,
    low: float,
    high: float,
    low_closed: bool = False,
    high_closed: bool = False,
) -> None:
    """
    Verify that a family parameter lies in its interval.

    Raises:
        ParameterRangeError: naming the parameter and the interval
    """
    above = value >= low if low_closed else value > low
    below = value <= high if high_closed else value < high
    if not (above and below):
        left = "[" if low_closed else "("
        right = "]" if high_closed else ")"
        raise ParameterRangeError(f"{name} = {value!r} not in {left}{low!r}, {high!r}{right}")
