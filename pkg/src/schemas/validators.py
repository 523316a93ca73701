"""
Common Pydantic validators for reuse across schemas.

This module provides reusable validation helpers so that graph documents,
certificate documents and run configurations check their fields the same
way. Every helper raises ValueError, which pydantic reports as a
validation error.
"""

from typing import Optional


def validate_edge_pairs(n: int, edges: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """
    Validate 1-based edge pairs against the node count.

    Args:
        n: The node count
        edges: The edge pairs, 1-based

    Returns:
        The edges unchanged

    Raises:
        ValueError: If an index is outside 1..n, an edge is a loop, or an
            unordered pair appears twice
    """
    seen: set[tuple[int, int]] = set()
    for i, j in edges:
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"Edge {i} {j} has an index outside 1..{n}")
        if i == j:
            raise ValueError(f"Edge {i} {j} is a loop")
        pair = (min(i, j), max(i, j))
        if pair in seen:
            raise ValueError(f"Edge {i} {j} appears twice")
        seen.add(pair)
    return edges


def validate_square(rows: list[list[float]], n: int, name: str) -> list[list[float]]:
    """Validate that `rows` is an n x n array."""
    if len(rows) != n or any(len(row) != n for row in rows):
        raise ValueError(f"{name} must be {n} x {n}")
    return rows


def validate_positive_tolerance(v: Optional[float]) -> Optional[float]:
    """Validate that a tolerance factor, when given, is strictly positive."""
    if v is not None and not v > 0:
        raise ValueError("Tolerance must be > 0")
    return v
