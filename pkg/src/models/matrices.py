from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.core.errors import NonFiniteMatrixError, ShapeError
from src.models.graph import Graph


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class GMatrix:
    """
    Symmetric matrix tied to a graph.

    Only the diagonal and the entries on edges are stored, so an entry at a
    distinct non-adjacent pair is zero by construction. `offdiag[k]` is the
    entry at `graph.edges[k]`.
    """

    graph: Graph
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = _frozen(self.diag).reshape(-1)
        offdiag = _frozen(self.offdiag).reshape(-1)
        if diag.shape != (self.graph.n,) or offdiag.shape != (self.graph.m,):
            raise ShapeError(
                f"diag {diag.shape} / offdiag {offdiag.shape} for n={self.graph.n}, m={self.graph.m}"
            )
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(offdiag))):
            raise NonFiniteMatrixError()
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @classmethod
    def from_dense(cls, graph: Graph, dense: np.ndarray) -> "GMatrix":
        """Read the diagonal and edge entries of a dense matrix (upper triangle)."""
        dense = np.asarray(dense, dtype=float)
        if dense.shape != (graph.n, graph.n):
            raise ShapeError(f"dense {dense.shape} for n={graph.n}")
        rows = np.array([i for i, _ in graph.edges], dtype=int)
        cols = np.array([j for _, j in graph.edges], dtype=int)
        offdiag = dense[rows, cols] if graph.m else np.zeros(0)
        return cls(graph=graph, diag=np.diag(dense).copy(), offdiag=offdiag)

    @classmethod
    def from_edge_values(cls, graph: Graph, values: dict[tuple[int, int], float],
                         diag: Optional[np.ndarray] = None) -> "GMatrix":
        offdiag = np.array([values[e] for e in graph.edges], dtype=float)
        return cls(graph=graph, diag=np.zeros(graph.n) if diag is None else diag, offdiag=offdiag)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def dense(self) -> np.ndarray:
        m = np.diag(self.diag)
        for k, (i, j) in enumerate(self.graph.edges):
            m[i, j] = m[j, i] = self.offdiag[k]
        return m

    def entry(self, i: int, j: int) -> float:
        if i == j:
            return float(self.diag[i])
        a, b = min(i, j), max(i, j)
        k = self.graph.edge_index.get((a, b))
        return 0.0 if k is None else float(self.offdiag[k])

    def edge_values(self) -> dict[tuple[int, int], float]:
        return {e: float(v) for e, v in zip(self.graph.edges, self.offdiag)}

    def with_diag(self, diag: np.ndarray) -> "GMatrix":
        return GMatrix(graph=self.graph, diag=diag, offdiag=self.offdiag)

    def shifted(self, shift: float) -> "GMatrix":
        """Return M + shift * I."""
        return GMatrix(graph=self.graph, diag=self.diag + shift, offdiag=self.offdiag)

    def combine(self, other: "GMatrix", weight: float) -> "GMatrix":
        """Return (1 - weight) * self + weight * other."""
        return GMatrix(
            graph=self.graph,
            diag=(1.0 - weight) * self.diag + weight * other.diag,
            offdiag=(1.0 - weight) * self.offdiag + weight * other.offdiag,
        )

    def __add__(self, other: "GMatrix") -> "GMatrix":
        return GMatrix(graph=self.graph, diag=self.diag + other.diag, offdiag=self.offdiag + other.offdiag)

    def __mul__(self, scalar: float) -> "GMatrix":
        return GMatrix(graph=self.graph, diag=scalar * self.diag, offdiag=scalar * self.offdiag)

    __rmul__ = __mul__

    def norm_inf(self) -> float:
        return float(np.abs(self.dense).sum(axis=1).max()) if self.n else 0.0

    def __repr__(self):
        return f"<GMatrix n={self.n} m={self.graph.m}>"


@dataclass(frozen=True, eq=False)
class CorankJump:
    """First parameter of a matrix family at which the corank increases."""

    t: float
    matrix: GMatrix
    eigen: "EigenSummary"
    bracket_width: float

    def __repr__(self):
        return f"<CorankJump t={self.t:.12g} corank={self.eigen.corank} width={self.bracket_width:.2g}>"


@dataclass(frozen=True, eq=False)
class EigenSummary:
    """Ascending eigenvalues with a tolerance-classified signature."""

    eigenvalues: np.ndarray
    tol: float
    n_negative: int
    corank: int
    n_positive: int
    perron: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def eigenvalue(self, k: int) -> float:
        """k-th smallest eigenvalue, 1-based as in lambda_k."""
        return float(self.eigenvalues[k - 1])

    @property
    def is_good(self) -> bool:
        return self.n_negative == 1

    def __repr__(self):
        return (
            f"<EigenSummary n={self.n} negative={self.n_negative} "
            f"corank={self.corank} positive={self.n_positive} tol={self.tol:.3g}>"
        )
