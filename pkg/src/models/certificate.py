import enum
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from src.models.graph import Graph
from src.models.matrices import EigenSummary, GMatrix


class CertificateKind(str, enum.Enum):
    PATH_EMBEDDING = "PathEmbedding"
    OUTERPLANAR_EMBEDDING = "OuterplanarEmbedding"
    HIGH_CORANK_MATRIX = "HighCorankMatrix"

    @property
    def is_embedding(self) -> bool:
        return self is not CertificateKind.HIGH_CORANK_MATRIX


@dataclass(eq=False)
class Certificate:
    """
    Outcome of a driver run.

    For embedding kinds `embedding` is the n x d array of node coordinates
    and `matrix` the matrix whose kernel they span; for a high-corank
    result `embedding` is None.
    """

    kind: CertificateKind
    graph: Graph
    matrix: GMatrix
    eigen: EigenSummary
    dimension: int
    claimed_corank: int
    embedding: Optional[np.ndarray] = None
    report: dict[str, Any] = field(default_factory=dict)

    @property
    def tolerance(self) -> float:
        return self.eigen.tol

    def __repr__(self):
        return f"<Certificate kind={self.kind.value} n={self.graph.n} corank={self.eigen.corank}>"
