from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.constants import LINE_DIMENSION, PLANE_DIMENSION
from src.models.certificate import CertificateKind
from src.schemas.validators import validate_edge_pairs, validate_square

_EMBEDDING_DIMENSION = {
    CertificateKind.PATH_EMBEDDING: LINE_DIMENSION,
    CertificateKind.OUTERPLANAR_EMBEDDING: PLANE_DIMENSION,
}


class CheckResult(BaseModel):
    name: str
    passed: bool
    value: Optional[float] = None
    detail: Optional[str] = None


class VerificationReport(BaseModel):
    passed: bool
    checks: list[CheckResult]

    def failed(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]


class CertificateSchema(BaseModel):
    """Certificate document as written by the command line and the API."""

    kind: CertificateKind
    dimension: int = Field(ge=LINE_DIMENSION, le=PLANE_DIMENSION)
    claimed_corank: int = Field(ge=1)
    n: int = Field(ge=1)
    edges: list[tuple[int, int]]
    matrix: list[list[float]]
    eigenvalues: list[float]
    tolerance: float = Field(ge=0)
    embedding: Optional[list[list[float]]] = None
    report: dict[str, Any] = Field(default_factory=dict)

    model_config = ConfigDict(use_enum_values=False)

    @model_validator(mode="after")
    def validate_shapes(self) -> "CertificateSchema":
        """Validate edges, array shapes and the kind/embedding agreement."""
        validate_edge_pairs(self.n, self.edges)
        validate_square(self.matrix, self.n, "matrix")
        if len(self.eigenvalues) != self.n:
            raise ValueError(f"eigenvalues must have {self.n} entries")

        if self.kind.is_embedding:
            if self.embedding is None:
                raise ValueError(f"{self.kind.value} needs an embedding")
            if self.dimension != _EMBEDDING_DIMENSION[self.kind]:
                raise ValueError(f"{self.kind.value} lives in dimension {_EMBEDDING_DIMENSION[self.kind]}")
            if len(self.embedding) != self.n or any(len(row) != self.dimension for row in self.embedding):
                raise ValueError(f"embedding must be {self.n} x {self.dimension}")
        elif self.embedding is not None:
            raise ValueError("HighCorankMatrix carries no embedding")
        return self
