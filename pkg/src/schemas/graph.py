from pydantic import BaseModel, Field, model_validator

from src.models.graph import Graph
from src.schemas.validators import validate_edge_pairs


class GraphIn(BaseModel):
    n: int = Field(ge=1, description="Node count; nodes are numbered 1..n")
    edges: list[tuple[int, int]] = Field(
        default_factory=list,
        description="Edges as 1-based node pairs",
    )

    @model_validator(mode="after")
    def validate_edges(self) -> "GraphIn":
        """Validate indices, loops and duplicates."""
        validate_edge_pairs(self.n, self.edges)
        return self

    def to_graph(self) -> Graph:
        return Graph.from_edges(self.n, ((i - 1, j - 1) for i, j in self.edges))

    @classmethod
    def from_graph(cls, g: Graph) -> "GraphIn":
        return cls(n=g.n, edges=[(i + 1, j + 1) for i, j in g.edges])
