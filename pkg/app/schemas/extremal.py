from pydantic import Field, model_validator

from app.schemas.graphs import FrozenModel, Graph


class ExtremalRecord(FrozenModel):
    """Largest K_{a,b}-free graph found on n vertices.

    exhaustive=True means no n-vertex graph with edge_count + 1 edges avoids K_{a,b}.
    """

    n: int = Field(..., ge=1)
    a: int = Field(..., ge=1)
    b: int = Field(..., ge=1)
    edge_count: int = Field(..., ge=0)
    graph: Graph
    exhaustive: bool
    canonical_forms: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_witness(self) -> "ExtremalRecord":
        if self.graph.n != self.n or self.graph.edge_count != self.edge_count:
            raise ValueError("witness graph does not match n / edge_count")
        if self.a > self.b:
            raise ValueError("expected a <= b")
        return self
