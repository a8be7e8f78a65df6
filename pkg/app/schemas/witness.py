from enum import Enum
from typing import Optional, Tuple

from pydantic import Field, model_validator

from app.schemas.graphs import Colour, FrozenModel


class PatternKind(str, Enum):
    COLOUR_CLIQUE = "colour-clique"
    COLOUR_TWO_CLIQUES = "colour-two-cliques"
    CYCLIC_BLOWUP = "cyclic-blowup"


class PatternWitness(FrozenModel):
    """Vertex sets certifying an unavoidable pattern.

    colour-clique: classes = (Q, R); Q is a clique in `colour`, every other pair
    of Q+R has the other colour.
    colour-two-cliques: classes = (Q, R); both cliques in `colour`, cross pairs
    in the other colour.
    cyclic-blowup: classes = (V1, V2, V3), transitive, V1 -> V2 -> V3 -> V1.
    """

    kind: PatternKind
    colour: Optional[Colour] = None
    classes: Tuple[Tuple[int, ...], ...]

    @model_validator(mode="after")
    def _check_shape(self) -> "PatternWitness":
        expected = 3 if self.kind is PatternKind.CYCLIC_BLOWUP else 2
        if len(self.classes) != expected:
            raise ValueError(f"{self.kind.value} needs {expected} classes")
        if (self.colour is None) != (self.kind is PatternKind.CYCLIC_BLOWUP):
            raise ValueError("colour is required exactly for colour kinds")
        sizes = {len(c) for c in self.classes}
        if len(sizes) != 1:
            raise ValueError("classes must have equal size")
        flat = [v for c in self.classes for v in c]
        if len(set(flat)) != len(flat):
            raise ValueError("classes must be disjoint")
        return self

    @property
    def t(self) -> int:
        return len(self.classes[0])

    @property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(sorted(v for c in self.classes for v in c))


class DetectionResult(FrozenModel):
    found: bool
    witness: Optional[PatternWitness] = None
    nodes_explored: int = Field(0, ge=0)
