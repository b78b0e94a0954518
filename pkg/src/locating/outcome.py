from dataclasses import dataclass

from config.config import EXTERIOR


@dataclass(frozen=True)
class LocateOutcome:
    """Host element of a query, or the outside marker (element == -1)."""
    element: int

    @classmethod
    def inside(cls, element: int) -> "LocateOutcome":
        return cls(int(element))

    @classmethod
    def outside(cls) -> "LocateOutcome":
        return OUTSIDE

    @property
    def is_inside(self) -> bool:
        return self.element != EXTERIOR

    @property
    def is_outside(self) -> bool:
        return self.element == EXTERIOR

    def __str__(self) -> str:
        return f"Inside({self.element})" if self.is_inside else "Outside"


OUTSIDE = LocateOutcome(EXTERIOR)
