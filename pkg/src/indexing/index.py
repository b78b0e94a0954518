from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from pydantic import BaseModel, Field

from geometry.halfspaces import ElementHalfspaces
from grid.spec import GridSpec
from grid.table import CellTable
from indexing.fans import EdgeFan, VertexFan
from mesh.metrics import MeshMetrics
from mesh.topology import MeshTopology


class BuildStats(BaseModel):
    """Structured summary of one index build."""
    dim: int
    n_vertices: int
    n_elements: int
    n_cells: int
    dims: List[int]
    s: float
    w_star: float
    alpha: float
    threshold: float
    active: int = 0
    boundary: int = 0
    classes: Dict[str, int] = Field(default_factory=dict)
    visits: Dict[str, int] = Field(default_factory=dict)
    fallback: int = 0
    max_fan: int = 0
    init_seconds: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class LocatorIndex:
    """Everything a query needs; immutable once built."""
    mesh: MeshTopology
    metrics: MeshMetrics
    grid: GridSpec
    table: CellTable
    halfspaces: ElementHalfspaces
    vertex_fans: Tuple[VertexFan, ...]
    edge_fans: Tuple[EdgeFan, ...]
    tol: float
    stats: BuildStats
    coords: List[Tuple[float, ...]] = field(repr=False, default_factory=list)

    @property
    def dim(self) -> int:
        return self.mesh.dim
