import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Union

import numpy as np

from config.config import UNSET
from grid.spec import GridSpec

logger = logging.getLogger(__name__)


@dataclass
class CellTable:
    """Per-cell maps over the whole background grid, indexed by linear cell id.

    phi: anchor vertex; psi: anchor edge (3D) with -1 when the cell is in
    no edge patch; host: element containing the whole cell. boundary marks
    cells touched by a boundary facet.
    """
    active: np.ndarray
    boundary: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    host: np.ndarray
    stats: Dict[str, int] = field(default_factory=dict)

    @classmethod
    def empty(cls, grid: GridSpec) -> "CellTable":
        n = grid.n_cells
        return cls(
            active=np.zeros(n, dtype=bool),
            boundary=np.zeros(n, dtype=bool),
            phi=np.full(n, UNSET, dtype=np.int32),
            psi=np.full(n, UNSET, dtype=np.int32),
            host=np.full(n, UNSET, dtype=np.int32),
        )

    @property
    def patch(self) -> np.ndarray:
        """Cells associated with an edge patch."""
        return self.psi != UNSET

    def freeze(self) -> "CellTable":
        for arr in (self.active, self.boundary, self.phi, self.psi, self.host):
            arr.setflags(write=False)
        return self

    def equals(self, other: "CellTable") -> bool:
        return all(np.array_equal(getattr(self, name), getattr(other, name))
                   for name in ("active", "boundary", "phi", "psi", "host"))


def dump_cell_table(table: CellTable, path: Union[str, Path]) -> Path:
    """Text dump, one row per cell: cell active phi psi host."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ids = np.arange(len(table.active))
    rows = np.column_stack([ids, table.active.astype(int), table.phi, table.psi, table.host])
    np.savetxt(path, rows, fmt="%d", header="cell active phi psi host", comments="")
    logger.info(f"Wrote cell table ({len(ids)} cells) to {path}")
    return path
