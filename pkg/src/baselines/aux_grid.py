"""Candidate-list grid: each cell keeps the elements whose bounding box overlaps it."""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from config.config import AUX_GRID_SPACING_FACTOR, EXTERIOR
from geometry.halfspaces import ElementHalfspaces, build_halfspaces
from grid.passes import element_bounds, iter_box_pairs
from grid.spec import GridSpec
from locating.outcome import LocateOutcome
from mesh.metrics import element_diameters, mesh_tolerance
from mesh.topology import MeshTopology

logger = logging.getLogger(__name__)


class CandidateListGrid:
    def __init__(self, mesh: MeshTopology, spacing: Optional[float] = None,
                 halfspaces: Optional[ElementHalfspaces] = None, tol: Optional[float] = None):
        self.mesh = mesh
        self.halfspaces = halfspaces or build_halfspaces(mesh)
        self.tol = mesh_tolerance(mesh) if tol is None else tol
        h = float(element_diameters(mesh).max())
        s = spacing or AUX_GRID_SPACING_FACTOR * h
        lo, hi = mesh.bounding_box()
        dims = np.maximum(np.ceil((hi - lo) / s).astype(np.int64), 1)
        self.grid = GridSpec(lo=tuple(lo.tolist()), s=s, dims=tuple(int(n) for n in dims), padding=0.0)
        self.lists = self._fill()
        sizes = [len(c) for c in self.lists]
        logger.info(f"Candidate-list grid: dims={self.grid.dims}, s={s:.4g}, "
                    f"mean list {np.mean(sizes):.2f}, max list {max(sizes)}")

    def _fill(self) -> Tuple[Tuple[int, ...], ...]:
        box_lo, box_hi = element_bounds(self.mesh)
        imin, imax = self.grid.index_boxes(box_lo - self.tol, box_hi + self.tol)
        elements, cells = [], []
        for rep, index in iter_box_pairs(imin, imax):
            elements.append(rep)
            cells.append(self.grid.linear(index))
        elements = np.concatenate(elements)
        cells = np.concatenate(cells)
        order = np.lexsort((elements, cells))
        counts = np.bincount(cells, minlength=self.grid.n_cells)
        groups = np.split(elements[order], np.cumsum(counts)[:-1])
        return tuple(tuple(g.tolist()) for g in groups)

    def candidates(self, p: Sequence[float]) -> Tuple[int, ...]:
        cell = self.grid.locate_cell(p)
        return () if cell < 0 else self.lists[cell]

    def locate_id(self, p: Sequence[float]) -> int:
        contains = self.halfspaces.contains
        for k in self.candidates(p):
            if contains(k, p, self.tol):
                return k
        return EXTERIOR


def aux_grid_locate(p: Sequence[float], clg: CandidateListGrid, mesh: Optional[MeshTopology] = None) -> LocateOutcome:
    """Lowest-id candidate of p's cell containing p, or Outside."""
    return LocateOutcome(clg.locate_id(tuple(float(x) for x in p)))
