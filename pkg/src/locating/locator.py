"""Query-time point location against a built LocatorIndex.

2D: host cell -> anchor vertex -> sector of the vertex fan.
3D: host cell -> anchor edge (after moving the query onto the sphere of
radius w* around the anchor vertex when the cell has none) -> sector of the
edge fan on the plane orthogonal to the edge.

Points outside the background box or in inactive cells are Outside. Cells
touched by the domain boundary confirm the fan answer with one closed
point-in-element test, since part of such a cell lies outside the domain.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence

import numpy as np

from config.config import EXTERIOR
from geometry.plane import project_to_plane
from geometry.pseudo_angle import pseudo_angle, sector_search
from indexing.index import LocatorIndex
from locating.outcome import LocateOutcome
from utils.errors import DegenerateProjectionError, LocatorInvariantError

logger = logging.getLogger(__name__)


def _confirm(index: LocatorIndex, cell: int, element: int, p: Sequence[float]) -> int:
    if element != EXTERIOR and index.table.boundary.item(cell):
        if not index.halfspaces.contains(element, p, index.tol):
            return EXTERIOR
    return element


def locate_2d_id(p: Sequence[float], index: LocatorIndex) -> int:
    """Host element id of p, or -1 outside the domain."""
    table = index.table
    cell = index.grid.locate_cell(p)
    if cell < 0 or not table.active.item(cell):
        return EXTERIOR
    host = table.host.item(cell)
    if host >= 0:
        return host
    v = table.phi.item(cell)
    vx, vy = index.coords[v]
    dx, dy = p[0] - vx, p[1] - vy
    if math.hypot(dx, dy) < index.tol:
        return index.mesh.vertex_elements[v][0]
    fan = index.vertex_fans[v]
    element = fan.payload[sector_search(fan.angles, pseudo_angle(dx, dy))]
    return _confirm(index, cell, element, p)


def locate_3d_id(p: Sequence[float], index: LocatorIndex) -> int:
    """Host element id of p, or -1 outside the domain."""
    table = index.table
    grid = index.grid
    cell = grid.locate_cell(p)
    if cell < 0 or not table.active.item(cell):
        return EXTERIOR
    host = table.host.item(cell)
    if host >= 0:
        return host

    q = p
    e = table.psi.item(cell)
    if e < 0:
        v = table.phi.item(cell)
        vx, vy, vz = index.coords[v]
        dx, dy, dz = p[0] - vx, p[1] - vy, p[2] - vz
        d = math.sqrt(dx * dx + dy * dy + dz * dz)
        if d < index.tol:
            return index.mesh.vertex_elements[v][0]
        scale = index.metrics.w_star / d
        q = (vx + scale * dx, vy + scale * dy, vz + scale * dz)
        moved = grid.locate_cell(q)
        if moved >= 0 and table.active.item(moved):
            e = table.psi.item(moved)
        if e < 0:
            if table.boundary.item(cell):
                return EXTERIOR
            raise LocatorInvariantError(
                "moved query has no anchor edge",
                {"p": tuple(p), "cell": cell, "vertex": v, "moved": q, "moved_cell": moved},
            )

    fan = index.edge_fans[e]
    ax, ay, az = index.coords[fan.anchor]
    try:
        u, w = project_to_plane((q[0] - ax, q[1] - ay, q[2] - az), fan.basis)
    except DegenerateProjectionError:
        return _confirm(index, cell, index.mesh.edge_elements[e][0], p)
    element = fan.payload[sector_search(fan.angles, pseudo_angle(u, w))]
    return _confirm(index, cell, element, p)


def locate_id(p: Sequence[float], index: LocatorIndex) -> int:
    return locate_2d_id(p, index) if index.dim == 2 else locate_3d_id(p, index)


def locate_2d(p: Sequence[float], index: LocatorIndex) -> LocateOutcome:
    return LocateOutcome(locate_2d_id(tuple(float(x) for x in p), index))


def locate_3d(p: Sequence[float], index: LocatorIndex) -> LocateOutcome:
    return LocateOutcome(locate_3d_id(tuple(float(x) for x in p), index))


def locate(p: Sequence[float], index: LocatorIndex) -> LocateOutcome:
    return locate_2d(p, index) if index.dim == 2 else locate_3d(p, index)


def _locate_chunk(points: List[tuple], index: LocatorIndex) -> List[int]:
    find = locate_2d_id if index.dim == 2 else locate_3d_id
    return [find(p, index) for p in points]


def locate_ids(points, index: LocatorIndex, workers: int = 1) -> np.ndarray:
    """Element id (or -1) per point, in input order; workers > 1 splits into contiguous chunks."""
    rows = [tuple(p) for p in np.asarray(points, dtype=float).reshape(-1, index.dim).tolist()]
    if workers <= 1 or len(rows) < 2 * workers:
        return np.asarray(_locate_chunk(rows, index), dtype=np.int64)
    bounds = np.linspace(0, len(rows), workers + 1).astype(int)
    chunks = [rows[a:b] for a, b in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda chunk: _locate_chunk(chunk, index), chunks))
    return np.asarray([k for part in parts for k in part], dtype=np.int64)


def locate_batch(points, index: LocatorIndex, workers: int = 1) -> List[LocateOutcome]:
    """Outcomes for a batch of points, element-wise equal to single-point calls."""
    if len(points) == 0:
        return []
    return [LocateOutcome(int(k)) for k in locate_ids(points, index, workers)]
