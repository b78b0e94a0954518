"""Vectorized (item, cell) sweeps over per-item index boxes.

Each sweep expands the index box of every item (edge, face or element) into
candidate (item, cell) pairs in bounded chunks, filters them with a cheap
distance gate and then applies the exact closed-set predicate.
"""
import itertools
import logging
from typing import Iterator, Optional, Tuple

import numpy as np

from config.locator_config import BUILD_SETTINGS
from geometry.halfspaces import ElementHalfspaces
from geometry.intersections import clip_segments_to_balls, clip_segments_to_boxes, triangles_intersect_boxes
from grid.spec import GridSpec
from grid.table import CellTable

logger = logging.getLogger(__name__)

PairChunk = Tuple[np.ndarray, np.ndarray]


def iter_box_pairs(imin: np.ndarray, imax: np.ndarray,
                   chunk_pairs: Optional[int] = None) -> Iterator[PairChunk]:
    """Yield (item positions, (P, dim) cell indices) covering every item's index box."""
    chunk_pairs = chunk_pairs or BUILD_SETTINGS["chunk_pairs"]
    extents = imax - imin + 1
    sizes = np.prod(extents, axis=1)
    n_items = len(sizes)
    start = 0
    while start < n_items:
        total = np.cumsum(sizes[start:])
        stop = start + max(1, int(np.searchsorted(total, chunk_pairs, side="right")))
        items = np.arange(start, stop)
        counts = sizes[start:stop]
        rep = np.repeat(items, counts)
        offsets = np.arange(int(counts.sum())) - np.repeat(np.cumsum(counts) - counts, counts)
        index = np.empty((len(rep), imin.shape[1]), dtype=np.int64)
        for axis in range(imin.shape[1]):
            ext = extents[rep, axis]
            index[:, axis] = imin[rep, axis] + offsets % ext
            offsets = offsets // ext
        yield rep, index
        start = stop


def element_bounds(mesh) -> Tuple[np.ndarray, np.ndarray]:
    """Axis-aligned bounding box corners of every element."""
    lo = np.stack([mesh.vertices[list(el)].min(axis=0) for el in mesh.elements])
    hi = np.stack([mesh.vertices[list(el)].max(axis=0) for el in mesh.elements])
    return lo, hi


def _item_boxes(grid: GridSpec, coords: np.ndarray, inflate: int = 0):
    return grid.index_boxes(coords.min(axis=1), coords.max(axis=1), inflate)


def edge_cell_hits(mesh, grid: GridSpec, slack: float = 0.0):
    """Every (edge, cell) pair whose closed segment meets the closed cell.

    Returns edge ids, linear cell ids and the clipped parameter interval.
    """
    seg = mesh.vertices[mesh.edges]  # (n_edges, 2, dim)
    imin, imax = _item_boxes(grid, seg)
    lo = np.asarray(grid.lo)
    out_e, out_c, out_t1, out_t2 = [], [], [], []
    visits = 0
    for rep, index in iter_box_pairs(imin, imax):
        visits += len(rep)
        box_lo = lo + grid.s * index
        hit, t1, t2 = clip_segments_to_boxes(seg[rep, 0], seg[rep, 1], box_lo, box_lo + grid.s, slack)
        out_e.append(rep[hit])
        out_c.append(grid.linear(index[hit]))
        out_t1.append(t1[hit])
        out_t2.append(t2[hit])
    logger.debug(f"Edge sweep visited {visits} (edge, cell) pairs")
    return (np.concatenate(out_e), np.concatenate(out_c),
            np.concatenate(out_t1), np.concatenate(out_t2), visits)


def edge_ball_hits(mesh, grid: GridSpec):
    """(edge, cell) pairs whose segment meets the ball circumscribing the cell.

    Index boxes are inflated by one cell per side. Returns edge ids, cell
    ids and the clipped parameter interval inside the ball.
    """
    seg = mesh.vertices[mesh.edges]
    imin, imax = _item_boxes(grid, seg, inflate=1)
    lo = np.asarray(grid.lo)
    radius = grid.half_diagonal
    out_e, out_c, out_t1, out_t2 = [], [], [], []
    visits = 0
    for rep, index in iter_box_pairs(imin, imax):
        visits += len(rep)
        centers = lo + grid.s * (index + 0.5)
        hit, t1, t2 = clip_segments_to_balls(seg[rep, 0], seg[rep, 1], centers, radius)
        out_e.append(rep[hit])
        out_c.append(grid.linear(index[hit]))
        out_t1.append(t1[hit])
        out_t2.append(t2[hit])
    logger.debug(f"Edge-ball sweep visited {visits} (edge, cell) pairs")
    return (np.concatenate(out_e), np.concatenate(out_c),
            np.concatenate(out_t1), np.concatenate(out_t2), visits)


def face_cell_hits(mesh, grid: GridSpec, slack: float = 0.0):
    """Every (face, cell) pair whose closed triangle meets the closed cell (3D)."""
    tri = mesh.vertices[mesh.faces]  # (n_faces, 3, 3)
    normals = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    normals /= np.linalg.norm(normals, axis=-1, keepdims=True)
    offsets = np.einsum("fk,fk->f", normals, tri[:, 0])
    imin, imax = _item_boxes(grid, tri)
    lo = np.asarray(grid.lo)
    reach = grid.half_diagonal + slack
    out_f, out_c = [], []
    visits = 0
    for rep, index in iter_box_pairs(imin, imax):
        visits += len(rep)
        centers = lo + grid.s * (index + 0.5)
        near = np.abs(np.einsum("pk,pk->p", normals[rep], centers) - offsets[rep]) <= reach
        rep, index = rep[near], index[near]
        box_lo = lo + grid.s * index
        hit = triangles_intersect_boxes(tri[rep], box_lo, box_lo + grid.s, slack)
        out_f.append(rep[hit])
        out_c.append(grid.linear(index[hit]))
    logger.debug(f"Face sweep visited {visits} (face, cell) pairs")
    return np.concatenate(out_f), np.concatenate(out_c), visits


def element_center_hits(mesh, grid: GridSpec, halfspaces: ElementHalfspaces, tol: float):
    """(element, cell) pairs where the cell center lies in the closed element.

    Also returns, per pair, whether every cell corner lies in the element.
    """
    box_lo, box_hi = element_bounds(mesh)
    imin, imax = grid.index_boxes(box_lo, box_hi)
    lo = np.asarray(grid.lo)
    corner_offsets = grid.s * np.array(list(itertools.product((0.0, 1.0), repeat=grid.dim)))
    out_k, out_c, out_whole = [], [], []
    visits = 0
    for rep, index in iter_box_pairs(imin, imax):
        visits += len(rep)
        centers = lo + grid.s * (index + 0.5)
        inside = halfspaces.contains_pairs(rep, centers, tol)
        rep, index = rep[inside], index[inside]
        corners = (lo + grid.s * index)[:, None, :] + corner_offsets[None]
        out_whole.append(halfspaces.contains_pairs(rep, corners, tol))
        out_k.append(rep)
        out_c.append(grid.linear(index))
    logger.debug(f"Element sweep visited {visits} (element, cell) pairs")
    return np.concatenate(out_k), np.concatenate(out_c), np.concatenate(out_whole), visits


def facet_cell_hits(mesh, grid: GridSpec, slack: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """(facet ids, cell ids) for edges in 2D and faces in 3D."""
    if mesh.dim == 2:
        edges, cells, *_ = edge_cell_hits(mesh, grid, slack)
        return edges, cells
    faces, cells, _ = face_cell_hits(mesh, grid, slack)
    return faces, cells


def mark_active_cells(mesh, grid: GridSpec, table: CellTable, halfspaces: ElementHalfspaces,
                      tol: float = 0.0, facet_hits: Optional[Tuple[np.ndarray, np.ndarray]] = None,
                      center_cells: Optional[np.ndarray] = None) -> CellTable:
    """Active cells are those cut by a facet or whose center lies in an element.

    A cell that meets the domain with positive measure is either cut by a
    facet or lies inside one element, so this marking is exact up to tol.
    """
    facets, cells = facet_hits if facet_hits is not None else facet_cell_hits(mesh, grid, tol)
    if center_cells is None:
        _, center_cells, _, _ = element_center_hits(mesh, grid, halfspaces, tol)
    table.active[cells] = True
    table.active[center_cells] = True
    table.boundary[cells[mesh.boundary_facets[facets]]] = True
    table.stats["active"] = int(table.active.sum())
    table.stats["boundary"] = int(table.boundary.sum())
    logger.info(f"Active cells: {table.stats['active']} of {grid.n_cells} ({table.stats['boundary']} on the boundary)")
    return table
