"""Index construction: per-cell anchor vertices, anchor edges, host shortcuts and fans.

Passes run in a fixed order (facet passes, then element pass, then fans)
and follow sequential overwrite semantics: within a pass the pair for the
highest item id wins a cell, and later passes overwrite phi but never clear
psi.
"""
import logging
from typing import Dict, Optional

import numpy as np

from config.config import TOLERANCE_FACTOR, UNSET
from config.locator_config import BUILD_SETTINGS, BuildConfig
from geometry.halfspaces import ElementHalfspaces, build_halfspaces
from geometry.intersections import chi_points
from grid.passes import edge_ball_hits, edge_cell_hits, element_center_hits, face_cell_hits, mark_active_cells
from grid.spec import GridSpec, grid_spec_from_metrics
from grid.table import CellTable
from indexing.fans import build_edge_fan, build_vertex_fan
from indexing.index import BuildStats, LocatorIndex
from mesh.metrics import MeshMetrics, compute_metrics
from mesh.topology import MeshTopology
from utils.errors import IndexBuildError
from utils.timing import Stopwatch

logger = logging.getLogger(__name__)


def _assign_last(target: np.ndarray, cells: np.ndarray, values: np.ndarray) -> None:
    """target[cells] = values where repeated cells keep their last value."""
    if len(cells) == 0:
        return
    unique, first = np.unique(cells[::-1], return_index=True)
    target[unique] = values[::-1][first]


def _nearer_endpoint(mesh: MeshTopology, edges: np.ndarray, q: np.ndarray):
    """Nearer endpoint of each edge to q, plus both endpoint distances."""
    a, b = mesh.edges[edges, 0], mesh.edges[edges, 1]
    da = np.linalg.norm(q - mesh.vertices[a], axis=-1)
    db = np.linalg.norm(q - mesh.vertices[b], axis=-1)
    return np.where(da < db, a, b), da, db


def _edge_lookup(mesh: MeshTopology):
    keys = mesh.edges[:, 0] * mesh.n_vertices + mesh.edges[:, 1]

    def edge_ids(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        return np.searchsorted(keys, lo * mesh.n_vertices + hi)

    return edge_ids


def _element_pass(mesh: MeshTopology, table: CellTable, center_hits) -> int:
    """Cells lying entirely in one element get it as host, with its lowest vertex (and edge)."""
    elements, cells, whole, _ = center_hits
    elements, cells = elements[whole], cells[whole]
    lowest_vertex = np.array([min(el) for el in mesh.elements], dtype=np.int64)
    _assign_last(table.host, cells, elements)
    _assign_last(table.phi, cells, lowest_vertex[elements])
    if mesh.dim == 3:
        lowest_edge = np.array([min(ee) for ee in mesh.element_edges], dtype=np.int64)
        _assign_last(table.psi, cells, lowest_edge[elements])
    return int(len(np.unique(cells)))


def _resolve_leftovers(mesh: MeshTopology, grid: GridSpec, table: CellTable,
                       halfspaces: ElementHalfspaces, tol: float) -> int:
    """Anchor active cells no pass reached at the nearest vertex of the element hosting their center."""
    missing = np.nonzero(table.active & (table.phi == UNSET))[0]
    if len(missing) == 0:
        return 0
    centers = grid.centers(missing)
    hosts = halfspaces.first_host(centers, tol)
    used = np.array([v for v, ts in enumerate(mesh.vertex_elements) if ts], dtype=np.int64)
    for cell, center, host in zip(missing, centers, hosts):
        if host >= 0:
            candidates = np.asarray(mesh.elements[host], dtype=np.int64)
        else:
            candidates = used
            logger.warning(f"Cell {cell} center lies in no element; anchoring at the nearest mesh vertex")
        d = np.linalg.norm(mesh.vertices[candidates] - center, axis=-1)
        table.phi[cell] = candidates[int(np.argmin(d))]
    if BUILD_SETTINGS["fallback_warn"]:
        logger.warning(f"{len(missing)} active cells resolved by the fallback pass")
    return int(len(missing))


def _check_complete(table: CellTable) -> None:
    unset = np.nonzero(table.active & (table.phi == UNSET))[0]
    if len(unset):
        raise IndexBuildError("active cell has no anchor vertex after all passes", int(unset[0]))


def _tolerance(metrics: MeshMetrics, tolerance: Optional[float]) -> float:
    return tolerance if tolerance is not None else TOLERANCE_FACTOR * metrics.h


def _stats(mesh: MeshTopology, metrics: MeshMetrics, grid: GridSpec, table: CellTable,
           classes: Dict[str, int], visits: Dict[str, int], fallback: int, max_fan: int,
           seconds: float, seed: int) -> BuildStats:
    return BuildStats(
        dim=mesh.dim, n_vertices=mesh.n_vertices, n_elements=mesh.n_elements,
        n_cells=grid.n_cells, dims=list(grid.dims), s=grid.s, w_star=metrics.w_star,
        alpha=metrics.alpha, threshold=metrics.threshold,
        active=table.stats.get("active", 0), boundary=table.stats.get("boundary", 0),
        classes=classes, visits=visits, fallback=fallback, max_fan=max_fan,
        init_seconds=seconds, seed=seed,
    )


def build_index_2d(mesh: MeshTopology, metrics: MeshMetrics, grid: GridSpec,
                   tolerance: Optional[float] = None, seed: int = 0) -> LocatorIndex:
    """Anchor vertices for every active cell, host shortcuts and vertex fans (2D)."""
    if mesh.dim != 2:
        raise ValueError("build_index_2d needs a 2D mesh")
    tol = _tolerance(metrics, tolerance)
    with Stopwatch() as watch:
        halfspaces = build_halfspaces(mesh)
        table = CellTable.empty(grid)

        # edge pass: nearer endpoint to the middle of the clipped segment
        edges, cells, t1, t2, edge_visits = edge_cell_hits(mesh, grid, slack=tol)
        seg = mesh.vertices[mesh.edges[edges]]
        q = seg[:, 0] + (0.5 * (t1 + t2))[:, None] * (seg[:, 1] - seg[:, 0])
        nearer, _, _ = _nearer_endpoint(mesh, edges, q)
        _assign_last(table.phi, cells, nearer)

        center_hits = element_center_hits(mesh, grid, halfspaces, tol)
        mark_active_cells(mesh, grid, table, halfspaces, tol,
                          facet_hits=(edges, cells), center_cells=center_hits[1])
        interior = _element_pass(mesh, table, center_hits)

        fans = tuple(build_vertex_fan(mesh, v) for v in range(mesh.n_vertices))
        fallback = _resolve_leftovers(mesh, grid, table, halfspaces, tol)
        _check_complete(table)
        table.freeze()

    classes = {"interior": interior, "edge_cut": int(len(np.unique(cells))), "fallback": fallback}
    visits = {"edge": edge_visits, "element": center_hits[3]}
    max_fan = max(len(f.angles) for f in fans)
    stats = _stats(mesh, metrics, grid, table, classes, visits, fallback, max_fan, watch.elapsed, seed)
    logger.info(f"2D index built in {watch.elapsed:.3f}s: {classes}, max fan {max_fan}")
    return LocatorIndex(mesh=mesh, metrics=metrics, grid=grid, table=table, halfspaces=halfspaces,
                        vertex_fans=fans, edge_fans=(), tol=tol, stats=stats,
                        coords=[tuple(v) for v in mesh.vertices.tolist()])


def _face_pass(mesh: MeshTopology, grid: GridSpec, table: CellTable, tol: float, threshold: float):
    """Resolve cells cut by faces from the set of faces meeting them."""
    faces, cells, visits = face_cell_hits(mesh, grid, slack=tol)
    order = np.lexsort((faces, cells))
    faces, cells = faces[order], cells[order]
    counts = np.bincount(cells, minlength=grid.n_cells)
    starts = np.concatenate([[0], np.cumsum(counts)])
    edge_ids = _edge_lookup(mesh)
    done = (table.phi != UNSET) & (table.psi != UNSET)

    # exactly one face: its lowest vertex and lowest edge
    single = np.nonzero((counts == 1) & ~done)[0]
    face = faces[starts[single]]
    tri = mesh.faces[face]
    table.phi[single] = tri[:, 0]
    table.psi[single] = edge_ids(tri[:, 0], tri[:, 1])

    # several faces and no anchor yet: two faces of one element meeting along an edge
    paired = np.nonzero((counts >= 2) & (table.phi == UNSET))[0]
    for cell in paired:
        cell_faces = faces[starts[cell]:starts[cell + 1]]
        by_element: Dict[int, list] = {}
        for f in cell_faces:
            for k in mesh.facet_elements[f]:
                if k >= 0:
                    by_element.setdefault(int(k), []).append(int(f))
        pair = next((fs[:2] for _, fs in sorted(by_element.items()) if len(fs) >= 2), None)
        if pair is None:
            raise IndexBuildError(
                f"faces {cell_faces.tolist()} share no element edge", int(cell)
            )
        a, b = sorted(set(mesh.faces[pair[0]].tolist()) & set(mesh.faces[pair[1]].tolist()))
        center = grid.centers(np.array([cell]))
        chi = chi_points(mesh.vertices[a][None], mesh.vertices[b][None], center)[0]
        da = float(np.linalg.norm(chi - mesh.vertices[a]))
        db = float(np.linalg.norm(chi - mesh.vertices[b]))
        table.phi[cell] = a if da < db else b
        if da > threshold and db > threshold:
            table.psi[cell] = int(edge_ids(np.array([a]), np.array([b]))[0])
    return (faces, cells), int(len(single)), int(len(paired)), visits


def build_index_3d(mesh: MeshTopology, metrics: MeshMetrics, grid: GridSpec,
                   tolerance: Optional[float] = None, seed: int = 0) -> LocatorIndex:
    """Anchor vertices and edges for every active cell, host shortcuts and edge fans (3D)."""
    if mesh.dim != 3:
        raise ValueError("build_index_3d needs a 3D mesh")
    tol = _tolerance(metrics, tolerance)
    threshold = metrics.threshold
    with Stopwatch() as watch:
        halfspaces = build_halfspaces(mesh)
        table = CellTable.empty(grid)

        # edge pass: balls around cell centers against edge segments
        edges, cells, t1, t2, edge_visits = edge_ball_hits(mesh, grid)
        seg = mesh.vertices[mesh.edges[edges]]
        q = seg[:, 0] + (0.5 * (t1 + t2))[:, None] * (seg[:, 1] - seg[:, 0])
        nearer, da, db = _nearer_endpoint(mesh, edges, q)
        _assign_last(table.phi, cells, nearer)
        far = (da > threshold) & (db > threshold)
        _assign_last(table.psi, cells[far], edges[far])
        edge_ball = int(len(np.unique(cells)))

        face_hits, single_face, face_pair, face_visits = _face_pass(mesh, grid, table, tol, threshold)
        center_hits = element_center_hits(mesh, grid, halfspaces, tol)
        mark_active_cells(mesh, grid, table, halfspaces, tol,
                          facet_hits=(face_hits[0], face_hits[1]), center_cells=center_hits[1])
        interior = _element_pass(mesh, table, center_hits)

        fans = tuple(build_edge_fan(mesh, e) for e in range(mesh.n_edges))
        fallback = _resolve_leftovers(mesh, grid, table, halfspaces, tol)
        _check_complete(table)
        table.freeze()

    classes = {
        "interior": interior,
        "single_face": single_face,
        "edge_ball": edge_ball,
        "face_pair": face_pair,
        "edge_patch": int((table.active & table.patch).sum()),
        "fallback": fallback,
    }
    visits = {"edge": edge_visits, "face": face_visits, "element": center_hits[3]}
    max_fan = max(len(f.angles) for f in fans)
    stats = _stats(mesh, metrics, grid, table, classes, visits, fallback, max_fan, watch.elapsed, seed)
    logger.info(f"3D index built in {watch.elapsed:.3f}s: {classes}, max fan {max_fan}")
    return LocatorIndex(mesh=mesh, metrics=metrics, grid=grid, table=table, halfspaces=halfspaces,
                        vertex_fans=(), edge_fans=fans, tol=tol, stats=stats,
                        coords=[tuple(v) for v in mesh.vertices.tolist()])


def build_index(mesh: MeshTopology, config: Optional[BuildConfig] = None) -> LocatorIndex:
    """Metrics, grid and index for a mesh under one build configuration."""
    config = config or BuildConfig()
    metrics = compute_metrics(mesh, w_star=config.w_star, w_star_margin=config.w_star_margin)
    grid = grid_spec_from_metrics(metrics, mesh.bounding_box(), config.padding)
    build = build_index_2d if mesh.dim == 2 else build_index_3d
    return build(mesh, metrics, grid, tolerance=config.tolerance, seed=config.seed)
