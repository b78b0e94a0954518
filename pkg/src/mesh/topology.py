"""Immutable mesh topology with every incidence map the locators need.

Facets are edges in 2D and triangular faces in 3D. Local facet i of an
element is the edge (v_i, v_{i+1}) of its ring in 2D and the face opposite
vertex i in 3D; `neighbors` and the half-space table use the same order.
"""
import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from utils.errors import NonConformingMeshError, NonConvexPolygonError, UnsupportedElementError

logger = logging.getLogger(__name__)

Incidence = Tuple[Tuple[int, ...], ...]

# Local edges and faces of a tetrahedron (face i is opposite vertex i)
TET_EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
TET_FACES = ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))


@dataclass(frozen=True)
class MeshTopology:
    dim: int
    vertices: np.ndarray                 # (n_v, dim)
    elements: Incidence                  # N_K, positively oriented
    edges: np.ndarray                    # (n_edges, 2), lower index first, lexicographic
    faces: np.ndarray                    # (n_faces, 3) sorted triples; empty in 2D
    element_edges: Incidence
    element_faces: np.ndarray            # (n_e, 4); empty in 2D
    vertex_elements: Incidence           # T_nu
    vertex_edges: Incidence              # E_nu
    edge_elements: Incidence             # T_e
    facet_elements: np.ndarray           # (n_facets, 2), -1 on the boundary side
    neighbors: np.ndarray                # (n_e, max_facets), -1 across boundary or padding
    boundary_vertices: np.ndarray
    boundary_edges: np.ndarray
    boundary_faces: np.ndarray

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def facets(self) -> np.ndarray:
        return self.edges if self.dim == 2 else self.faces

    @property
    def boundary_facets(self) -> np.ndarray:
        return self.boundary_edges if self.dim == 2 else self.boundary_faces

    @property
    def face_elements(self) -> np.ndarray:
        """T_f as an (n_faces, 2) array; 3D only."""
        return self.facet_elements if self.dim == 3 else np.empty((0, 2), dtype=np.int64)

    def element_vertices(self, k: int) -> Tuple[int, ...]:
        return self.elements[k]

    def edge_vertices(self, e: int) -> Tuple[int, int]:
        a, b = self.edges[e]
        return int(a), int(b)

    def element_coordinates(self, k: int) -> np.ndarray:
        return self.vertices[list(self.elements[k])]

    def centroid(self, k: int) -> np.ndarray:
        return self.element_coordinates(k).mean(axis=0)

    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        used = self.vertices[np.unique(np.concatenate([np.asarray(el) for el in self.elements]))]
        return used.min(axis=0), used.max(axis=0)


def _group(keys: np.ndarray, values: np.ndarray, n: int) -> Incidence:
    """Values grouped by key, each group sorted ascending."""
    order = np.lexsort((values, keys))
    counts = np.bincount(keys, minlength=n)
    groups = np.split(values[order], np.cumsum(counts)[:-1])
    return tuple(tuple(g.tolist()) for g in groups)


def _signed_measures(vertices: np.ndarray, elements: Sequence[Sequence[int]], dim: int) -> np.ndarray:
    if dim == 3:
        v = vertices[np.asarray(elements, dtype=np.int64)]
        return np.einsum("ij,ij->i", np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), v[:, 3] - v[:, 0]) / 6.0
    areas = np.empty(len(elements))
    for k, ring in enumerate(elements):
        xy = vertices[list(ring)]
        x, y = xy[:, 0], xy[:, 1]
        areas[k] = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    return areas


def _check_convex(vertices: np.ndarray, ring: Sequence[int], k: int) -> None:
    """Left turns only, winding exactly once around."""
    xy = vertices[list(ring)]
    d1 = np.roll(xy, -1, axis=0) - xy
    d2 = np.roll(d1, -1, axis=0)
    turns = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    total = np.arctan2(turns, np.einsum("ij,ij->i", d1, d2)).sum()
    if np.any(turns < 0.0) or abs(total - 2.0 * np.pi) > 1e-9:
        raise NonConvexPolygonError(f"Element {k} is not a convex polygon (turning sum {total:.6g})")


def _normalize_elements(vertices: np.ndarray, elements: Sequence[Sequence[int]], dim: int):
    n_v = len(vertices)
    normalized = []
    for k, el in enumerate(elements):
        el = [int(v) for v in el]
        if dim == 3 and len(el) != 4:
            raise UnsupportedElementError(f"Element {k} has {len(el)} vertices; 3D meshes must be tetrahedral")
        if dim == 2 and len(el) < 3:
            raise UnsupportedElementError(f"Element {k} has {len(el)} vertices; polygons need at least 3")
        if len(set(el)) != len(el):
            raise NonConformingMeshError(f"Element {k} repeats a vertex: {el}")
        if min(el) < 0 or max(el) >= n_v:
            raise NonConformingMeshError(f"Element {k} references a vertex outside [0, {n_v})")
        normalized.append(el)

    signed = _signed_measures(vertices, normalized, dim)
    flipped = 0
    for k in np.nonzero(signed < 0.0)[0]:
        el = normalized[k]
        normalized[k] = [el[0], el[1], el[3], el[2]] if dim == 3 else el[::-1]
        flipped += 1
    if flipped:
        logger.debug(f"Reoriented {flipped} elements to positive orientation")
    if dim == 2:
        for k, ring in enumerate(normalized):
            if len(ring) > 3:
                _check_convex(vertices, ring, k)
    return tuple(tuple(el) for el in normalized)


def _local_edges(elements: Incidence, dim: int):
    """(element id, vertex a, vertex b) for every local edge, in local order."""
    owners, a, b = [], [], []
    for k, el in enumerate(elements):
        pairs = TET_EDGES if dim == 3 else [(i, (i + 1) % len(el)) for i in range(len(el))]
        for i, j in pairs:
            owners.append(k)
            a.append(el[i])
            b.append(el[j])
    return np.array(owners, dtype=np.int64), np.array(a, dtype=np.int64), np.array(b, dtype=np.int64)


def _pair_table(keys: np.ndarray, owners: np.ndarray, n: int, what: str) -> np.ndarray:
    counts = np.bincount(keys, minlength=n)
    if np.any(counts > 2):
        bad = int(np.argmax(counts > 2))
        raise NonConformingMeshError(f"{what} {bad} is shared by {int(counts[bad])} elements")
    table = np.full((n, 2), -1, dtype=np.int64)
    order = np.lexsort((owners, keys))
    sorted_keys, sorted_owners = keys[order], owners[order]
    first = np.ones(len(sorted_keys), dtype=bool)
    first[1:] = sorted_keys[1:] != sorted_keys[:-1]
    table[sorted_keys[first], 0] = sorted_owners[first]
    table[sorted_keys[~first], 1] = sorted_owners[~first]
    return table


def _freeze(*arrays: np.ndarray) -> None:
    for arr in arrays:
        arr.setflags(write=False)


def build_topology(dim: int, vertices, elements: Sequence[Sequence[int]]) -> MeshTopology:
    """Validate, orient and index a mesh given as coordinates plus element vertex lists."""
    if dim not in (2, 3):
        raise UnsupportedElementError(f"Unsupported mesh dimension {dim}")
    vertices = np.array(vertices, dtype=float).reshape(-1, dim)
    if len(elements) == 0:
        raise NonConformingMeshError("Mesh has no elements")
    elems = _normalize_elements(vertices, elements, dim)
    n_v, n_e = len(vertices), len(elems)

    owners, a, b = _local_edges(elems, dim)
    pairs = np.stack([np.minimum(a, b), np.maximum(a, b)], axis=1)
    edges, edge_of_local = np.unique(pairs, axis=0, return_inverse=True)
    edge_of_local = edge_of_local.reshape(-1)
    n_edges = len(edges)

    element_edges = []
    start = 0
    for el in elems:
        count = 6 if dim == 3 else len(el)
        element_edges.append(tuple(edge_of_local[start:start + count].tolist()))
        start += count
    edge_elements = _group(edge_of_local, owners, n_edges)

    max_facets = 4 if dim == 3 else max(len(el) for el in elems)
    neighbors = np.full((n_e, max_facets), -1, dtype=np.int64)

    if dim == 2:
        facet_elements = _pair_table(edge_of_local, owners, n_edges, "Edge")
        boundary_edges = facet_elements[:, 1] < 0
        faces = np.empty((0, 3), dtype=np.int64)
        element_faces = np.empty((0, 4), dtype=np.int64)
        boundary_faces = np.zeros(0, dtype=bool)
        for k, local in enumerate(element_edges):
            for i, e in enumerate(local):
                pair = facet_elements[e]
                neighbors[k, i] = pair[1] if pair[0] == k else pair[0]
        boundary_vertices = np.zeros(n_v, dtype=bool)
        boundary_vertices[edges[boundary_edges].reshape(-1)] = True
    else:
        tets = np.asarray(elems, dtype=np.int64)
        local_faces = np.sort(tets[:, np.array(TET_FACES)], axis=-1)  # (n_e, 4, 3)
        faces, face_of_local = np.unique(local_faces.reshape(-1, 3), axis=0, return_inverse=True)
        face_of_local = face_of_local.reshape(-1)
        element_faces = face_of_local.reshape(n_e, 4)
        face_owners = np.repeat(np.arange(n_e, dtype=np.int64), 4)
        facet_elements = _pair_table(face_of_local, face_owners, len(faces), "Face")
        boundary_faces = facet_elements[:, 1] < 0
        pair = facet_elements[element_faces]  # (n_e, 4, 2)
        own = np.arange(n_e)[:, None]
        neighbors[:] = np.where(pair[..., 0] == own, pair[..., 1], pair[..., 0])
        boundary_vertices = np.zeros(n_v, dtype=bool)
        boundary_vertices[faces[boundary_faces].reshape(-1)] = True
        bface = faces[boundary_faces]
        bpairs = np.concatenate([bface[:, [0, 1]], bface[:, [0, 2]], bface[:, [1, 2]]])
        boundary_edges = np.zeros(n_edges, dtype=bool)
        if len(bpairs):
            lookup = {tuple(p): i for i, p in enumerate(edges.tolist())}
            boundary_edges[[lookup[tuple(p)] for p in bpairs.tolist()]] = True

    vertex_keys = np.concatenate([np.asarray(el, dtype=np.int64) for el in elems])
    vertex_owners = np.repeat(np.arange(n_e, dtype=np.int64), [len(el) for el in elems])
    vertex_elements = _group(vertex_keys, vertex_owners, n_v)
    edge_ids = np.arange(n_edges, dtype=np.int64)
    vertex_edges = _group(edges.reshape(-1), np.repeat(edge_ids, 2), n_v)

    unused = sum(1 for t in vertex_elements if not t)
    if unused:
        logger.warning(f"{unused} vertices belong to no element")

    edges = edges.astype(np.int64)
    faces = faces.astype(np.int64)
    _freeze(vertices, edges, faces, element_faces, facet_elements, neighbors,
            boundary_vertices, boundary_edges, boundary_faces)
    logger.debug(f"Topology: {n_v} vertices, {n_e} elements, {n_edges} edges, {len(faces)} faces")
    return MeshTopology(
        dim=dim,
        vertices=vertices,
        elements=elems,
        edges=edges,
        faces=faces,
        element_edges=tuple(element_edges),
        element_faces=element_faces,
        vertex_elements=vertex_elements,
        vertex_edges=vertex_edges,
        edge_elements=edge_elements,
        facet_elements=facet_elements,
        neighbors=neighbors,
        boundary_vertices=boundary_vertices,
        boundary_edges=boundary_edges,
        boundary_faces=boundary_faces,
    )
