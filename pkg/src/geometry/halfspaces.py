"""Half-space form of convex elements: unit outward facet normals and offsets.

A point p lies in the closed element K (with band tol) iff
n_f . p - c_f <= tol for every facet f of K.
"""
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

# Row layout for scalar tests: (n_x, n_y[, n_z], c)
FacetRow = Tuple[float, ...]


@dataclass(frozen=True)
class ElementHalfspaces:
    normals: np.ndarray  # (n_e, max_facets, dim)
    offsets: np.ndarray  # (n_e, max_facets), padded facets are never violated
    rows: List[List[FacetRow]]

    def contains(self, k: int, p: Sequence[float], tol: float) -> bool:
        if len(p) == 2:
            x, y = p[0], p[1]
            for nx, ny, c in self.rows[k]:
                if nx * x + ny * y - c > tol:
                    return False
            return True
        x, y, z = p[0], p[1], p[2]
        for nx, ny, nz, c in self.rows[k]:
            if nx * x + ny * y + nz * z - c > tol:
                return False
        return True

    def contains_pairs(self, elements: np.ndarray, points: np.ndarray, tol: float) -> np.ndarray:
        """Closed containment of points (P, [m,] dim) in elements (P,)."""
        normals = self.normals[elements]
        offsets = self.offsets[elements]
        if points.ndim == 2:
            values = np.einsum("pfd,pd->pf", normals, points) - offsets
            return np.all(values <= tol, axis=-1)
        values = np.einsum("pfd,pmd->pmf", normals, points) - offsets[:, None, :]
        return np.all(values <= tol, axis=(-1, -2))

    def first_host(self, points: np.ndarray, tol: float, chunk: int = 128) -> np.ndarray:
        """Lowest-id element containing each point, -1 when none does."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        result = np.full(len(points), -1, dtype=np.int64)
        for start in range(0, len(points), chunk):
            block = points[start:start + chunk]
            values = np.einsum("efd,pd->pef", self.normals, block) - self.offsets[None]
            inside = np.all(values <= tol, axis=-1)
            found = inside.any(axis=1)
            result[start:start + chunk] = np.where(found, inside.argmax(axis=1), -1)
        return result


def _outward(normals: np.ndarray, anchors: np.ndarray, centroid: np.ndarray) -> np.ndarray:
    lengths = np.linalg.norm(normals, axis=-1, keepdims=True)
    normals = normals / np.where(lengths > 0.0, lengths, 1.0)
    flip = np.sum(normals * (anchors - centroid[:, None, :]), axis=-1) < 0.0
    return np.where(flip[..., None], -normals, normals)


def build_halfspaces(mesh) -> ElementHalfspaces:
    """Outward facet planes for every element of a 2D polygonal or 3D tetrahedral mesh."""
    n_e = mesh.n_elements
    dim = mesh.dim
    max_facets = max(len(el) for el in mesh.elements) if dim == 2 else 4
    normals = np.zeros((n_e, max_facets, dim))
    offsets = np.ones((n_e, max_facets))

    if dim == 2:
        arities = np.array([len(el) for el in mesh.elements])
        for m in np.unique(arities):
            ids = np.nonzero(arities == m)[0]
            ring = np.array([mesh.elements[k] for k in ids], dtype=np.int64)
            a = mesh.vertices[ring]
            b = np.roll(a, -1, axis=1)
            edge = b - a
            raw = np.stack([edge[..., 1], -edge[..., 0]], axis=-1)
            out = _outward(raw, a, a.mean(axis=1))
            normals[ids, :m] = out
            offsets[ids, :m] = np.sum(out * a, axis=-1)
    else:
        tets = np.asarray(mesh.elements, dtype=np.int64)
        v = mesh.vertices[tets]
        faces = np.array([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])
        f = v[:, faces]  # (n_e, 4, 3, 3)
        raw = np.cross(f[:, :, 1] - f[:, :, 0], f[:, :, 2] - f[:, :, 0])
        out = _outward(raw, f[:, :, 0], v.mean(axis=1))
        normals[:] = out
        offsets[:] = np.sum(out * f[:, :, 0], axis=-1)

    rows: List[List[FacetRow]] = []
    for k in range(n_e):
        count = len(mesh.elements[k]) if dim == 2 else 4
        rows.append([tuple(normals[k, i].tolist()) + (float(offsets[k, i]),) for i in range(count)])
    return ElementHalfspaces(normals=normals, offsets=offsets, rows=rows)
