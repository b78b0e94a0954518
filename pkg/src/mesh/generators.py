"""Structured test meshes: split squares, Kuhn-split cubes and mixed quad/triangle grids."""
import itertools
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from mesh.topology import MeshTopology, build_topology

logger = logging.getLogger(__name__)

DEFAULT_DOMAINS = {2: (0.0, 1.0), 3: (0.0, 1.0)}


def _box(domain: Optional[Sequence], dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """Accept (lo, hi) scalars or (lo_vector, hi_vector)."""
    lo, hi = DEFAULT_DOMAINS[dim] if domain is None else domain
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (dim,)).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (dim,)).copy()
    if np.any(hi <= lo):
        raise ValueError(f"Empty domain box {lo} .. {hi}")
    return lo, hi


def _lattice(lo: np.ndarray, hi: np.ndarray, n: int) -> np.ndarray:
    axes = [np.linspace(lo[d], hi[d], n + 1) for d in range(len(lo))]
    # vertex (i, j[, k]) has id i + (n+1) * (j + (n+1) * k)
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel(order="F") for g in grids], axis=-1)


def _compact(vertices: np.ndarray, elements: List[Tuple[int, ...]]):
    used = np.unique(np.concatenate([np.asarray(el) for el in elements]))
    remap = np.full(len(vertices), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return vertices[used], [tuple(remap[list(el)].tolist()) for el in elements]


def _square_corners(i: int, j: int, n: int) -> Tuple[int, int, int, int]:
    v00 = i + (n + 1) * j
    return v00, v00 + 1, v00 + (n + 1) + 1, v00 + (n + 1)


def generate_structured_mesh(dim: int, domain: Optional[Sequence] = None, n: int = 10,
                             drop_quadrant: bool = False) -> MeshTopology:
    """Uniform grid of n cells per axis; squares split in 2 triangles, cubes in 6 tetrahedra.

    With drop_quadrant (2D, even n) the upper-right quarter is removed, giving an L-shape.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    if drop_quadrant and (dim != 2 or n % 2):
        raise ValueError("drop_quadrant needs a 2D mesh with even n")
    lo, hi = _box(domain, dim)
    vertices = _lattice(lo, hi, n)
    elements: List[Tuple[int, ...]] = []

    if dim == 2:
        half = n // 2
        for j in range(n):
            for i in range(n):
                if drop_quadrant and i >= half and j >= half:
                    continue
                v00, v10, v11, v01 = _square_corners(i, j, n)
                elements.append((v00, v10, v11))
                elements.append((v00, v11, v01))
    else:
        m = n + 1
        offsets = np.eye(3, dtype=np.int64)
        for k in range(n):
            for j in range(n):
                for i in range(n):
                    base = np.array([i, j, k])

                    def vid(c):
                        return int(c[0] + m * (c[1] + m * c[2]))

                    for axes in itertools.permutations(range(3)):
                        c1 = base + offsets[axes[0]]
                        c2 = c1 + offsets[axes[1]]
                        elements.append((vid(base), vid(c1), vid(c2), vid(base + 1)))

    if drop_quadrant:
        vertices, elements = _compact(vertices, elements)
    mesh = build_topology(dim, vertices, elements)
    logger.info(f"Generated structured {dim}D mesh: n={n}, {mesh.n_elements} elements, {mesh.n_vertices} vertices")
    return mesh


def generate_mixed_mesh(n: int, domain: Optional[Sequence] = None) -> MeshTopology:
    """Quad grid where squares with odd i + j are split into two triangles."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    lo, hi = _box(domain, 2)
    vertices = _lattice(lo, hi, n)
    elements: List[Tuple[int, ...]] = []
    for j in range(n):
        for i in range(n):
            v00, v10, v11, v01 = _square_corners(i, j, n)
            if (i + j) % 2 == 0:
                elements.append((v00, v10, v11, v01))
            else:
                elements.append((v00, v10, v11))
                elements.append((v00, v11, v01))
    mesh = build_topology(2, vertices, elements)
    logger.info(f"Generated mixed mesh: n={n}, {mesh.n_elements} elements")
    return mesh
