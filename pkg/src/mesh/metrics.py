"""Element and mesh quality metrics feeding the grid-spacing bounds.

Polygons are measured through their fan triangles (v0, v_i, v_{i+1}).
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from config.config import DEGENERATE_FACTOR, TOLERANCE_FACTOR, W_STAR_FACTOR
from mesh.topology import TET_FACES, MeshTopology
from utils.errors import DegenerateElementError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeshMetrics:
    dim: int
    h: float
    w: float
    rho: float
    alpha: float
    l_min: float
    w_star: float

    @property
    def threshold(self) -> float:
        """Patch-membership distance w*/(1 + sin alpha) used by the 3D edge tests."""
        return self.w_star / (1.0 + math.sin(self.alpha))

    @property
    def quasi_uniformity(self) -> float:
        """h / rho; diagnostic only."""
        return self.h / self.rho


def _fan_triangles(mesh: MeshTopology) -> Tuple[np.ndarray, np.ndarray]:
    """Fan triangles of all 2D elements as (owner ids, (T, 3, 2) coordinates)."""
    owners, tris = [], []
    for k, ring in enumerate(mesh.elements):
        for i in range(1, len(ring) - 1):
            owners.append(k)
            tris.append((ring[0], ring[i], ring[i + 1]))
    return np.array(owners, dtype=np.int64), mesh.vertices[np.array(tris, dtype=np.int64)]


def _triangle_quantities(tri: np.ndarray):
    """Area, circumdiameter, inradius, width and the three angles of each triangle."""
    a = np.linalg.norm(tri[:, 1] - tri[:, 2], axis=-1)
    b = np.linalg.norm(tri[:, 2] - tri[:, 0], axis=-1)
    c = np.linalg.norm(tri[:, 0] - tri[:, 1], axis=-1)
    u = tri[:, 1] - tri[:, 0]
    v = tri[:, 2] - tri[:, 0]
    if tri.shape[-1] == 2:
        area = 0.5 * np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
    else:
        area = 0.5 * np.linalg.norm(np.cross(u, v), axis=-1)
    safe = np.where(area > 0.0, area, np.inf)
    diameter = a * b * c / (2.0 * safe)
    inradius = 2.0 * area / (a + b + c)
    width = 2.0 * area / np.maximum(np.maximum(a, b), c)

    def corner(opposite, s1, s2):
        return np.arccos(np.clip((s1 ** 2 + s2 ** 2 - opposite ** 2) / (2.0 * s1 * s2), -1.0, 1.0))

    angles = np.stack([corner(a, b, c), corner(b, c, a), corner(c, a, b)], axis=-1)
    return area, diameter, inradius, width, angles


def _tet_quantities(tet: np.ndarray):
    """Volume, circumdiameter, inradius, width and minimum angle of each tetrahedron."""
    a = tet[:, 1] - tet[:, 0]
    b = tet[:, 2] - tet[:, 0]
    c = tet[:, 3] - tet[:, 0]
    det = np.einsum("ij,ij->i", np.cross(a, b), c)
    volume = np.abs(det) / 6.0
    safe_det = np.where(det != 0.0, det, np.inf)

    numerator = (np.sum(a * a, axis=-1)[:, None] * np.cross(b, c)
                 + np.sum(b * b, axis=-1)[:, None] * np.cross(c, a)
                 + np.sum(c * c, axis=-1)[:, None] * np.cross(a, b))
    diameter = np.linalg.norm(numerator, axis=-1) / np.abs(safe_det)

    faces = tet[:, np.array(TET_FACES)]  # (n, 4, 3, 3)
    normals = np.cross(faces[:, :, 1] - faces[:, :, 0], faces[:, :, 2] - faces[:, :, 0])
    face_areas = 0.5 * np.linalg.norm(normals, axis=-1)
    inradius = 3.0 * volume / face_areas.sum(axis=-1)

    heights = 3.0 * volume[:, None] / np.where(face_areas > 0.0, face_areas, np.inf)
    pair_dists = []
    for (i, j), (k, l) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))):
        d1 = tet[:, j] - tet[:, i]
        d2 = tet[:, l] - tet[:, k]
        cross = np.cross(d1, d2)
        norm = np.linalg.norm(cross, axis=-1)
        dist = np.abs(np.einsum("ij,ij->i", tet[:, k] - tet[:, i], cross)) / np.where(norm > 0.0, norm, np.inf)
        pair_dists.append(np.where(norm > 0.0, dist, np.inf))
    width = np.minimum(heights.min(axis=-1), np.min(np.stack(pair_dists, axis=-1), axis=-1))

    # outward unit normals, face i opposite vertex i
    unit = normals / np.where(face_areas > 0.0, 2.0 * face_areas, 1.0)[..., None]
    side = np.einsum("nfk,nfk->nf", unit, tet - faces[:, :, 0])
    unit = np.where((side > 0.0)[..., None], -unit, unit)
    dihedral = []
    for i, j in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
        cos = -np.einsum("nk,nk->n", unit[:, i], unit[:, j])
        dihedral.append(np.arccos(np.clip(cos, -1.0, 1.0)))
    _, _, _, _, face_angles = _triangle_quantities(faces.reshape(-1, 3, 3))
    min_face_angle = face_angles.reshape(len(tet), -1).min(axis=-1)
    min_angle = np.minimum(np.min(np.stack(dihedral, axis=-1), axis=-1), min_face_angle)
    return volume, diameter, inradius, width, min_angle


def element_measures(mesh: MeshTopology) -> np.ndarray:
    """Area (2D) or volume (3D) of every element."""
    if mesh.dim == 3:
        volume, *_ = _tet_quantities(mesh.vertices[np.asarray(mesh.elements, dtype=np.int64)])
        return volume
    owners, tris = _fan_triangles(mesh)
    area, *_ = _triangle_quantities(tris)
    return np.bincount(owners, weights=area, minlength=mesh.n_elements)


def element_diameters(mesh: MeshTopology) -> np.ndarray:
    """Circumdiameter h_K of every element (largest fan-triangle value for polygons)."""
    if mesh.dim == 3:
        _, diameter, *_ = _tet_quantities(mesh.vertices[np.asarray(mesh.elements, dtype=np.int64)])
        return diameter
    owners, tris = _fan_triangles(mesh)
    _, diameter, *_ = _triangle_quantities(tris)
    out = np.zeros(mesh.n_elements)
    np.maximum.at(out, owners, diameter)
    return out


def _size_scale(mesh: MeshTopology) -> float:
    # circumdiameters blow up on degenerate elements, so edge lengths set the scale
    lengths = np.linalg.norm(mesh.vertices[mesh.edges[:, 1]] - mesh.vertices[mesh.edges[:, 0]], axis=-1)
    return float(lengths.max())


def check_degenerate(mesh: MeshTopology, measures: Optional[np.ndarray] = None) -> None:
    measures = element_measures(mesh) if measures is None else measures
    limit = DEGENERATE_FACTOR * _size_scale(mesh) ** mesh.dim
    bad = np.nonzero(measures < limit)[0]
    if len(bad):
        raise DegenerateElementError(int(bad[0]), float(measures[bad[0]]))


def _single_element(mesh: MeshTopology, k: int):
    """(measure, circumdiameter) of one element, rejecting degenerate ones."""
    coords = mesh.vertices[list(mesh.elements[k])]
    if mesh.dim == 3:
        volume, diameter, *_ = _tet_quantities(coords[None])
        measure = float(volume[0])
    else:
        tris = np.stack([coords[[0, i, i + 1]] for i in range(1, len(coords) - 1)])
        area, diameter, *_ = _triangle_quantities(tris)
        measure = float(area.sum())
    if measure < DEGENERATE_FACTOR * _size_scale(mesh) ** mesh.dim:
        raise DegenerateElementError(k, measure)
    return measure, float(diameter.max())


def element_measure(mesh: MeshTopology, k: int) -> float:
    """Area or volume of element k."""
    return _single_element(mesh, k)[0]


def element_diameter_h_K(mesh: MeshTopology, k: int) -> float:
    """Circumdiameter of element k."""
    return _single_element(mesh, k)[1]


def resolve_w_star(dim: int, w: float, l_min: float, w_star: Optional[float] = None,
                   w_star_margin: Optional[float] = None) -> float:
    """Working patch radius: default W_STAR_FACTOR of the admissible limit, or an override."""
    limit = w if dim == 2 else min(w, 0.5 * l_min)
    if w_star is not None:
        value = w_star
    elif w_star_margin is not None:
        value = limit - w_star_margin
    else:
        value = W_STAR_FACTOR * limit
    if not 0.0 < value < limit:
        raise ValueError(f"w* = {value:.6g} must lie in (0, {limit:.6g})")
    return value


def compute_metrics(mesh: MeshTopology, w_star: Optional[float] = None,
                    w_star_margin: Optional[float] = None) -> MeshMetrics:
    """Mesh size h, width w, inradius rho, minimum angle alpha, shortest edge and w*."""
    if mesh.dim == 3:
        tets = mesh.vertices[np.asarray(mesh.elements, dtype=np.int64)]
        measure, diameter, inradius, width, min_angle = _tet_quantities(tets)
        check_degenerate(mesh, measure)
        alpha = float(min_angle.min())
    else:
        owners, tris = _fan_triangles(mesh)
        area, diameter, inradius, width, angles = _triangle_quantities(tris)
        check_degenerate(mesh, np.bincount(owners, weights=area, minlength=mesh.n_elements))
        alpha = float(angles.min())

    lengths = np.linalg.norm(mesh.vertices[mesh.edges[:, 1]] - mesh.vertices[mesh.edges[:, 0]], axis=-1)
    h, w, rho, l_min = float(diameter.max()), float(width.min()), float(inradius.min()), float(lengths.min())
    metrics = MeshMetrics(
        dim=mesh.dim, h=h, w=w, rho=rho, alpha=alpha, l_min=l_min,
        w_star=resolve_w_star(mesh.dim, w, l_min, w_star, w_star_margin),
    )
    logger.info(
        f"Metrics: h={h:.6g} w={w:.6g} rho={rho:.6g} alpha={math.degrees(alpha):.3f}deg "
        f"l_min={l_min:.6g} w*={metrics.w_star:.6g} h/rho={metrics.quasi_uniformity:.3g}"
    )
    return metrics


def mesh_tolerance(mesh: MeshTopology) -> float:
    """Default boundary band TOLERANCE_FACTOR * h."""
    return TOLERANCE_FACTOR * float(element_diameters(mesh).max())
