from dataclasses import dataclass
from typing import Tuple

import numpy as np

from utils.errors import DegenerateProjectionError, ZeroVectorError


@dataclass(frozen=True)
class PlaneBasis:
    """Orthonormal frame of the plane through an edge's anchor, orthogonal to the edge."""
    origin: Tuple[float, float, float]
    u: Tuple[float, float, float]
    v: Tuple[float, float, float]
    normal: Tuple[float, float, float]


def basis_from_direction(origin, direction) -> PlaneBasis:
    origin = np.asarray(origin, dtype=float)
    direction = np.asarray(direction, dtype=float)
    length = float(np.linalg.norm(direction))
    if length == 0.0:
        raise ZeroVectorError("edge of zero length has no orthogonal plane")
    normal = direction / length
    helper = np.eye(3)[int(np.argmin(np.abs(normal)))]
    u = helper - np.dot(helper, normal) * normal
    u /= np.linalg.norm(u)
    v = np.cross(normal, u)
    return PlaneBasis(origin=tuple(origin.tolist()), u=tuple(u.tolist()),
                      v=tuple(v.tolist()), normal=tuple(normal.tolist()))


def plane_basis_for_edge(mesh, e: int) -> PlaneBasis:
    """Plane through the edge's first vertex, orthogonal to the edge direction."""
    a, b = mesh.edges[e]
    return basis_from_direction(mesh.vertices[a], mesh.vertices[b] - mesh.vertices[a])


def project_to_plane(vec, basis: PlaneBasis, rel_tol: float = 1e-12) -> Tuple[float, float]:
    """In-plane unit direction of vec; raises when vec is parallel to the edge."""
    x, y, z = float(vec[0]), float(vec[1]), float(vec[2])
    u, v = basis.u, basis.v
    pu = x * u[0] + y * u[1] + z * u[2]
    pv = x * v[0] + y * v[1] + z * v[2]
    norm = (pu * pu + pv * pv) ** 0.5
    if norm <= rel_tol * (x * x + y * y + z * z) ** 0.5 or norm == 0.0:
        raise DegenerateProjectionError("vector is parallel to the edge; its projection vanishes")
    return pu / norm, pv / norm
