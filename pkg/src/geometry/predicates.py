"""Point-in-element classification for triangles, tetrahedra and convex polygons."""
from enum import Enum
from typing import Sequence

import numpy as np

from utils.errors import DegenerateElementError, NonConvexPolygonError

_DEGENERATE = 1e-300


class Containment(str, Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def _classify(distances: Sequence[float], tol: float) -> Containment:
    # distances are signed, positive towards the element interior
    if min(distances) < -tol:
        return Containment.OUTSIDE
    if min(distances) <= tol:
        return Containment.BOUNDARY
    return Containment.INSIDE


def point_in_triangle(p, a, b, c, tol: float = 0.0) -> Containment:
    """Classify p against the closed triangle abc with a boundary band of width tol."""
    ax, ay = a[0], a[1]
    bx, by = b[0], b[1]
    cx, cy = c[0], c[1]
    px, py = p[0], p[1]
    area2 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if abs(area2) <= _DEGENERATE:
        raise DegenerateElementError(None, 0.5 * abs(area2))
    orient = 1.0 if area2 > 0 else -1.0
    distances = []
    for (ux, uy), (vx, vy) in (((ax, ay), (bx, by)), ((bx, by), (cx, cy)), ((cx, cy), (ax, ay))):
        length = ((vx - ux) ** 2 + (vy - uy) ** 2) ** 0.5
        cross = (vx - ux) * (py - uy) - (vy - uy) * (px - ux)
        distances.append(orient * cross / length)
    return _classify(distances, tol)


def point_in_tetrahedron(p, a, b, c, d, tol: float = 0.0) -> Containment:
    """Classify p against the closed tetrahedron abcd using four signed-volume tests."""
    verts = np.array([a, b, c, d], dtype=float)
    point = np.asarray(p, dtype=float)
    vol6 = np.dot(np.cross(verts[1] - verts[0], verts[2] - verts[0]), verts[3] - verts[0])
    if abs(vol6) <= _DEGENERATE:
        raise DegenerateElementError(None, abs(vol6) / 6.0)
    distances = []
    for i in range(4):
        f = [verts[j] for j in range(4) if j != i]
        normal = np.cross(f[1] - f[0], f[2] - f[0])
        norm = np.linalg.norm(normal)
        # orient the face normal towards the opposite vertex
        side = np.dot(normal, verts[i] - f[0])
        if side < 0:
            normal = -normal
        distances.append(float(np.dot(normal, point - f[0]) / norm))
    return _classify(distances, tol)


def point_in_convex_polygon(p, ring, tol: float = 0.0) -> Containment:
    """Classify p against a convex counterclockwise vertex ring."""
    pts = [(float(v[0]), float(v[1])) for v in ring]
    n = len(pts)
    if n < 3:
        raise NonConvexPolygonError(f"polygon ring needs at least 3 vertices, got {n}")
    px, py = float(p[0]), float(p[1])
    distances = []
    for i in range(n):
        ux, uy = pts[i]
        vx, vy = pts[(i + 1) % n]
        wx, wy = pts[(i + 2) % n]
        turn = (vx - ux) * (wy - vy) - (vy - uy) * (wx - vx)
        if turn < 0:
            raise NonConvexPolygonError(f"ring turns clockwise at vertex {(i + 1) % n}")
        length = ((vx - ux) ** 2 + (vy - uy) ** 2) ** 0.5
        if length <= _DEGENERATE:
            raise DegenerateElementError(None, 0.0)
        distances.append(((vx - ux) * (py - uy) - (vy - uy) * (px - ux)) / length)
    return _classify(distances, tol)
