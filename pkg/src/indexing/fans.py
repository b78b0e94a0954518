"""Angular fans around vertices (2D) and edges (3D).

A fan stores the ascending pseudo-angles of its rays; sector i spans
[angles[i], angles[i+1]) and sector n-1 wraps around. Each sector carries the
element filling it, or EXTERIOR where the fan opens onto the outside of the
domain. Sector payloads come from the pseudo-angle of each incident element's
centroid, which always lies strictly inside that element's own sector.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from config.config import EXTERIOR
from geometry.plane import PlaneBasis, plane_basis_for_edge, project_to_plane
from geometry.pseudo_angle import pseudo_angle, sector_search
from utils.errors import IndexBuildError, ZeroVectorError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VertexFan:
    vertex: int
    angles: Tuple[float, ...]
    payload: Tuple[int, ...]
    rays: Tuple[int, ...]          # edge id of each ray


@dataclass(frozen=True)
class EdgeFan:
    edge: int
    anchor: int
    basis: PlaneBasis
    angles: Tuple[float, ...]
    payload: Tuple[int, ...]
    rays: Tuple[int, ...]          # far vertex of each ray (e_j = (anchor, rays[j]))


def _sectors(angles: List[float], elements: Iterable[int], element_angle) -> Tuple[Tuple[float, ...], Tuple[int, ...]]:
    payload = [EXTERIOR] * len(angles)
    for k in elements:
        i = sector_search(angles, element_angle(k))
        if payload[i] != EXTERIOR:
            raise IndexBuildError(f"elements {payload[i]} and {k} claim the same fan sector {i}")
        payload[i] = k
    return tuple(angles), tuple(payload)


def _sorted_rays(angles: List[float], rays: List[int]) -> Tuple[List[float], List[int]]:
    order = sorted(range(len(angles)), key=angles.__getitem__)
    angles = [angles[i] for i in order]
    for a, b in zip(angles, angles[1:]):
        if not a < b:
            raise IndexBuildError(f"fan rays share the pseudo-angle {a}")
    return angles, [rays[i] for i in order]


def build_vertex_fan(mesh, vertex: int) -> VertexFan:
    """Rays along the edges at a 2D vertex, sectors mapped to the incident elements."""
    origin = mesh.vertices[vertex]
    angles, rays = [], []
    for e in mesh.vertex_edges[vertex]:
        a, b = mesh.edges[e]
        d = mesh.vertices[b if a == vertex else a] - origin
        try:
            angles.append(pseudo_angle(float(d[0]), float(d[1])))
        except ZeroVectorError as exc:
            raise ZeroVectorError(f"edge {e} at vertex {vertex} has zero length") from exc
        rays.append(int(e))
    angles, rays = _sorted_rays(angles, rays)

    def element_angle(k: int) -> float:
        c = mesh.centroid(k) - origin
        return pseudo_angle(float(c[0]), float(c[1]))

    angles, payload = _sectors(angles, mesh.vertex_elements[vertex], element_angle)
    return VertexFan(vertex=vertex, angles=angles, payload=payload, rays=tuple(rays))


def build_edge_fan(mesh, edge: int, basis: Optional[PlaneBasis] = None) -> EdgeFan:
    """Projected rays on the plane through the edge's first vertex, orthogonal to the edge."""
    anchor, other = (int(v) for v in mesh.edges[edge])
    basis = basis or plane_basis_for_edge(mesh, edge)
    origin = mesh.vertices[anchor]
    far = sorted({v for k in mesh.edge_elements[edge] for v in mesh.elements[k] if v not in (anchor, other)})
    angles = []
    for v in far:
        d = mesh.vertices[v] - origin
        if not np.any(d):
            raise ZeroVectorError(f"edge ({anchor}, {v}) has zero length")
        angles.append(pseudo_angle(*project_to_plane(d, basis)))
    angles, rays = _sorted_rays(angles, far)

    def element_angle(k: int) -> float:
        return pseudo_angle(*project_to_plane(mesh.centroid(k) - origin, basis))

    angles, payload = _sectors(angles, mesh.edge_elements[edge], element_angle)
    return EdgeFan(edge=edge, anchor=anchor, basis=basis, angles=angles, payload=payload, rays=tuple(rays))
