from typing import Optional, Sequence

import numpy as np

from geometry.halfspaces import ElementHalfspaces, build_halfspaces
from locating.outcome import LocateOutcome
from mesh.metrics import mesh_tolerance
from mesh.topology import MeshTopology


class BruteForceLocator:
    """Oracle: closed point-in-element tests against every element, lowest id wins."""

    def __init__(self, mesh: MeshTopology, halfspaces: Optional[ElementHalfspaces] = None,
                 tol: Optional[float] = None):
        self.mesh = mesh
        self.halfspaces = halfspaces or build_halfspaces(mesh)
        self.tol = mesh_tolerance(mesh) if tol is None else tol

    def locate_id(self, p: Sequence[float]) -> int:
        return int(self.halfspaces.first_host(np.asarray(p, dtype=float)[None], self.tol)[0])

    def locate(self, p: Sequence[float]) -> LocateOutcome:
        return LocateOutcome(self.locate_id(p))

    def locate_ids(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float).reshape(-1, self.mesh.dim)
        if len(points) == 0:
            return np.empty(0, dtype=np.int64)
        return self.halfspaces.first_host(points, self.tol)

    def containing(self, p: Sequence[float]) -> np.ndarray:
        """Ids of every element whose closed set holds p."""
        values = np.einsum("efd,d->ef", self.halfspaces.normals, np.asarray(p, dtype=float)) - self.halfspaces.offsets
        return np.nonzero(np.all(values <= self.tol, axis=-1))[0]


def brute_force_locate(p: Sequence[float], mesh: MeshTopology,
                       oracle: Optional[BruteForceLocator] = None) -> LocateOutcome:
    """Lowest-id element whose closed set contains p, or Outside."""
    return (oracle or BruteForceLocator(mesh)).locate(p)
