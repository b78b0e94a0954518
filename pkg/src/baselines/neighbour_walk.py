"""Neighbour-walk locator: follow the trajectory from a known host facet by facet."""
import logging
from typing import List, Optional, Sequence, Set, Tuple

from config.config import EXTERIOR
from config.locator_config import WALK_SETTINGS
from geometry.halfspaces import ElementHalfspaces, build_halfspaces
from locating.outcome import LocateOutcome
from mesh.metrics import mesh_tolerance
from mesh.topology import TET_FACES, MeshTopology
from utils.errors import WalkCycleError, WalkTieError

logger = logging.getLogger(__name__)


class NeighbourWalk:
    def __init__(self, mesh: MeshTopology, halfspaces: Optional[ElementHalfspaces] = None,
                 tol: Optional[float] = None, tie_epsilon: Optional[float] = None,
                 tie_retries: Optional[int] = None):
        self.mesh = mesh
        self.halfspaces = halfspaces or build_halfspaces(mesh)
        self.tol = mesh_tolerance(mesh) if tol is None else tol
        self.neighbors = mesh.neighbors.tolist()
        self.tie_epsilon = WALK_SETTINGS["tie_epsilon"] if tie_epsilon is None else tie_epsilon
        self.tie_retries = WALK_SETTINGS["tie_retries"] if tie_retries is None else tie_retries

    def _exits(self, k: int, p0: Sequence[float], d: Sequence[float]):
        """(t, local facet) for each facet of k the segment leaves through."""
        exits = []
        for i, row in enumerate(self.halfspaces.rows[k]):
            *n, c = row
            nd = sum(a * b for a, b in zip(n, d))
            if nd > 0.0:
                exits.append(((c - sum(a * b for a, b in zip(n, p0))) / nd, i))
        return exits

    def _facet_vertices(self, k: int, i: int) -> Set[int]:
        el = self.mesh.elements[k]
        if self.mesh.dim == 2:
            return {el[i], el[(i + 1) % len(el)]}
        return {el[j] for j in TET_FACES[i]}

    def _break_tie(self, k: int, tied, t: float, p0, d) -> int:
        """Element holding a point just past the corner shared by the tied facets.

        Neighbours across the tied facets are tried first, then the rest of the
        corner's vertex star, with a strict containment test. EXTERIOR when the
        walk leaves the domain at the corner.
        """
        across = [self.neighbors[k][i] for _, i in tied]
        shared = set.intersection(*(self._facet_vertices(k, i) for _, i in tied))
        star = sorted({int(nb) for v in shared for nb in self.mesh.vertex_elements[v]} - {k} - set(across))
        candidates: List[int] = [nb for nb in across if nb != EXTERIOR] + star
        for attempt in range(1, self.tie_retries + 1):
            step = t + self.tie_epsilon * attempt
            past = [a + step * b for a, b in zip(p0, d)]
            for nb in candidates:
                if self.halfspaces.contains(nb, past, 0.0):
                    return nb
        if EXTERIOR in across:
            return EXTERIOR
        raise WalkTieError(
            f"element {k}: no element past the corner {sorted(shared)} at t={t!r} "
            f"after {self.tie_retries} retries (facets {[i for _, i in tied]})"
        )

    def walk(self, start_element: int, p_start: Sequence[float], p_end: Sequence[float]) -> Tuple[int, int]:
        """(host id or -1, facet crossings) for the walk from p_start to p_end."""
        p0 = [float(x) for x in p_start]
        p1 = [float(x) for x in p_end]
        d = [b - a for a, b in zip(p0, p1)]
        k = start_element
        crossings = 0
        for _ in range(self.mesh.n_elements):
            if self.halfspaces.contains(k, p1, self.tol):
                return k, crossings
            exits = self._exits(k, p0, d)
            if not exits:
                raise WalkCycleError(f"walk stalled in element {k} without an exit facet")
            exits.sort()
            t = exits[0][0]
            tied = [x for x in exits if x[0] - t <= self.tie_epsilon]
            nb = self.neighbors[k][exits[0][1]] if len(tied) == 1 else self._break_tie(k, tied, t, p0, d)
            if nb == EXTERIOR:
                return EXTERIOR, crossings
            k = nb
            crossings += 1
        raise WalkCycleError(
            f"walk from element {start_element} exceeded {self.mesh.n_elements} visits "
            f"({tuple(p0)} -> {tuple(p1)})"
        )

    def locate_id(self, start_element: int, p_start: Sequence[float], p_end: Sequence[float]) -> int:
        return self.walk(start_element, p_start, p_end)[0]


def neighbour_walk_locate(start_element: int, p_start: Sequence[float], p_end: Sequence[float],
                          mesh: MeshTopology, walker: Optional[NeighbourWalk] = None) -> LocateOutcome:
    """Host of p_end found by walking from start_element along p_start -> p_end."""
    return LocateOutcome((walker or NeighbourWalk(mesh)).locate_id(start_element, p_start, p_end))
