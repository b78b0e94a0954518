import numpy as np
import pytest

from baselines.aux_grid import CandidateListGrid, aux_grid_locate
from baselines.brute_force import BruteForceLocator, brute_force_locate
from baselines.neighbour_walk import NeighbourWalk, neighbour_walk_locate
from config.config import EXTERIOR
from locating.outcome import OUTSIDE
from utils.errors import WalkCycleError, WalkTieError


@pytest.fixture(scope="module")
def walker(square_mesh):
    return NeighbourWalk(square_mesh)


def test_brute_force_lowest_id(square_mesh):
    oracle = BruteForceLocator(square_mesh)
    assert oracle.locate_id(tuple(square_mesh.centroid(9))) == 9
    assert oracle.locate_id((0.25, 0.25)) == 0
    assert brute_force_locate((2.0, 2.0), square_mesh) == OUTSIDE
    # a point on a diagonal lies in both triangles of its square
    assert oracle.containing((0.1, 0.1)).tolist() == [0, 1]
    assert oracle.locate_ids(np.empty((0, 2))).tolist() == []


def test_walk_counts_crossings(walker):
    # along y = 0.05 the path alternates vertical edges and diagonals
    assert walker.walk(0, (0.1, 0.05), (0.9, 0.05)) == (6, 6)
    assert walker.walk(0, (0.1, 0.05), (0.15, 0.06)) == (0, 0)


def test_walk_leaves_the_domain(walker):
    host, crossings = walker.walk(0, (0.1, 0.05), (1.5, 0.05))
    assert host == EXTERIOR
    assert crossings == 6


def test_walk_through_a_vertex(walker, square_mesh):
    oracle = BruteForceLocator(square_mesh)
    # the segment passes exactly through the vertex (0.25, 0.25)
    end = (0.35, 0.45)
    assert walker.locate_id(0, (0.15, 0.05), end) == oracle.locate_id(end) == 11
    # the element past the vertex is not a facet neighbour of element 0
    assert walker.walk(0, (0.15, 0.05), end) == (11, 1)


def test_walk_leaves_through_a_boundary_corner(walker):
    assert walker.walk(6, (0.9, 0.05), (1.1, -0.05)) == (EXTERIOR, 0)


def test_unresolved_tie_raises(square_mesh):
    walk = NeighbourWalk(square_mesh, tie_retries=0)
    with pytest.raises(WalkTieError, match="corner"):
        walk.walk(0, (0.15, 0.05), (0.35, 0.45))
    with pytest.raises(WalkCycleError):
        walk.walk(0, (0.15, 0.05), (0.35, 0.45))
    # no tie, no retries needed
    assert walk.walk(0, (0.1, 0.05), (0.9, 0.05)) == (6, 6)


def test_walk_matches_oracle_on_random_steps(square_mesh, walker):
    oracle = BruteForceLocator(square_mesh)
    rng = np.random.default_rng(21)
    starts = rng.uniform(0.0, 1.0, size=(300, 2))
    ends = np.clip(starts + rng.normal(scale=0.3, size=(300, 2)), 0.0, 1.0)
    for a, b in zip(starts, ends):
        k0 = oracle.locate_id(a)
        # clipped ends may sit on a corner shared by two triangles
        assert neighbour_walk_locate(k0, tuple(a), tuple(b), square_mesh, walker).element in oracle.containing(b)


def test_walk_on_tetrahedra(cube_mesh):
    walk = NeighbourWalk(cube_mesh)
    oracle = BruteForceLocator(cube_mesh)
    rng = np.random.default_rng(22)
    for a, b in zip(rng.uniform(0, 1, size=(100, 3)), rng.uniform(0, 1, size=(100, 3))):
        assert walk.locate_id(oracle.locate_id(a), tuple(a), tuple(b)) == oracle.locate_id(b)


def test_candidate_lists(square_mesh):
    clg = CandidateListGrid(square_mesh)
    assert all(list(c) == sorted(c) for c in clg.lists)
    oracle = BruteForceLocator(square_mesh)
    for p in np.random.default_rng(23).uniform(-0.2, 1.2, size=(500, 2)):
        expected = oracle.locate_id(p)
        assert clg.locate_id(tuple(p)) == expected
        if expected != EXTERIOR:
            assert expected in clg.candidates(tuple(p))
    assert aux_grid_locate((5.0, 5.0), clg) == OUTSIDE
    assert clg.candidates((5.0, 5.0)) == ()


def test_candidate_grid_spacing(square_mesh):
    clg = CandidateListGrid(square_mesh, spacing=0.1)
    assert clg.grid.s == 0.1
    assert clg.grid.dims == (10, 10)
    assert aux_grid_locate(square_mesh.centroid(5), clg).element == 5


def test_candidate_grid_3d(cube_mesh):
    clg = CandidateListGrid(cube_mesh)
    oracle = BruteForceLocator(cube_mesh)
    for p in np.random.default_rng(24).uniform(0, 1, size=(200, 3)):
        assert clg.locate_id(tuple(p)) == oracle.locate_id(p)
