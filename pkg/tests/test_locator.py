import numpy as np
import pytest

from config.config import EXTERIOR
from indexing.builder import build_index
from locating.locator import locate, locate_batch, locate_id, locate_ids
from locating.outcome import OUTSIDE, LocateOutcome
from mesh.generators import generate_mixed_mesh, generate_structured_mesh
from utils.errors import DegenerateProjectionError
from conftest import cell_samples, oracle_for


def _assert_matches_oracle(index, points):
    """Same inside/outside verdict as the oracle; inside answers hold the point in the closed element."""
    oracle = oracle_for(index)
    found = locate_ids(points, index)
    expected = oracle.locate_ids(points)
    assert np.array_equal(found == EXTERIOR, expected == EXTERIOR)
    for p, k in zip(points, found):
        if k != EXTERIOR:
            assert index.halfspaces.contains(int(k), tuple(p), index.tol)
    return found, expected


def test_random_points_2d(square_index):
    points = np.random.default_rng(1).uniform(-0.2, 1.2, size=(20_000, 2))
    found, expected = _assert_matches_oracle(square_index, points)
    # off the mesh lines the host is unique
    assert np.array_equal(found, expected)


def test_mixed_mesh_points(mixed_index):
    points = np.random.default_rng(2).uniform(-0.1, 1.1, size=(10_000, 2))
    found, expected = _assert_matches_oracle(mixed_index, points)
    assert np.array_equal(found, expected)


def test_l_shape_notch_is_outside(l_shape_index):
    points = np.random.default_rng(3).uniform(0.0, 1.0, size=(5_000, 2))
    found, _ = _assert_matches_oracle(l_shape_index, points)
    notch = np.all(points > 0.5, axis=1)
    assert np.all(found[notch] == EXTERIOR)
    assert np.all(found[~notch] != EXTERIOR)


def test_centroids_locate_their_element(square_index, cube_index, mixed_index):
    for index in (square_index, cube_index, mixed_index):
        for k in range(0, index.mesh.n_elements, 7):
            assert locate_id(tuple(index.mesh.centroid(k)), index) == k


def test_vertices_and_edge_midpoints(coarse_square_index):
    mesh = coarse_square_index.mesh
    for v in range(mesh.n_vertices):
        k = locate_id(tuple(mesh.vertices[v]), coarse_square_index)
        assert k in mesh.vertex_elements[v]
    for e in range(mesh.n_edges):
        a, b = mesh.edges[e]
        k = locate_id(tuple(0.5 * (mesh.vertices[a] + mesh.vertices[b])), coarse_square_index)
        assert k in mesh.edge_elements[e]


@pytest.mark.parametrize("point", [(-5.0, 0.5), (0.5, 7.0), (1.0 + 1e-6, 0.5), (-1e-6, -1e-6)])
def test_outside_points(coarse_square_index, point):
    assert locate(point, coarse_square_index) == OUTSIDE


def test_random_points_3d(cube_index):
    points = np.random.default_rng(4).uniform(-0.1, 1.1, size=(5_000, 3))
    found, expected = _assert_matches_oracle(cube_index, points)
    assert np.array_equal(found, expected)


def _near_vertex_points(index, count, seed):
    """Points within w*/10 of random mesh vertices."""
    rng = np.random.default_rng(seed)
    mesh = index.mesh
    vertices = mesh.vertices[rng.integers(0, mesh.n_vertices, count)]
    directions = rng.normal(size=(count, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = rng.uniform(0.0, index.metrics.w_star / 10.0, count)[:, None]
    return vertices + radii * directions


def test_points_near_vertices_3d(cube_index):
    """Queries within w*/10 of a vertex go through the moving step."""
    _assert_matches_oracle(cube_index, _near_vertex_points(cube_index, 1_000, 5))


def test_degenerate_projection_is_confirmed(cube_index, monkeypatch):
    """A fan answer that skips the sector search is still checked in boundary cells."""
    calls = []

    def degenerate(vector, basis):
        calls.append(vector)
        raise DegenerateProjectionError("query on the anchor edge")

    monkeypatch.setattr("locating.locator.project_to_plane", degenerate)
    table, oracle = cube_index.table, oracle_for(cube_index)
    cells = np.flatnonzero(table.boundary & table.active & (table.host < 0))
    outside = [p for cell in cells for p in cell_samples(cube_index.grid, int(cell))
               if oracle.locate_id(p) == EXTERIOR]
    assert outside
    assert all(locate_id(tuple(p), cube_index) == EXTERIOR for p in outside)
    assert calls


def test_cube_vertices_and_edge_midpoints(cube_index):
    mesh = cube_index.mesh
    for v in range(mesh.n_vertices):
        assert locate_id(tuple(mesh.vertices[v]), cube_index) in mesh.vertex_elements[v]
    for e in range(mesh.n_edges):
        a, b = mesh.edges[e]
        p = tuple(0.5 * (mesh.vertices[a] + mesh.vertices[b]))
        assert locate_id(p, cube_index) in mesh.edge_elements[e]


def test_batch_matches_single_calls(coarse_square_index):
    points = np.random.default_rng(6).uniform(-0.1, 1.1, size=(500, 2))
    batch = locate_batch(points, coarse_square_index)
    assert batch == [locate(p, coarse_square_index) for p in points]
    assert locate_batch(points, coarse_square_index, workers=4) == batch
    assert locate_batch(np.empty((0, 2)), coarse_square_index) == []


def test_locate_outcome():
    assert LocateOutcome.inside(3).is_inside
    assert LocateOutcome.outside() is OUTSIDE
    assert OUTSIDE.is_outside
    assert str(LocateOutcome(5)) == "Inside(5)"
    assert str(OUTSIDE) == "Outside"


def test_shifted_domain():
    index = build_index(generate_structured_mesh(2, domain=(-1.0, 1.0), n=8))
    points = np.random.default_rng(8).uniform(-1.2, 1.2, size=(3_000, 2))
    found, expected = _assert_matches_oracle(index, points)
    assert np.array_equal(found, expected)


@pytest.mark.slow
def test_large_oracle_sweep_2d():
    index = build_index(generate_structured_mesh(2, n=20))
    points = np.random.default_rng(9).uniform(0.0, 1.0, size=(100_000, 2))
    found, _ = _assert_matches_oracle(index, points)
    assert np.all(found != EXTERIOR)


@pytest.mark.slow
def test_large_oracle_sweep_3d(fine_cube_index):
    points = np.random.default_rng(10).uniform(0.0, 1.0, size=(10_000, 3))
    found, _ = _assert_matches_oracle(fine_cube_index, points)
    assert np.all(found != EXTERIOR)


@pytest.mark.slow
def test_large_mixed_mesh():
    mesh = generate_mixed_mesh(40)
    assert mesh.n_elements >= 2000
    index = build_index(mesh)
    points = np.random.default_rng(11).uniform(0.0, 1.0, size=(50_000, 2))
    _assert_matches_oracle(index, points)


@pytest.mark.slow
def test_points_near_vertices_fine_3d(fine_cube_index):
    points = _near_vertex_points(fine_cube_index, 1_000, 12)
    found, expected = _assert_matches_oracle(fine_cube_index, points)
    # off the mesh faces the host is unique
    assert np.array_equal(found, expected)
