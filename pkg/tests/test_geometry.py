import math

import numpy as np
import pytest

from geometry.halfspaces import build_halfspaces
from geometry.intersections import (chi_point, segment_ball_intersection, segment_box_intersection,
                                    triangle_box_intersect)
from geometry.plane import basis_from_direction, project_to_plane
from geometry.predicates import Containment, point_in_convex_polygon, point_in_tetrahedron, point_in_triangle
from geometry.pseudo_angle import pseudo_angle, pseudo_angles, sector_search
from indexing.fans import build_vertex_fan
from mesh.topology import build_topology
from utils.errors import (DegenerateElementError, DegenerateProjectionError, NonConvexPolygonError,
                          ZeroVectorError)


@pytest.mark.parametrize("x, y, expected", [
    (0.0, 1.0, -2.0),
    (1.0, 0.0, -1.0),
    (0.0, -1.0, 0.0),
    (-1.0, 0.0, 1.0),
    (1.0, 1.0, -1.5),
    (-1.0, 1.0, 1.5),
])
def test_pseudo_angle_reference_directions(x, y, expected):
    assert pseudo_angle(x, y) == pytest.approx(expected)


def test_pseudo_angle_is_scale_free():
    assert pseudo_angle(3.0, -4.0) == pytest.approx(pseudo_angle(0.3, -0.4))


def test_pseudo_angle_of_zero_vector_raises():
    with pytest.raises(ZeroVectorError):
        pseudo_angle(0.0, 0.0)
    with pytest.raises(ZeroVectorError):
        pseudo_angles(np.array([1.0, 0.0]), np.array([0.0, 0.0]))


def _clockwise_from_north(x, y):
    return np.mod(np.arctan2(x, y), 2.0 * np.pi)


@pytest.mark.parametrize("count", [10_000, pytest.param(1_000_000, marks=pytest.mark.slow)])
def test_pseudo_angle_orders_like_clockwise_angle(count):
    rng = np.random.default_rng(7)
    theta = rng.uniform(0.0, 2.0 * np.pi, count)
    x, y = np.cos(theta), np.sin(theta)
    assert np.array_equal(np.argsort(pseudo_angles(x, y), kind="stable"),
                          np.argsort(_clockwise_from_north(x, y), kind="stable"))


def test_vectorized_pseudo_angles_match_scalar():
    rng = np.random.default_rng(3)
    x, y = rng.normal(size=50), rng.normal(size=50)
    expected = [pseudo_angle(a, b) for a, b in zip(x, y)]
    assert pseudo_angles(x, y) == pytest.approx(expected)


@pytest.mark.parametrize("query, expected", [
    (-2.0, 0), (-1.5, 0), (-1.0, 1), (0.5, 2), (1.0, 3), (1.9, 3),
])
def test_sector_search_is_left_closed(query, expected):
    assert sector_search([-2.0, -1.0, 0.0, 1.0], query) == expected


def test_sector_search_wraps_below_first_ray():
    assert sector_search([-1.5, 0.0, 1.0], -1.9) == 2


class _CountingAngle(float):
    comparisons = 0

    def __lt__(self, other):
        _CountingAngle.comparisons += 1
        return float.__lt__(self, other)


def test_fan_search_comparisons_are_logarithmic():
    m = 24
    ring = [(math.cos(2 * math.pi * j / m), math.sin(2 * math.pi * j / m)) for j in range(m)]
    mesh = build_topology(2, [(0.0, 0.0)] + ring, [(0, j, j % m + 1) for j in range(1, m + 1)])
    fan = build_vertex_fan(mesh, 0)
    assert len(fan.angles) == m
    bound = math.ceil(math.log2(len(fan.angles))) + 1
    for k in range(mesh.n_elements):
        c = mesh.centroid(k)
        _CountingAngle.comparisons = 0
        sector = sector_search(fan.angles, _CountingAngle(pseudo_angle(float(c[0]), float(c[1]))))
        assert _CountingAngle.comparisons <= bound
        assert fan.payload[sector] == k


def test_point_in_triangle_classification():
    a, b, c = (0.0, 0.0), (1.0, 0.0), (0.0, 1.0)
    assert point_in_triangle((0.2, 0.2), a, b, c) == Containment.INSIDE
    assert point_in_triangle((0.5, 0.0), a, b, c) == Containment.BOUNDARY
    assert point_in_triangle((0.6, 0.6), a, b, c) == Containment.OUTSIDE
    # orientation does not matter
    assert point_in_triangle((0.2, 0.2), a, c, b) == Containment.INSIDE
    # the band admits points just outside
    assert point_in_triangle((0.5, -1e-13), a, b, c, tol=1e-12) == Containment.BOUNDARY


def test_point_in_triangle_rejects_degenerate():
    with pytest.raises(DegenerateElementError):
        point_in_triangle((0.0, 0.0), (0.0, 0.0), (1.0, 1.0), (2.0, 2.0))


def test_point_in_tetrahedron_classification():
    verts = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert point_in_tetrahedron((0.1, 0.1, 0.1), *verts) == Containment.INSIDE
    assert point_in_tetrahedron((0.2, 0.2, 0.0), *verts) == Containment.BOUNDARY
    assert point_in_tetrahedron((0.5, 0.5, 0.5), *verts) == Containment.OUTSIDE
    with pytest.raises(DegenerateElementError):
        point_in_tetrahedron((0, 0, 0), (0, 0, 0), (1, 0, 0), (2, 0, 0), (0, 1, 0))


def test_point_in_convex_polygon():
    square = [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert point_in_convex_polygon((0.5, 0.5), square) == Containment.INSIDE
    assert point_in_convex_polygon((1.0, 0.3), square) == Containment.BOUNDARY
    assert point_in_convex_polygon((1.5, 0.5), square) == Containment.OUTSIDE
    with pytest.raises(NonConvexPolygonError):
        point_in_convex_polygon((0.5, 0.5), square[::-1])
    with pytest.raises(NonConvexPolygonError):
        point_in_convex_polygon((0.5, 0.5), [(0, 0), (1, 0), (0.4, 0.4), (0, 1)])


def test_segment_box_intersection():
    assert segment_box_intersection((-1.0, 0.5), (2.0, 0.5), (0.0, 0.0), (1.0, 1.0)) == pytest.approx(1.0 / 3.0)
    assert segment_box_intersection((0.2, 0.2), (0.4, 0.4), (0.0, 0.0), (1.0, 1.0)) == 0.0
    assert segment_box_intersection((-1.0, 2.0), (2.0, 2.0), (0.0, 0.0), (1.0, 1.0)) is None
    # touching a corner counts for closed sets
    assert segment_box_intersection((1.0, 2.0), (1.0, 1.0), (0.0, 0.0), (1.0, 1.0)) == pytest.approx(1.0)


def test_segment_ball_intersection():
    t1, t2 = segment_ball_intersection((-2.0, 0.0, 0.0), (2.0, 0.0, 0.0), (0.0, 0.0, 0.0), 1.0)
    assert (t1, t2) == (pytest.approx(0.25), pytest.approx(0.75))
    assert segment_ball_intersection((-2.0, 2.0, 0.0), (2.0, 2.0, 0.0), (0.0, 0.0, 0.0), 1.0) is None
    with pytest.raises(ValueError):
        segment_ball_intersection((0, 0, 0), (1, 0, 0), (0, 0, 0), 0.0)


def test_triangle_box_intersect():
    lo, hi = (0.0, 0.0, 0.0), (1.0, 1.0, 1.0)
    crossing = [(-1.0, -1.0, 0.5), (3.0, -1.0, 0.5), (-1.0, 3.0, 0.5)]
    assert triangle_box_intersect(crossing, lo, hi)
    above = [(-1.0, -1.0, 2.0), (3.0, -1.0, 2.0), (-1.0, 3.0, 2.0)]
    assert not triangle_box_intersect(above, lo, hi)
    # bounding boxes overlap but the triangle passes beside the corner
    beside = [(1.5, 0.0, 0.0), (0.0, 1.5, 0.0), (0.0, 0.0, 1.5)]
    assert triangle_box_intersect(beside, lo, hi)
    corner_cut = [(3.0, 0.0, 0.0), (0.0, 3.0, 0.0), (0.0, 0.0, 3.0)]
    assert triangle_box_intersect(corner_cut, lo, hi)
    far_corner = [(4.0, 0.0, 0.0), (0.0, 4.0, 0.0), (0.0, 0.0, 4.0)]
    assert not triangle_box_intersect(far_corner, lo, hi)


def test_chi_point_is_foot_of_perpendicular():
    assert chi_point((0, 0, 0), (2, 0, 0), (1, 1, 0)) == pytest.approx([1.0, 0.0, 0.0])
    assert chi_point((0, 0, 0), (0, 0, 1), (3, 4, 5)) == pytest.approx([0.0, 0.0, 5.0])
    with pytest.raises(ZeroVectorError):
        chi_point((1, 1, 1), (1, 1, 1), (0, 0, 0))


def test_project_to_plane_returns_unit_direction():
    basis = basis_from_direction((0, 0, 0), (0, 0, 2))
    u, v = project_to_plane((3.0, 4.0, 7.0), basis)
    assert math.hypot(u, v) == pytest.approx(1.0)
    assert np.dot(basis.u, basis.normal) == pytest.approx(0.0, abs=1e-15)
    assert np.dot(basis.v, basis.normal) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DegenerateProjectionError):
        project_to_plane((0.0, 0.0, 5.0), basis)
    with pytest.raises(ZeroVectorError):
        basis_from_direction((0, 0, 0), (0, 0, 0))


def test_halfspaces_agree_with_predicates(square_mesh):
    halfspaces = build_halfspaces(square_mesh)
    rng = np.random.default_rng(11)
    for p in rng.uniform(-0.1, 1.1, size=(200, 2)):
        for k, ring in enumerate(square_mesh.elements):
            a, b, c = square_mesh.vertices[list(ring)]
            inside = point_in_triangle(p, a, b, c, tol=1e-12) != Containment.OUTSIDE
            assert halfspaces.contains(k, tuple(p), 1e-12) == inside


def test_first_host_returns_lowest_containing_id(square_mesh):
    halfspaces = build_halfspaces(square_mesh)
    # (0.25, 0.25) is a vertex shared by six triangles
    hosts = halfspaces.first_host(np.array([[0.25, 0.25], [2.0, 2.0]]), 1e-12)
    assert hosts.tolist() == [0, -1]
