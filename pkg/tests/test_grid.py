import itertools
import math

import numpy as np
import pytest

from grid.passes import iter_box_pairs
from grid.spec import GridSpec, cell_of_point, grid_spec_from_metrics, spacing_bound, spacing_bound_3d
from grid.table import dump_cell_table
from mesh.generators import generate_structured_mesh
from mesh.metrics import compute_metrics
from utils.errors import OutsideGridError


def test_spacing_bounds():
    assert spacing_bound(2, 1.0, math.pi / 2) == pytest.approx(1.0 / (2.0 * math.sqrt(2.0)))
    sin_h = math.sin(math.pi / 4)
    expected = 2.0 * sin_h / (math.sqrt(3.0) * 2.0 * (1.0 + sin_h))
    assert spacing_bound_3d(1.0, math.pi / 2) == pytest.approx(expected)
    assert spacing_bound(3, 1.0, math.pi / 2) == pytest.approx(expected)
    with pytest.raises(ValueError):
        spacing_bound(2, 0.0, 0.5)
    with pytest.raises(ValueError):
        spacing_bound(3, 1.0, -0.1)


def test_grid_from_metrics_covers_padded_box():
    mesh = generate_structured_mesh(2, n=10)
    metrics = compute_metrics(mesh)
    grid = grid_spec_from_metrics(metrics, mesh.bounding_box())
    assert grid.s == pytest.approx(0.999 * spacing_bound(2, metrics.w_star, metrics.alpha))
    assert grid.padding == pytest.approx(0.05)
    assert grid.lo == pytest.approx((-0.05, -0.05))
    assert all(hi >= 1.05 - 1e-12 for hi in grid.hi)
    assert grid.dims[0] == math.ceil((1.0 + 2.0 * 0.05) / grid.s)


def test_explicit_padding():
    mesh = generate_structured_mesh(2, n=4)
    grid = grid_spec_from_metrics(compute_metrics(mesh), mesh.bounding_box(), padding=0.0)
    assert grid.lo == (0.0, 0.0)


def test_cell_lookup_agrees():
    grid = GridSpec(lo=(0.0, 0.0, 0.0), s=0.25, dims=(4, 3, 2), padding=0.0)
    rng = np.random.default_rng(5)
    points = rng.uniform(-0.1, 1.1, size=(500, 3))
    vectorized = grid.cells_of_points(points)
    scalar = [grid.locate_cell(tuple(p)) for p in points]
    assert vectorized.tolist() == scalar
    for p, cell in zip(points, scalar):
        if cell >= 0:
            assert grid.linear(np.array(cell_of_point(p, grid))) == cell
            lo = grid.cell_lo(np.array([cell]))[0]
            assert np.all(lo <= p) and np.all(p <= lo + grid.s)


def test_max_face_falls_in_last_cell():
    grid = GridSpec(lo=(0.0, 0.0), s=0.5, dims=(2, 2), padding=0.0)
    assert cell_of_point((1.0, 1.0), grid) == (1, 1)
    assert grid.locate_cell((1.0, 1.0)) == 3
    assert grid.locate_cell((1.0 + 1e-9, 0.5)) == -1
    with pytest.raises(OutsideGridError):
        cell_of_point((-0.1, 0.5), grid)


def test_linear_and_unravel_are_inverse():
    grid = GridSpec(lo=(0.0, 0.0, 0.0), s=1.0, dims=(3, 4, 5), padding=0.0)
    ids = np.arange(grid.n_cells)
    assert np.array_equal(grid.linear(grid.unravel(ids)), ids)
    assert grid.unravel(np.array([1]))[0].tolist() == [1, 0, 0]
    assert grid.unravel(np.array([3]))[0].tolist() == [0, 1, 0]
    assert grid.unravel(np.array([12]))[0].tolist() == [0, 0, 1]


def test_iter_box_pairs_covers_every_box_in_small_chunks():
    imin = np.array([[0, 0], [2, 1], [1, 3]])
    imax = np.array([[1, 2], [2, 1], [3, 4]])
    pairs = []
    for rep, index in iter_box_pairs(imin, imax, chunk_pairs=4):
        pairs.extend((int(r), tuple(ix)) for r, ix in zip(rep, index.tolist()))
    expected = []
    for item, (lo, hi) in enumerate(zip(imin, imax)):
        for ix in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
            expected.append((item, ix))
    assert sorted(pairs) == sorted(expected)
    assert len(pairs) == len(expected)


def test_active_cells_follow_the_domain(l_shape_index):
    grid, table = l_shape_index.grid, l_shape_index.table
    centers = grid.centers(np.arange(grid.n_cells))
    s = grid.s
    far_out = np.any((centers < -s) | (centers > 1.0 + s), axis=1)
    in_notch = np.all(centers > 0.5 + s, axis=1) & np.all(centers < 1.0 - s, axis=1)
    deep_inside = np.all(centers > s, axis=1) & np.all(centers < 1.0 - s, axis=1) & ~np.all(centers > 0.5 - s, axis=1)
    assert not table.active[far_out].any()
    assert not table.active[in_notch].any()
    assert table.active[deep_inside].all()
    assert not table.boundary[deep_inside].any()


def test_boundary_cells_are_active(l_shape_index):
    table = l_shape_index.table
    assert table.boundary.any()
    assert np.all(table.active[table.boundary])


def test_dump_cell_table(tmp_path, coarse_square_index):
    path = dump_cell_table(coarse_square_index.table, tmp_path / "cells.txt")
    lines = path.read_text().splitlines()
    assert lines[0] == "cell active phi psi host"
    assert len(lines) == coarse_square_index.grid.n_cells + 1
    first = [int(x) for x in lines[1].split()]
    assert first[0] == 0 and first[1] == 0
