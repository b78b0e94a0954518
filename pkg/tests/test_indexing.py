import numpy as np
import pytest
from pydantic import ValidationError

from config.config import EXTERIOR
from config.locator_config import BuildConfig
from indexing.builder import build_index
from indexing.fans import build_edge_fan, build_vertex_fan
from mesh.generators import generate_structured_mesh
from conftest import cell_samples, oracle_for


def _in_patch(index, elements, p):
    return any(index.halfspaces.contains(k, tuple(p), index.tol) for k in elements)


def _sweep(index, cells, patch_of):
    """Cells whose in-domain samples fall outside the patch chosen for them."""
    oracle = oracle_for(index)
    bad = []
    for cell in cells:
        patch = patch_of(int(cell))
        for p in cell_samples(index.grid, cell):
            if oracle.locate_id(p) != EXTERIOR and not _in_patch(index, patch, p):
                bad.append((int(cell), p.tolist()))
    return bad


def _vertex_patch_sweep(index, cells=None):
    table = index.table
    cells = np.nonzero(table.active)[0] if cells is None else cells
    return _sweep(index, cells, lambda cell: index.mesh.vertex_elements[int(table.phi[cell])])


def _edge_patch_sweep(index, cells=None):
    table = index.table
    cells = np.nonzero(table.active & table.patch)[0] if cells is None else cells
    return _sweep(index, cells, lambda cell: index.mesh.edge_elements[int(table.psi[cell])])


def _sampled_cells(mask, count, seed):
    cells = np.nonzero(mask)[0]
    return np.random.default_rng(seed).choice(cells, size=min(count, len(cells)), replace=False)


def test_every_active_cell_has_an_anchor(square_index, cube_index, mixed_index):
    for index in (square_index, cube_index, mixed_index):
        table = index.table
        assert np.all(table.phi[table.active] >= 0)


@pytest.mark.parametrize("fixture", ["coarse_square_index", "square_index", "mixed_index", "l_shape_index"])
def test_anchor_vertex_patch_covers_cell_2d(fixture, request):
    assert _vertex_patch_sweep(request.getfixturevalue(fixture)) == []


def test_anchor_vertex_patch_covers_cell_3d(cube_index):
    assert _vertex_patch_sweep(cube_index) == []


def test_anchor_edge_patch_covers_cell_3d(cube_index):
    assert _edge_patch_sweep(cube_index) == []


@pytest.mark.slow
def test_anchor_patches_cover_sampled_cells_fine_3d(fine_cube_index):
    table = fine_cube_index.table
    assert _vertex_patch_sweep(fine_cube_index, _sampled_cells(table.active, 4_000, 31)) == []
    assert _edge_patch_sweep(fine_cube_index, _sampled_cells(table.active & table.patch, 4_000, 32)) == []


def test_host_cells_lie_in_their_host(square_index):
    table = square_index.table
    cells = np.nonzero(table.host >= 0)[0]
    assert len(cells) > 0
    for cell in cells[:: max(1, len(cells) // 200)]:
        host = int(table.host[cell])
        assert all(square_index.halfspaces.contains(host, tuple(p), square_index.tol)
                   for p in cell_samples(square_index.grid, cell))
        assert int(table.phi[cell]) == min(square_index.mesh.elements[host])


def test_build_is_deterministic():
    mesh = generate_structured_mesh(2, n=6)
    first, second = build_index(mesh), build_index(mesh)
    assert first.table.equals(second.table)
    assert first.stats.classes == second.stats.classes


def test_table_is_read_only(coarse_square_index):
    with pytest.raises(ValueError):
        coarse_square_index.table.phi[0] = 3


def test_build_stats(square_index, cube_index):
    stats = square_index.stats
    assert stats.dim == 2
    assert stats.n_elements == 800
    assert set(stats.classes) == {"interior", "edge_cut", "fallback"}
    assert stats.active == int(square_index.table.active.sum())
    assert stats.init_seconds > 0
    assert stats.max_fan == 6
    assert set(cube_index.stats.classes) == {"interior", "single_face", "edge_ball", "face_pair",
                                             "edge_patch", "fallback"}
    restored = type(stats).model_validate_json(stats.model_dump_json())
    assert restored == stats


def test_corner_vertex_fan(square_mesh):
    fan = build_vertex_fan(square_mesh, 0)
    assert len(fan.angles) == 3
    assert list(fan.angles) == sorted(fan.angles)
    assert sorted(k for k in fan.payload if k != EXTERIOR) == [0, 1]
    assert fan.payload.count(EXTERIOR) == 1


def test_interior_vertex_fan(square_mesh):
    center = int(np.argmin(np.linalg.norm(square_mesh.vertices - [0.5, 0.5], axis=1)))
    fan = build_vertex_fan(square_mesh, center)
    assert len(fan.angles) == 6
    assert sorted(fan.payload) == sorted(square_mesh.vertex_elements[center])


def test_interior_edge_fan(cube_mesh):
    center = int(np.argmin(np.linalg.norm(cube_mesh.vertices - [0.5, 0.5, 0.5], axis=1)))
    for e in cube_mesh.vertex_edges[center]:
        fan = build_edge_fan(cube_mesh, e)
        assert sorted(fan.payload) == sorted(cube_mesh.edge_elements[e])
        assert list(fan.angles) == sorted(fan.angles)
        assert fan.anchor == int(cube_mesh.edges[e, 0])


def test_boundary_edge_fan_opens_outside(cube_mesh):
    e = int(np.nonzero(cube_mesh.boundary_edges)[0][0])
    fan = build_edge_fan(cube_mesh, e)
    assert EXTERIOR in fan.payload


def test_w_star_override(coarse_square_index):
    mesh = coarse_square_index.mesh
    w_star = 0.5 * coarse_square_index.metrics.w
    index = build_index(mesh, BuildConfig(w_star=w_star))
    assert index.metrics.w_star == w_star
    assert index.grid.s < coarse_square_index.grid.s


def test_build_config_validation():
    with pytest.raises(ValidationError):
        BuildConfig(w_star=0.1, w_star_margin=0.01)
    with pytest.raises(ValidationError):
        BuildConfig(w_star=-1.0)
    with pytest.raises(ValueError):
        build_index(generate_structured_mesh(2, n=4), BuildConfig(w_star=1.0))


def test_build_visits_grow_with_elements():
    coarse = build_index(generate_structured_mesh(2, n=10)).stats
    fine = build_index(generate_structured_mesh(2, n=20)).stats
    assert fine.n_elements == 4 * coarse.n_elements
    ratio = sum(fine.visits.values()) / sum(coarse.visits.values())
    assert 3.0 <= ratio <= 6.0
