import itertools
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from baselines.brute_force import BruteForceLocator  # noqa: E402
from indexing.builder import build_index  # noqa: E402
from mesh.generators import generate_mixed_mesh, generate_structured_mesh  # noqa: E402


@pytest.fixture(scope="session")
def square_mesh():
    return generate_structured_mesh(2, n=4)


@pytest.fixture(scope="session")
def square_index():
    return build_index(generate_structured_mesh(2, n=20))


@pytest.fixture(scope="session")
def coarse_square_index():
    return build_index(generate_structured_mesh(2, n=10))


@pytest.fixture(scope="session")
def l_shape_index():
    return build_index(generate_structured_mesh(2, n=8, drop_quadrant=True))


@pytest.fixture(scope="session")
def mixed_index():
    return build_index(generate_mixed_mesh(12))


@pytest.fixture(scope="session")
def cube_mesh():
    return generate_structured_mesh(3, n=2)


@pytest.fixture(scope="session")
def cube_index(cube_mesh):
    return build_index(cube_mesh)


@pytest.fixture(scope="session")
def fine_cube_index():
    return build_index(generate_structured_mesh(3, n=8))


def oracle_for(index):
    return BruteForceLocator(index.mesh, halfspaces=index.halfspaces, tol=index.tol)


def cell_samples(grid, cell):
    """Cell center plus every corner pulled a quarter of the way towards it."""
    lo = grid.cell_lo(np.array([cell]))[0]
    center = lo + 0.5 * grid.s
    corners = [lo + grid.s * np.array(c) for c in itertools.product((0.0, 1.0), repeat=grid.dim)]
    return [center] + [c + 0.25 * (center - c) for c in corners]
