"""File-level wrappers behind the CLI subcommands."""
import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from config.locator_config import BuildConfig
from grid.table import dump_cell_table
from indexing.builder import build_index
from indexing.index import BuildStats
from locating.locator import locate_ids
from mesh.generators import generate_mixed_mesh, generate_structured_mesh
from mesh.loaders import load_mesh, save_mesh
from utils.errors import MeshFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_points(path: PathLike, dim: int) -> np.ndarray:
    """One point per line, whitespace-separated coordinates; blank lines and '#' comments skipped."""
    path = Path(path)
    rows = []
    with open(path) as f:
        for number, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if len(tokens) != dim:
                raise MeshFormatError(f"expected {dim} coordinates, got {len(tokens)}", number, str(path))
            try:
                rows.append([float(t) for t in tokens])
            except ValueError as exc:
                raise MeshFormatError(f"malformed coordinate ({exc})", number, str(path)) from exc
    return np.asarray(rows, dtype=float).reshape(-1, dim)


def write_outcomes(ids: Sequence[int], path: PathLike) -> Path:
    """One element id per line, -1 for points outside the domain."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.writelines(f"{int(k)}\n" for k in ids)
    return path


def gen_mesh_command(dim: int, n: int, out: PathLike, domain: Optional[Sequence[float]] = None,
                     mixed: bool = False, l_shape: bool = False, format: Optional[str] = None) -> Path:
    if mixed:
        if dim != 2:
            raise ValueError("mixed meshes are 2D only")
        mesh = generate_mixed_mesh(n, domain)
    else:
        mesh = generate_structured_mesh(dim, domain, n, drop_quadrant=l_shape)
    path = save_mesh(mesh, out, format)
    logger.info(f"Generated {mesh.n_elements} elements ({mesh.n_vertices} vertices) into {path}")
    return path


def build_command(mesh_path: PathLike, config: Optional[BuildConfig] = None,
                  stats_out: Optional[PathLike] = None, dump: Optional[PathLike] = None) -> BuildStats:
    """Build an index, optionally writing its stats as JSON and its cell table as text."""
    index = build_index(load_mesh(mesh_path), config)
    if stats_out:
        stats_path = Path(stats_out)
        stats_path.parent.mkdir(parents=True, exist_ok=True)
        stats_path.write_text(index.stats.model_dump_json(indent=2))
        logger.info(f"Wrote build stats to {stats_path}")
    if dump:
        dump_cell_table(index.table, dump)
    return index.stats


def locate_command(mesh_path: PathLike, points_path: PathLike, out: Optional[PathLike] = None,
                   config: Optional[BuildConfig] = None, workers: int = 1) -> np.ndarray:
    """Locate every point of a points file; ids are written one per line when out is given."""
    index = build_index(load_mesh(mesh_path), config)
    points = read_points(points_path, index.dim)
    ids = locate_ids(points, index, workers)
    logger.info(f"Located {len(ids)} points, {int(np.count_nonzero(ids < 0))} outside")
    if out:
        write_outcomes(ids, out)
    return ids
