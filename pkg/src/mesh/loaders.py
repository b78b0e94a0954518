import logging
from pathlib import Path
from typing import Iterator, List, Optional, Tuple, Union

import meshio
import numpy as np

from config.config import MESH_FORMATS
from mesh.topology import MeshTopology, build_topology
from utils.errors import MeshFormatError, UnsupportedElementError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# meshio cell types accepted per dimension; lower-dimensional cells are skipped
GMSH_CELLS = {2: ("triangle", "quad", "polygon"), 3: ("tetra",)}
GMSH_SKIPPED = {2: ("vertex", "line"), 3: ("vertex", "line", "triangle", "quad")}


def _data_lines(path: Path) -> Iterator[Tuple[int, List[str]]]:
    """Non-empty, comment-free lines as (1-based line number, tokens)."""
    with open(path, "r") as f:
        for number, line in enumerate(f, start=1):
            tokens = line.split("#", 1)[0].split()
            if tokens:
                yield number, tokens


def _numbers(tokens: List[str], cast, count: int, number: int, path: Path) -> list:
    if len(tokens) < count:
        raise MeshFormatError(f"expected {count} values, found {len(tokens)}", number, str(path))
    try:
        return [cast(t) for t in tokens[:count]]
    except ValueError as exc:
        raise MeshFormatError(f"malformed value ({exc})", number, str(path)) from exc


def _check_gmsh_layout(path: Path) -> None:
    """Balanced $Section/$EndSection pairs and, for ASCII MSH 2, the declared node and element counts."""
    if not path.exists():
        raise FileNotFoundError(path)
    section, opened, counted, declared, rows = None, None, False, None, 0
    version = ""
    seen_format = False
    with open(path, "r", errors="replace") as f:
        for number, line in enumerate(f, start=1):
            tokens = line.split()
            if not tokens:
                continue
            head = tokens[0]
            if head.startswith("$End"):
                if head[4:] != section:
                    raise MeshFormatError(f"{head} does not close {'$' + section if section else 'any section'}",
                                          number, str(path))
                if counted and rows != declared:
                    raise MeshFormatError(f"${section} declares {declared} rows, found {rows}", opened, str(path))
                section, counted = None, False
                continue
            if head.startswith("$"):
                if section is not None:
                    raise MeshFormatError(f"${section} is not closed before {head}", opened, str(path))
                if not seen_format and head != "$MeshFormat":
                    raise MeshFormatError(f"expected $MeshFormat, found {head}", number, str(path))
                section, opened, declared, rows = head[1:], number, None, 0
                seen_format = True
                continue
            if section is None:
                if not seen_format:
                    raise MeshFormatError("expected $MeshFormat", number, str(path))
                continue
            if section == "MeshFormat":
                if len(tokens) < 2:
                    raise MeshFormatError("malformed $MeshFormat header", number, str(path))
                if tokens[1] != "0":
                    return
                version = tokens[0]
            elif section in ("Nodes", "Elements") and version.startswith("2"):
                if declared is None:
                    try:
                        declared = int(tokens[0])
                    except ValueError as exc:
                        raise MeshFormatError(f"malformed ${section} count ({exc})", number, str(path)) from exc
                    counted = True
                else:
                    rows += 1
    if section is not None:
        raise MeshFormatError(f"${section} is not closed", opened, str(path))
    if not seen_format:
        raise MeshFormatError("empty file", None, str(path))


def detect_format(path: PathLike) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".msh":
        return MESH_FORMATS["GMSH"]
    if suffix in (".node", ".ele"):
        return MESH_FORMATS["NODE_ELE"]
    return MESH_FORMATS["NATIVE"]


class MeshLoader:
    """Readers for the supported mesh file formats."""

    @staticmethod
    def load_native(path: PathLike) -> MeshTopology:
        """Header "dim n_vertices n_elements", coordinates, then 0-based element vertex lists."""
        path = Path(path)
        lines = _data_lines(path)
        try:
            number, tokens = next(lines)
        except StopIteration:
            raise MeshFormatError("empty file", None, str(path))
        dim, n_v, n_e = _numbers(tokens, int, 3, number, path)
        if dim not in (2, 3):
            raise MeshFormatError(f"unsupported dimension {dim}", number, str(path))

        vertices, elements = [], []
        for number, tokens in lines:
            if len(vertices) < n_v:
                vertices.append(_numbers(tokens, float, dim, number, path))
            elif len(elements) < n_e:
                elements.append(_numbers(tokens, int, len(tokens), number, path))
            else:
                raise MeshFormatError("unexpected trailing data", number, str(path))
        if len(vertices) < n_v or len(elements) < n_e:
            raise MeshFormatError(
                f"truncated file: {len(vertices)}/{n_v} vertices, {len(elements)}/{n_e} elements",
                None, str(path)
            )
        return build_topology(dim, vertices, elements)

    @staticmethod
    def load_node_ele(path: PathLike) -> MeshTopology:
        """Triangle/TetGen .node + .ele pair; either file (or the shared stem) may be given."""
        path = Path(path)
        stem = path.with_suffix("") if path.suffix in (".node", ".ele") else path
        node_path, ele_path = stem.with_suffix(".node"), stem.with_suffix(".ele")

        lines = _data_lines(node_path)
        number, tokens = next(lines, (None, None))
        if tokens is None:
            raise MeshFormatError("empty node file", None, str(node_path))
        n_v, dim = _numbers(tokens, int, 2, number, node_path)
        ids, vertices = [], []
        for number, tokens in lines:
            if len(vertices) == n_v:
                raise MeshFormatError("unexpected trailing data", number, str(node_path))
            values = _numbers(tokens, float, dim + 1, number, node_path)
            ids.append(int(values[0]))
            vertices.append(values[1:])
        if len(vertices) < n_v:
            raise MeshFormatError(f"truncated node file: {len(vertices)}/{n_v}", None, str(node_path))
        base = min(ids) if ids else 0

        lines = _data_lines(ele_path)
        number, tokens = next(lines, (None, None))
        if tokens is None:
            raise MeshFormatError("empty element file", None, str(ele_path))
        n_e, per_element = _numbers(tokens, int, 2, number, ele_path)
        expected = 3 if dim == 2 else 4
        if per_element != expected:
            raise UnsupportedElementError(
                f"{ele_path}: {per_element} nodes per element; only linear "
                f"{'triangles' if dim == 2 else 'tetrahedra'} are supported"
            )
        elements = []
        for number, tokens in lines:
            if len(elements) == n_e:
                raise MeshFormatError("unexpected trailing data", number, str(ele_path))
            values = _numbers(tokens, int, per_element + 1, number, ele_path)
            elements.append([v - base for v in values[1:]])
        if len(elements) < n_e:
            raise MeshFormatError(f"truncated element file: {len(elements)}/{n_e}", None, str(ele_path))
        return build_topology(dim, vertices, elements)

    @staticmethod
    def load_gmsh(path: PathLike) -> MeshTopology:
        """Gmsh MSH 2.2 ASCII through meshio; z is dropped for planar meshes."""
        path = Path(path)
        _check_gmsh_layout(path)
        try:
            raw = meshio.read(str(path), file_format="gmsh")
        except (meshio.ReadError, ValueError, IndexError) as exc:
            raise MeshFormatError(f"meshio could not read the file: {type(exc).__name__}: {exc}",
                                  None, str(path)) from exc

        types = {block.type for block in raw.cells}
        dim = 3 if "tetra" in types else 2
        elements = []
        for block in raw.cells:
            if block.type in GMSH_CELLS[dim]:
                elements.extend(block.data.tolist())
            elif block.type not in GMSH_SKIPPED[dim]:
                raise UnsupportedElementError(f"{path}: element type {block.type!r} is not supported in {dim}D")
        if not elements:
            raise MeshFormatError(f"no {dim}D elements found", None, str(path))

        points = raw.points[:, :dim]
        used = np.unique(np.concatenate([np.asarray(el) for el in elements]))
        if len(used) < len(points):
            remap = np.full(len(points), -1, dtype=np.int64)
            remap[used] = np.arange(len(used))
            points = points[used]
            elements = [remap[el].tolist() for el in elements]
        return build_topology(dim, points, elements)


def load_mesh(path: PathLike, format: Optional[str] = None) -> MeshTopology:
    """Load a mesh; the format defaults to one inferred from the file suffix."""
    path = Path(path)
    format = format or detect_format(path)
    if format == MESH_FORMATS["GMSH"]:
        mesh = MeshLoader.load_gmsh(path)
    elif format == MESH_FORMATS["NODE_ELE"]:
        mesh = MeshLoader.load_node_ele(path)
    elif format == MESH_FORMATS["NATIVE"]:
        if not path.exists():
            raise FileNotFoundError(path)
        mesh = MeshLoader.load_native(path)
    else:
        raise ValueError(f"Unknown mesh format {format!r}, expected one of {list(MESH_FORMATS.values())}")
    logger.info(f"Loaded {path} ({format}): {mesh.n_vertices} vertices, {mesh.n_elements} elements")
    return mesh


def save_mesh(mesh: MeshTopology, path: PathLike, format: Optional[str] = None) -> Path:
    """Write a mesh so that load_mesh reproduces it."""
    path = Path(path)
    format = format or detect_format(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    if format == MESH_FORMATS["NATIVE"]:
        with open(path, "w") as f:
            f.write(f"{mesh.dim} {mesh.n_vertices} {mesh.n_elements}\n")
            for v in mesh.vertices:
                f.write(" ".join(repr(float(x)) for x in v) + "\n")
            for el in mesh.elements:
                f.write(" ".join(str(v) for v in el) + "\n")
    elif format == MESH_FORMATS["NODE_ELE"]:
        if mesh.dim == 2 and any(len(el) != 3 for el in mesh.elements):
            raise UnsupportedElementError("node-ele output holds triangles only")
        stem = path.with_suffix("")
        with open(stem.with_suffix(".node"), "w") as f:
            f.write(f"{mesh.n_vertices} {mesh.dim} 0 0\n")
            for i, v in enumerate(mesh.vertices):
                f.write(f"{i} " + " ".join(repr(float(x)) for x in v) + "\n")
        with open(stem.with_suffix(".ele"), "w") as f:
            f.write(f"{mesh.n_elements} {mesh.dim + 1} 0\n")
            for k, el in enumerate(mesh.elements):
                f.write(f"{k} " + " ".join(str(v) for v in el) + "\n")
        path = stem.with_suffix(".node")
    elif format == MESH_FORMATS["GMSH"]:
        points = mesh.vertices
        if mesh.dim == 2:
            points = np.hstack([points, np.zeros((mesh.n_vertices, 1))])
        blocks = {}
        for el in mesh.elements:
            name = {3: "triangle", 4: "quad"}.get(len(el)) if mesh.dim == 2 else "tetra"
            if name is None:
                raise UnsupportedElementError(f"gmsh output cannot hold {len(el)}-gons")
            blocks.setdefault(name, []).append(el)
        cells = [(name, np.asarray(els, dtype=np.int64)) for name, els in blocks.items()]
        tags = [np.zeros(len(data), dtype=int) for _, data in cells]
        meshio.write_points_cells(
            str(path), points, cells,
            cell_data={"gmsh:physical": tags, "gmsh:geometrical": tags},
            file_format="gmsh22", binary=False,
        )
    else:
        raise ValueError(f"Unknown mesh format {format!r}")
    logger.info(f"Saved mesh to {path} ({format})")
    return path
