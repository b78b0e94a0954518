"""Background Cartesian grid: spacing bounds and cell indexing.

Cells are addressed by a linear id i + nx * (j + ny * k).
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from config.config import PADDING_FRACTION, SPACING_SAFETY
from utils.errors import OutsideGridError

logger = logging.getLogger(__name__)


def spacing_bound_2d(w_star: float, alpha: float) -> float:
    sin_a = math.sin(alpha)
    return w_star * sin_a / (math.sqrt(2.0) * (1.0 + sin_a))


def spacing_bound_3d(w_star: float, alpha: float) -> float:
    sin_a = math.sin(alpha)
    sin_h = math.sin(0.5 * alpha)
    return 2.0 * w_star * sin_a * sin_h / (math.sqrt(3.0) * (1.0 + sin_a) * (1.0 + sin_h))


def spacing_bound(dim: int, w_star: float, alpha: float) -> float:
    if w_star <= 0.0 or alpha <= 0.0:
        raise ValueError(f"w* and alpha must be positive, got w*={w_star}, alpha={alpha}")
    return spacing_bound_2d(w_star, alpha) if dim == 2 else spacing_bound_3d(w_star, alpha)


@dataclass(frozen=True)
class GridSpec:
    lo: Tuple[float, ...]
    s: float
    dims: Tuple[int, ...]
    padding: float

    @property
    def dim(self) -> int:
        return len(self.dims)

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.dims))

    @property
    def hi(self) -> Tuple[float, ...]:
        return tuple(lo + n * self.s for lo, n in zip(self.lo, self.dims))

    @property
    def strides(self) -> Tuple[int, ...]:
        if self.dim == 2:
            return 1, self.dims[0]
        return 1, self.dims[0], self.dims[0] * self.dims[1]

    @property
    def half_diagonal(self) -> float:
        return 0.5 * math.sqrt(self.dim) * self.s

    def linear(self, index: np.ndarray) -> np.ndarray:
        """Linear ids of (N, dim) integer cell indices."""
        index = np.asarray(index, dtype=np.int64)
        return index @ np.asarray(self.strides, dtype=np.int64)

    def unravel(self, ids: np.ndarray) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        return np.stack(np.unravel_index(ids, self.dims, order="F"), axis=-1)

    def cell_lo(self, ids: np.ndarray) -> np.ndarray:
        return np.asarray(self.lo) + self.s * self.unravel(ids)

    def centers(self, ids: np.ndarray) -> np.ndarray:
        return self.cell_lo(ids) + 0.5 * self.s

    def index_boxes(self, lo_pts: np.ndarray, hi_pts: np.ndarray, inflate: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """Per-axis [imin, imax] index ranges of the cells meeting each box (lo_pts, hi_pts)."""
        lo = np.asarray(self.lo)
        upper = np.asarray(self.dims) - 1
        imin = np.floor((np.asarray(lo_pts) - lo) / self.s).astype(np.int64) - inflate
        imax = np.floor((np.asarray(hi_pts) - lo) / self.s).astype(np.int64) + inflate
        return np.clip(imin, 0, upper), np.clip(imax, 0, upper)

    def cells_of_points(self, points: np.ndarray) -> np.ndarray:
        """Linear host-cell ids, -1 for points outside the background box."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        rel = (points - np.asarray(self.lo)) / self.s
        inside = np.all((rel >= 0.0) & (rel <= np.asarray(self.dims)), axis=-1)
        index = np.minimum(np.floor(rel).astype(np.int64), np.asarray(self.dims) - 1)
        index = np.maximum(index, 0)
        return np.where(inside, self.linear(index), -1)

    def locate_cell(self, p: Sequence[float]) -> int:
        """Linear host-cell id of one point, or -1 outside the background box."""
        s = self.s
        cell = 0
        stride = 1
        for x, lo, n in zip(p, self.lo, self.dims):
            r = (x - lo) / s
            if r < 0.0 or r > n:
                return -1
            i = math.floor(r)
            if i >= n:
                i = n - 1
            cell += stride * i
            stride *= n
        return cell


def cell_of_point(p: Sequence[float], grid: GridSpec) -> Tuple[int, ...]:
    """Per-axis index of the cell holding p; points on the max face fall in the last cell."""
    index = []
    for x, lo, n in zip(p, grid.lo, grid.dims):
        r = (float(x) - lo) / grid.s
        if r < 0.0 or r > n:
            raise OutsideGridError(f"Point {tuple(p)} lies outside the background box")
        index.append(min(math.floor(r), n - 1))
    return tuple(index)


def grid_spec_from_metrics(metrics, bbox: Tuple[Sequence[float], Sequence[float]],
                           padding: Optional[float] = None) -> GridSpec:
    """Grid whose spacing satisfies the dimension's patch-inclusion bound with a safety factor."""
    bound = spacing_bound(metrics.dim, metrics.w_star, metrics.alpha)
    s = SPACING_SAFETY * bound
    lo_box = np.asarray(bbox[0], dtype=float)
    hi_box = np.asarray(bbox[1], dtype=float)
    extent = hi_box - lo_box
    tau = PADDING_FRACTION * float(extent.max()) if padding is None else float(padding)
    lo = lo_box - tau
    dims = np.maximum(np.ceil((extent + 2.0 * tau) / s).astype(np.int64), 1)
    grid = GridSpec(lo=tuple(lo.tolist()), s=s, dims=tuple(int(d) for d in dims), padding=tau)
    logger.info(f"Grid: s={s:.6g} (bound {bound:.6g}), dims={grid.dims}, {grid.n_cells} cells, tau={tau:.4g}")
    return grid
