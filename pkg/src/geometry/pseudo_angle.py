"""Pseudo-angles: a cheap monotone stand-in for the clockwise angle from (0, 1).

The value lies in [-2, 2): -2 for the reference direction (0, 1), -1 for
(1, 0), 0 for (0, -1) and 1 for (-1, 0). Only the ordering is meaningful.
"""
from bisect import bisect_right
from typing import Sequence

import numpy as np

from utils.errors import ZeroVectorError

PseudoAngle = float


def pseudo_angle(x: float, y: float) -> PseudoAngle:
    """Pseudo-angle of the direction (x, y), ordered like the clockwise angle from (0, 1)."""
    if x == 0.0 and y == 0.0:
        raise ZeroVectorError("pseudo-angle of the zero vector is undefined")
    sx = 1.0 if x >= 0.0 else -1.0
    sy = 1.0 if y >= 0.0 else -1.0
    return sx * x / (sy * x + sx * y) - sx * (sy + 1.0)


def pseudo_angles(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized pseudo_angle; zero vectors raise."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any((x == 0.0) & (y == 0.0)):
        raise ZeroVectorError("pseudo-angle of the zero vector is undefined")
    sx = np.where(x >= 0.0, 1.0, -1.0)
    sy = np.where(y >= 0.0, 1.0, -1.0)
    return sx * x / (sy * x + sx * y) - sx * (sy + 1.0)


def sector_search(sorted_angles: Sequence[PseudoAngle], query: PseudoAngle) -> int:
    """Index i with angles[i] <= query < angles[i+1], wrapping to the last sector.

    Sectors are left-closed, so a query exactly on a ray belongs to the
    sector that ray opens.
    """
    i = bisect_right(sorted_angles, query) - 1
    return i if i >= 0 else len(sorted_angles) - 1
