"""Segment/box, segment/ball and triangle/box intersection kernels.

Every predicate works on closed sets. The vectorized forms take stacked
arrays (one row per candidate pair) and are what the index builders use;
the scalar forms wrap them for single queries.
"""
from typing import Optional, Tuple

import numpy as np

from utils.errors import ZeroVectorError


def clip_segments_to_boxes(v1: np.ndarray, v2: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                           slack: float = 0.0) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Slab clipping of segments v1->v2 against boxes [lo, hi].

    Returns (hit, t_enter, t_exit); the parameters are only meaningful where hit.
    """
    v1 = np.asarray(v1, dtype=float)
    direction = np.asarray(v2, dtype=float) - v1
    lo = np.asarray(lo, dtype=float) - slack
    hi = np.asarray(hi, dtype=float) + slack
    shape = np.broadcast_shapes(v1.shape, lo.shape)[:-1]
    t_enter = np.zeros(shape)
    t_exit = np.ones(shape)
    hit = np.ones(shape, dtype=bool)
    for axis in range(v1.shape[-1]):
        d = direction[..., axis]
        o = v1[..., axis]
        flat = d == 0.0
        safe = np.where(flat, 1.0, d)
        ta = (lo[..., axis] - o) / safe
        tb = (hi[..., axis] - o) / safe
        t_near = np.where(flat, -np.inf, np.minimum(ta, tb))
        t_far = np.where(flat, np.inf, np.maximum(ta, tb))
        hit &= ~flat | ((o >= lo[..., axis]) & (o <= hi[..., axis]))
        t_enter = np.maximum(t_enter, t_near)
        t_exit = np.minimum(t_exit, t_far)
    hit &= t_enter <= t_exit
    return hit, t_enter, t_exit


def segment_box_intersection(v1, v2, box_lo, box_hi) -> Optional[float]:
    """First parameter t in [0, 1] where v1 + t(v2 - v1) lies in the closed box, or None."""
    hit, t_enter, _ = clip_segments_to_boxes(
        np.asarray(v1, dtype=float)[None], np.asarray(v2, dtype=float)[None],
        np.asarray(box_lo, dtype=float)[None], np.asarray(box_hi, dtype=float)[None]
    )
    return float(t_enter[0]) if hit[0] else None


def clip_segments_to_balls(v1: np.ndarray, v2: np.ndarray, centers: np.ndarray,
                           radius) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Parameter interval of each segment inside the closed ball around each center, clipped to [0, 1]."""
    v1 = np.asarray(v1, dtype=float)
    direction = np.asarray(v2, dtype=float) - v1
    offset = v1 - np.asarray(centers, dtype=float)
    a = np.sum(direction * direction, axis=-1)
    b = 2.0 * np.sum(direction * offset, axis=-1)
    c = np.sum(offset * offset, axis=-1) - np.asarray(radius, dtype=float) ** 2
    a_safe = np.where(a > 0.0, a, 1.0)
    disc = b * b - 4.0 * a * c
    root = np.sqrt(np.maximum(disc, 0.0))
    t1 = np.where(a > 0.0, (-b - root) / (2.0 * a_safe), 0.0)
    t2 = np.where(a > 0.0, (-b + root) / (2.0 * a_safe), 1.0)
    t1 = np.maximum(t1, 0.0)
    t2 = np.minimum(t2, 1.0)
    reachable = np.where(a > 0.0, disc >= 0.0, c <= 0.0)
    hit = reachable & (t1 <= t2)
    return hit, t1, t2


def segment_ball_intersection(v1, v2, center, radius: float) -> Optional[Tuple[float, float]]:
    """Clipped (t1, t2) where the segment meets the closed ball, or None."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    hit, t1, t2 = clip_segments_to_balls(
        np.asarray(v1, dtype=float)[None], np.asarray(v2, dtype=float)[None],
        np.asarray(center, dtype=float)[None], radius
    )
    return (float(t1[0]), float(t2[0])) if hit[0] else None


def triangles_intersect_boxes(tri: np.ndarray, box_lo: np.ndarray, box_hi: np.ndarray,
                              slack: float = 0.0) -> np.ndarray:
    """Separating-axis test of closed triangles (P, 3, 3) against closed boxes (P, 3)."""
    tri = np.asarray(tri, dtype=float)
    box_lo = np.asarray(box_lo, dtype=float)
    box_hi = np.asarray(box_hi, dtype=float)
    center = 0.5 * (box_lo + box_hi)
    half = 0.5 * (box_hi - box_lo) + slack
    v = tri - center[..., None, :]
    edges = np.stack([v[..., 1, :] - v[..., 0, :],
                      v[..., 2, :] - v[..., 1, :],
                      v[..., 0, :] - v[..., 2, :]], axis=-2)

    axes = [np.broadcast_to(np.eye(3)[k], v.shape[:-2] + (3,)) for k in range(3)]
    axes.append(np.cross(edges[..., 0, :], edges[..., 1, :]))
    for i in range(3):
        for k in range(3):
            axes.append(np.cross(edges[..., i, :], np.eye(3)[k]))

    overlap = np.ones(v.shape[:-2], dtype=bool)
    for axis in axes:
        proj = np.einsum("...jk,...k->...j", v, axis)
        radius = np.sum(half * np.abs(axis), axis=-1)
        overlap &= ~((proj.min(axis=-1) > radius) | (proj.max(axis=-1) < -radius))
    return overlap


def triangle_box_intersect(f_vertices, box_lo, box_hi) -> bool:
    """True iff the closed triangle meets the closed box."""
    tri = np.asarray(f_vertices, dtype=float)[None]
    return bool(triangles_intersect_boxes(tri, np.asarray(box_lo, dtype=float)[None],
                                          np.asarray(box_hi, dtype=float)[None])[0])


def chi_points(nu1: np.ndarray, nu3: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Feet of the perpendiculars from each center onto the line through nu1, nu3."""
    nu1 = np.asarray(nu1, dtype=float)
    d = np.asarray(nu3, dtype=float) - nu1
    length = np.linalg.norm(d, axis=-1, keepdims=True)
    if np.any(length == 0.0):
        raise ZeroVectorError("edge of zero length has no supporting line")
    d_hat = d / length
    along = np.sum((np.asarray(centers, dtype=float) - nu1) * d_hat, axis=-1, keepdims=True)
    return nu1 + along * d_hat


def chi_point(nu1, nu3, center) -> np.ndarray:
    """Point on the line along edge (nu1, nu3) whose offset to center is perpendicular to the edge."""
    return chi_points(np.asarray(nu1, dtype=float)[None], np.asarray(nu3, dtype=float)[None],
                      np.asarray(center, dtype=float)[None])[0]
