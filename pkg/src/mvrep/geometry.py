"""Core geometry: bounding boxes, spherical flipping, convex hulls, frustum tests.

Conventions used throughout the package: right-handed world frame with z up,
yaw measured about +z from the +x axis, pitch positive upward.  All distances
are metres, all angles in function signatures are degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull as _QhullHull
from scipy.spatial import QhullError

__all__ = [
    "EPS_DIST",
    "HULL_EPS_SCALE",
    "Aabb",
    "FovSpec",
    "Perspective",
    "ConvexHull3",
    "DegenerateInputError",
    "bounding_box",
    "camera_axes",
    "in_frustum",
    "frustum_mask",
    "spherical_flip",
    "convex_hull_3d",
]

# Closer than this to a viewpoint and a point has no usable ray direction.
EPS_DIST = 1e-6

# Facet / coplanarity tolerance, relative to the input diameter.
HULL_EPS_SCALE = 1e-9


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned bounding box given by its two extreme corners."""

    lo: np.ndarray
    hi: np.ndarray

    @property
    def extent(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))


def _as_points(points) -> np.ndarray:
    """Accept a PointCloud-like object or a raw (n, 3) array."""
    pts = getattr(points, "positions", points)
    pts = np.asarray(pts, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) point array, got shape {pts.shape}")
    return pts


def bounding_box(points) -> Aabb:
    """Tight axis-aligned bounds of a non-empty point set.

    Args:
        points: (n, 3) array or any object with a ``positions`` attribute.

    Returns:
        Aabb with ``lo = min`` and ``hi = max`` taken per axis.
    """
    pts = _as_points(points)
    if pts.shape[0] == 0:
        raise ValueError("bounding box of an empty point set is undefined")
    return Aabb(pts.min(axis=0), pts.max(axis=0))


@dataclass(frozen=True)
class FovSpec:
    """Pinhole field-of-view and depth window of the simulated sensor."""

    hfov_deg: float = 70.0
    vfov_deg: float = 60.0
    min_depth: float = 0.5
    max_depth: float = 4.0

    def __post_init__(self) -> None:
        if not 0.0 < self.hfov_deg < 180.0:
            raise ValueError(f"hfov_deg must be in (0, 180), got {self.hfov_deg}")
        if not 0.0 < self.vfov_deg < 180.0:
            raise ValueError(f"vfov_deg must be in (0, 180), got {self.vfov_deg}")
        if not 0.0 < self.min_depth < self.max_depth:
            raise ValueError(
                f"need 0 < min_depth < max_depth, got {self.min_depth}, {self.max_depth}"
            )


@dataclass(frozen=True)
class Perspective:
    """A single simulated camera pose: position plus yaw/pitch heading."""

    perspective_id: int
    viewpoint: tuple[float, float, float]
    yaw_deg: float
    pitch_deg: float
    fov: FovSpec


def camera_axes(yaw_deg: float, pitch_deg: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orthonormal (forward, right, up) axes for a yaw-then-pitch heading.

    Yaw rotates about world +z starting from +x; pitch then tilts the forward
    axis about the (still horizontal) right axis, positive upward.
    """
    yaw = math.radians(yaw_deg)
    pitch = math.radians(pitch_deg)
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    forward = np.array([cp * cy, cp * sy, sp])
    right = np.array([sy, -cy, 0.0])
    up = np.array([-sp * cy, -sp * sy, cp])
    return forward, right, up


def frustum_mask(points, perspective: Perspective) -> np.ndarray:
    """Vectorized frustum test.

    A point is inside when its forward depth d satisfies
    ``min_depth <= d <= max_depth`` and both angular offsets
    ``|atan2(lateral, d)| <= hfov/2`` and ``|atan2(vertical, d)| <= vfov/2``
    hold.  All bounds are inclusive, so boundary points count as inside.

    Returns:
        Boolean mask of shape (n,).
    """
    pts = _as_points(points)
    fov = perspective.fov
    forward, right, up = camera_axes(perspective.yaw_deg, perspective.pitch_deg)
    rel = pts - np.asarray(perspective.viewpoint, dtype=np.float64)
    d = rel @ forward
    lateral = rel @ right
    vertical = rel @ up
    half_h = math.radians(fov.hfov_deg) / 2.0
    half_v = math.radians(fov.vfov_deg) / 2.0
    mask = (d >= fov.min_depth) & (d <= fov.max_depth)
    mask &= np.abs(np.arctan2(lateral, d)) <= half_h
    mask &= np.abs(np.arctan2(vertical, d)) <= half_v
    return mask


def in_frustum(point, perspective: Perspective) -> bool:
    """Scalar wrapper around :func:`frustum_mask` for a single point."""
    pt = np.asarray(point, dtype=np.float64).reshape(1, 3)
    return bool(frustum_mask(pt, perspective)[0])


def spherical_flip(
    points, viewpoint, radius: float, *, eps_dist: float = EPS_DIST
) -> np.ndarray:
    """Reflect points about a sphere of ``radius`` centred on the viewpoint.

    With q = p - viewpoint, the image is ``q * (2 * radius / |q| - 1)`` moved
    back to world coordinates.  The map keeps each ray direction, swaps the
    radial order of points on a common ray, and is an involution for any
    point with ``0 < |q| <= 2 * radius``; that bound is also the validity
    domain enforced here, so applying the flip twice with one radius is
    legal.  Hidden point removal itself always calls with the radius at or
    above the farthest point distance.

    Args:
        points: (n, 3) array or PointCloud-like object.
        viewpoint: flip centre.
        radius: sphere radius; at least half the farthest point distance.
        eps_dist: minimum allowed distance from the viewpoint.

    Returns:
        (n, 3) array of flipped points.
    """
    pts = _as_points(points)
    vp = np.asarray(viewpoint, dtype=np.float64).reshape(3)
    rel = pts - vp
    norms = np.linalg.norm(rel, axis=1)
    if pts.shape[0]:
        nearest = int(np.argmin(norms))
        if norms[nearest] < eps_dist:
            raise ValueError(
                f"point {nearest} lies within {eps_dist} of the viewpoint; "
                "its ray direction is undefined"
            )
        farthest = float(norms.max())
        if 2.0 * radius < farthest:
            raise ValueError(
                f"farthest point distance {farthest} exceeds twice the flip "
                f"radius {radius}; the image would cross the viewpoint"
            )
    return rel * (2.0 * radius / norms - 1.0)[:, None] + vp


class DegenerateInputError(ValueError):
    """Raised when a 3D hull is requested for points spanning < 3 dimensions."""

    def __init__(self, dimensionality: int, message: str):
        super().__init__(message)
        self.dimensionality = dimensionality


@dataclass(frozen=True)
class ConvexHull3:
    """Convex hull of a 3D point set.

    ``vertex_indices`` is the sorted set of extreme-point indices into the
    input array.  ``facets`` is an (m, 3) array of index triples whose
    winding is counter-clockwise seen from outside, i.e. the cross product
    of the first two edges points away from the interior.
    """

    vertex_indices: np.ndarray
    facets: np.ndarray


def _dimensionality(pts: np.ndarray, eps: float) -> int:
    centred = pts - pts.mean(axis=0)
    # s are the singular values of the tall-skinny centred matrix; a span
    # direction is real only if it exceeds the scaled tolerance.
    s = np.linalg.svd(centred, compute_uv=False)
    return int(np.sum(s > eps))


def convex_hull_3d(points) -> ConvexHull3:
    """Convex hull with outward-oriented triangular facets.

    Uses quickhull (qhull via scipy) under the package's contract: input
    spanning fewer than 3 dimensions raises :class:`DegenerateInputError`
    carrying the detected dimensionality, and every returned facet is
    re-oriented so its normal points outward.
    """
    pts = _as_points(points)
    n = pts.shape[0]
    if n == 0:
        raise ValueError("convex hull of an empty point set is undefined")
    diameter = bounding_box(pts).diameter
    eps = HULL_EPS_SCALE * diameter if diameter > 0.0 else 0.0
    dim = _dimensionality(pts, eps) if n > 1 else 0
    if n < 4 or dim < 3:
        raise DegenerateInputError(
            dim, f"hull input spans only {dim} dimensions ({n} points)"
        )
    try:
        hull = _QhullHull(pts)
    except QhullError as exc:  # full-rank input that qhull still rejects
        raise DegenerateInputError(
            dim, f"qhull failed on near-degenerate input: {exc}"
        ) from exc
    facets = hull.simplices.copy()
    normals = hull.equations[:, :3]
    a, b, c = pts[facets[:, 0]], pts[facets[:, 1]], pts[facets[:, 2]]
    winding = np.einsum("ij,ij->i", np.cross(b - a, c - a), normals)
    flip = winding < 0.0
    facets[flip] = facets[flip][:, [0, 2, 1]]
    return ConvexHull3(vertex_indices=np.unique(facets), facets=facets)
