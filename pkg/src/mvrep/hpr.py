"""Hidden point removal by spherical flipping.

Points are reflected about a large sphere centred on the viewpoint; a point
is classified visible exactly when its flipped image is a vertex of the
convex hull of the flipped set together with the viewpoint.  The flip radius
is ``radius_factor`` times the farthest point distance, computed on the set
actually passed in (cull before calling for frustum semantics).
"""

from __future__ import annotations

import numpy as np

from .geometry import (
    EPS_DIST,
    DegenerateInputError,
    bounding_box,
    convex_hull_3d,
    spherical_flip,
)

__all__ = ["visible_points"]


def visible_points(points, viewpoint, radius_factor: float = 1000.0, *, seed: int = 0) -> np.ndarray:
    """Indices of points visible from ``viewpoint``.

    Args:
        points: (n, 3) array or PointCloud-like object.
        viewpoint: camera position.
        radius_factor: flip radius as a multiple of the farthest point
            distance; must be >= 1 so the flip sphere covers the set.
            Densely sampled convex exteriors are insensitive to it over
            10..1000, but concave interiors (rooms) lose grazing surfaces
            badly below a few hundred, hence the large default.  Very large
            factors do start to leak back-surface points once sampling gets
            sparse, so match the factor to the scene, not the other way
            round.
        seed: seeds the one jitter retry used when the flipped set is
            degenerate for hull construction.

    Returns:
        Sorted array of visible indices into the input.  Sets with fewer
        than 4 points are returned in full: a hull cannot distinguish them.
    """
    pts = np.asarray(getattr(points, "positions", points), dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) point array, got shape {pts.shape}")
    n = pts.shape[0]
    if n == 0:
        raise ValueError("visibility of an empty point set is undefined")
    if not radius_factor >= 1.0:
        raise ValueError(f"radius_factor must be >= 1, got {radius_factor}")
    vp = np.asarray(viewpoint, dtype=np.float64).reshape(3)

    dists = np.linalg.norm(pts - vp, axis=1)
    nearest = int(np.argmin(dists))
    if dists[nearest] < EPS_DIST:
        raise ValueError(
            f"point {nearest} lies within {EPS_DIST} of the viewpoint"
        )
    if n < 4:
        return np.arange(n, dtype=np.intp)

    radius = radius_factor * float(dists.max())
    flipped = spherical_flip(pts, vp, radius)
    hull_input = np.vstack([flipped, vp])
    try:
        hull = convex_hull_3d(hull_input)
    except DegenerateInputError:
        # One deterministic retry with a tiny seeded jitter; genuinely flat
        # inputs fail again and the error propagates.
        rng = np.random.default_rng(seed)
        scale = 1e-7 * bounding_box(hull_input).diameter
        hull = convex_hull_3d(hull_input + rng.normal(size=hull_input.shape) * scale)
    visible = hull.vertex_indices[hull.vertex_indices < n]
    return np.sort(visible).astype(np.intp)
