"""2D convex-hull utilities: construction, containment margins, projection.

All polygons are (m, 2) float arrays in counterclockwise order in coordinate
algebra (positive cross products), with no repeated closing vertex. The
canvas y axis points down, which flips the visual sense of "counterclockwise"
but changes none of the math.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateFitError

# Extra erosion applied when moving a point inside a hull, so a follow-up
# containment check at the same margin cannot fail on float round-off.
PROJECTION_SLACK = 1e-9


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Andrew's monotone chain. Collinear boundary points are dropped."""
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)
    if len(pts) <= 2:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    lower: list[np.ndarray] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def inside_distance(hull: np.ndarray, point: np.ndarray) -> float:
    """Signed clearance of a point w.r.t. a convex hull.

    Positive inside (distance to the nearest edge line), negative outside.
    A point is at least ``m`` inside the hull iff inside_distance >= m.
    """
    if len(hull) < 3:
        raise DegenerateFitError(f"hull is degenerate ({len(hull)} points)")
    p = np.asarray(point, dtype=np.float64)
    best = np.inf
    for i in range(len(hull)):
        v0 = hull[i]
        v1 = hull[(i + 1) % len(hull)]
        d = v1 - v0
        length = float(np.hypot(d[0], d[1]))
        best = min(best, _cross(v0, v1, p) / length)
    return best


def _clip_halfplane(poly: np.ndarray, a: float, b: float, c: float) -> np.ndarray:
    """Keep the part of ``poly`` where a*x + b*y >= c (Sutherland-Hodgman)."""
    out: list[np.ndarray] = []
    n = len(poly)
    for i in range(n):
        cur, nxt = poly[i], poly[(i + 1) % n]
        f_cur = a * cur[0] + b * cur[1] - c
        f_nxt = a * nxt[0] + b * nxt[1] - c
        if f_cur >= 0:
            out.append(cur)
        if (f_cur > 0 and f_nxt < 0) or (f_cur < 0 and f_nxt > 0):
            t = f_cur / (f_cur - f_nxt)
            out.append(cur + t * (nxt - cur))
    return np.array(out) if out else np.empty((0, 2))


def erode_hull(hull: np.ndarray, margin: float) -> np.ndarray:
    """Shrink a convex hull by offsetting every edge inward by ``margin``."""
    if len(hull) < 3:
        raise DegenerateFitError(f"hull is degenerate ({len(hull)} points)")
    poly = np.array(hull, dtype=np.float64)
    if margin == 0:
        return poly
    for i in range(len(hull)):
        v0 = hull[i]
        v1 = hull[(i + 1) % len(hull)]
        d = v1 - v0
        length = float(np.hypot(d[0], d[1]))
        a, b = -d[1] / length, d[0] / length
        c = a * v0[0] + b * v0[1] + margin
        poly = _clip_halfplane(poly, a, b, c)
        if len(poly) == 0:
            raise DegenerateFitError("margin exceeds the hull inradius; nothing remains")
    return poly


def _nearest_on_boundary(poly: np.ndarray, p: np.ndarray) -> np.ndarray:
    if len(poly) == 1:
        return np.array(poly[0])
    best = None
    best_dist = np.inf
    n = len(poly)
    segments = n if n > 2 else 1
    for i in range(segments):
        v0 = poly[i]
        v1 = poly[(i + 1) % n]
        d = v1 - v0
        denom = float(d @ d)
        t = 0.0 if denom == 0 else float(np.clip((p - v0) @ d / denom, 0.0, 1.0))
        q = v0 + t * d
        dist = float(np.hypot(*(p - q)))
        if dist < best_dist:
            best_dist = dist
            best = q
    return np.array(best)


def project_into_hull(hull: np.ndarray, point: np.ndarray, margin: float = 0.0) -> np.ndarray:
    """Move a point to the nearest location at least ``margin`` inside a hull.

    Points already satisfying the margin are returned unchanged. Others are
    projected onto the hull eroded by margin (plus a hair of slack), which is
    the Euclidean projection onto a convex set: one pass reaches a fixpoint.
    """
    p = np.asarray(point, dtype=np.float64)
    if inside_distance(hull, p) >= margin:
        return np.array(p)
    eroded = erode_hull(hull, margin + PROJECTION_SLACK)
    if len(eroded) >= 3 and inside_distance(eroded, p) >= 0:
        return np.array(p)
    return _nearest_on_boundary(eroded, p)


def intersect_hulls(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Intersection of two convex polygons (possibly empty)."""
    poly = np.array(a, dtype=np.float64)
    for i in range(len(b)):
        v0 = b[i]
        v1 = b[(i + 1) % len(b)]
        d = v1 - v0
        length = float(np.hypot(d[0], d[1]))
        if length == 0:
            continue
        aa, bb = -d[1] / length, d[0] / length
        poly = _clip_halfplane(poly, aa, bb, aa * v0[0] + bb * v0[1])
        if len(poly) == 0:
            break
    return poly
