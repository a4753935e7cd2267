"""Thin-plate-spline warps: fitting, point transforms, image resampling.

A warp maps the plane through an affine part plus radial-basis corrections
anchored at the control sites:

    f(p) = a0 + a1*px + a2*py + sum_i w_i * U(|p - s_i|),   U(r) = r^2 log r^2

with U(0) = 0 by continuity. Fitting solves the standard augmented linear
system; a smoothing weight lambda is added to the kernel diagonal, so
lambda = 0 interpolates the correspondences exactly and larger values trade
site accuracy for smoothness. The side conditions P^T w = 0 make the radial
part orthogonal to the affine span, which is why an affine correspondence is
reproduced with (numerically) zero rbf weights.

Image application uses the backward warp (canvas -> garment image) and
bilinear sampling, so every output pixel is a convex combination of at most
four source pixels: the warp can never invent colors that are not in the
neutral garment photo.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assets import GarmentAsset
from .errors import DegenerateFitError, WarpError
from .raster import alpha_over, bilinear_sample, mask_boundary
from .schema import ControlPointSet, Side, schema_for_version

DEFAULT_SMOOTHING = 1e-3

# Side-condition tolerance: fitted rbf weights must satisfy |P^T w| below
# this, otherwise the solve was numerically degenerate.
_SIDE_CONDITION_TOL = 1e-8

# Canvas padding (normalized units) around the forward-mapped mask extent.
_EXTENT_PAD = 0.02


def _kernel(r2: np.ndarray) -> np.ndarray:
    """U as a function of squared distance; U(0) = 0."""
    out = np.zeros_like(r2)
    nz = r2 > 0
    out[nz] = r2[nz] * np.log(r2[nz])
    return out


@dataclass(frozen=True, eq=False)
class TPSWarp:
    """Fitted warp parameters. ``affine`` is 2x3 as [[c, cx, cy] per output]."""

    sites: np.ndarray
    affine: np.ndarray
    rbf_weights: np.ndarray
    regularization: float

    @property
    def control_count(self) -> int:
        return len(self.sites)

    def transform(self, pts: np.ndarray) -> np.ndarray:
        return transform_points(self, pts)


def fit_tps(src: np.ndarray, dst: np.ndarray, smoothing: float = 0.0) -> TPSWarp:
    """Fit a thin-plate-spline warp sending ``src`` sites toward ``dst``.

    Needs at least 3 non-collinear source points. With smoothing 0 the warp
    passes through every correspondence; smoothing > 0 relaxes that.
    """
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    if src.ndim != 2 or src.shape[1] != 2 or src.shape != dst.shape:
        raise WarpError(f"need matching (n, 2) point arrays, got {src.shape} and {dst.shape}")
    n = src.shape[0]
    if n < 3:
        raise WarpError(f"need at least 3 correspondences, got {n}")
    if smoothing < 0:
        raise WarpError("smoothing must be non-negative")
    p = np.column_stack([np.ones(n), src])
    if np.linalg.matrix_rank(p) < 3:
        raise DegenerateFitError("control sites are collinear or coincident")
    diff = src[:, None, :] - src[None, :, :]
    k = _kernel((diff**2).sum(axis=2))
    if smoothing == 0.0:
        d2 = (diff**2).sum(axis=2)
        np.fill_diagonal(d2, np.inf)
        if d2.min() == 0.0:
            raise DegenerateFitError("duplicate control sites with no smoothing")
    system = np.zeros((n + 3, n + 3))
    system[:n, :n] = k + smoothing * np.eye(n)
    system[:n, n:] = p
    system[n:, :n] = p.T
    rhs = np.zeros((n + 3, 2))
    rhs[:n] = dst
    try:
        solution = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateFitError(f"warp system is singular: {exc}") from exc
    weights = solution[:n]
    affine = solution[n:].T  # (2, 3): rows are output x / output y
    residual = np.abs(p.T @ weights).max()
    if residual > _SIDE_CONDITION_TOL:
        raise DegenerateFitError(
            f"warp solve is numerically degenerate (side-condition residual {residual:.2e})"
        )
    sites = np.array(src)
    sites.setflags(write=False)
    affine.setflags(write=False)
    weights.setflags(write=False)
    return TPSWarp(sites=sites, affine=affine, rbf_weights=weights, regularization=smoothing)


def transform_points(warp: TPSWarp, pts: np.ndarray) -> np.ndarray:
    """Apply a fitted warp to (n, 2) points.

    The radial sum accumulates site by site with elementwise ops only, so
    results are bit-identical regardless of BLAS threading.
    """
    pts = np.asarray(pts, dtype=np.float64)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    out = warp.affine[:, 0] + pts @ warp.affine[:, 1:].T
    for i in range(warp.control_count):
        dx = pts[:, 0] - warp.sites[i, 0]
        dy = pts[:, 1] - warp.sites[i, 1]
        u = _kernel(dx * dx + dy * dy)
        out[:, 0] += warp.rbf_weights[i, 0] * u
        out[:, 1] += warp.rbf_weights[i, 1] * u
    return out[0] if single else out


@dataclass(frozen=True, eq=False)
class WarpedGarment:
    """A garment resampled onto the person canvas.

    ``mask`` is exactly the nonzero-alpha support of ``image``. The fitted
    warps are kept for later point queries; merged composites have none.
    """

    image: np.ndarray
    mask: np.ndarray
    forward: TPSWarp | None
    backward: TPSWarp | None

    @property
    def canvas(self) -> tuple[int, int]:
        return self.image.shape[1], self.image.shape[0]


def _shared_sites(asset: GarmentAsset, on_body: ControlPointSet) -> np.ndarray:
    shared = asset.source_points.present & on_body.present
    ids = np.flatnonzero(shared)
    if ids.size < 3:
        raise WarpError(
            f"garment '{asset.id}': only {ids.size} shared control points; need >= 3"
        )
    return ids


def warp_image(
    asset: GarmentAsset,
    on_body: ControlPointSet,
    canvas: tuple[int, int],
    smoothing: float = DEFAULT_SMOOTHING,
) -> WarpedGarment:
    """Resample a garment onto the person canvas at its on-body points.

    Fits the backward warp (on-body -> garment frame) over the control
    points present on both sides, back-maps each canvas pixel, and samples
    the garment image bilinearly wherever the garment mask holds. Purely
    deterministic: same inputs, bit-identical raster.
    """
    width, height = canvas
    if width < 2 or height < 2:
        raise WarpError(f"canvas {canvas} is too small")
    ids = _shared_sites(asset, on_body)
    body_pts = on_body.coords[ids]
    garment_pts = asset.source_points.coords[ids]
    backward = fit_tps(body_pts, garment_pts, smoothing)
    forward = fit_tps(garment_pts, body_pts, smoothing)

    out_image = np.zeros((height, width, 4), dtype=np.uint8)

    # Forward-map the mask outline to find which canvas region can possibly
    # receive garment pixels; everything else stays empty.
    gh, gw = asset.mask.shape
    boundary = np.argwhere(mask_boundary(asset.mask))
    if boundary.size == 0:
        raise WarpError(f"garment '{asset.id}': mask is empty")
    step = max(1, len(boundary) // 512)
    outline = boundary[::step].astype(np.float64)
    outline_norm = np.column_stack([outline[:, 1] / (gw - 1), outline[:, 0] / (gh - 1)])
    extent = forward.transform(outline_norm)
    x_lo = int(np.floor((extent[:, 0].min() - _EXTENT_PAD) * (width - 1)))
    x_hi = int(np.ceil((extent[:, 0].max() + _EXTENT_PAD) * (width - 1)))
    y_lo = int(np.floor((extent[:, 1].min() - _EXTENT_PAD) * (height - 1)))
    y_hi = int(np.ceil((extent[:, 1].max() + _EXTENT_PAD) * (height - 1)))
    x_lo, x_hi = max(0, x_lo), min(width - 1, x_hi)
    y_lo, y_hi = max(0, y_lo), min(height - 1, y_hi)
    if x_lo > x_hi or y_lo > y_hi:
        mask_out = np.zeros((height, width), dtype=bool)
        return WarpedGarment(image=out_image, mask=mask_out, forward=forward, backward=backward)

    cols = np.arange(x_lo, x_hi + 1)
    rows = np.arange(y_lo, y_hi + 1)
    grid_x, grid_y = np.meshgrid(cols / (width - 1), rows / (height - 1))
    pts = np.column_stack([grid_x.ravel(), grid_y.ravel()])
    mapped = backward.transform(pts)
    gx = mapped[:, 0] * (gw - 1)
    gy = mapped[:, 1] * (gh - 1)
    rgba, inbounds = bilinear_sample(asset.image, gx, gy)
    mask_val, _ = bilinear_sample(asset.mask.astype(np.float64), gx, gy)
    keep = inbounds & (mask_val >= 0.5)
    rgba[~keep] = 0.0
    block = np.rint(np.clip(rgba, 0, 255)).astype(np.uint8)
    out_image[y_lo : y_hi + 1, x_lo : x_hi + 1] = block.reshape(len(rows), len(cols), 4)
    mask_out = out_image[:, :, 3] > 0
    return WarpedGarment(image=out_image, mask=mask_out, forward=forward, backward=backward)


def split_garment(asset: GarmentAsset) -> tuple[GarmentAsset, GarmentAsset]:
    """Cut an outerwear asset along its split polyline into two halves.

    The mask is partitioned pixel-exactly (union is the original, overlap is
    empty). Side-specific control points go to their half; center points are
    duplicated to both so the halves stay attached at the neck line.
    """
    if asset.split_polyline is None:
        raise WarpError(f"garment '{asset.id}' has no split polyline")
    poly = asset.split_polyline
    h, w = asset.mask.shape
    rows_present = np.flatnonzero(asset.mask.any(axis=1))
    y_norm = rows_present / (h - 1)
    if y_norm.min() < poly[0, 1] - 0.5 / (h - 1) or y_norm.max() > poly[-1, 1] + 0.5 / (h - 1):
        raise WarpError(
            f"garment '{asset.id}': split polyline does not span the mask vertically"
        )
    all_rows = np.arange(h) / (h - 1)
    split_x = np.interp(all_rows, poly[:, 1], poly[:, 0])
    col_norm = np.arange(w) / (w - 1)
    left_side = col_norm[None, :] < split_x[:, None]
    left_mask = asset.mask & left_side
    right_mask = asset.mask & ~left_side

    schema = schema_for_version(asset.source_points.schema_version)
    sides = np.array([schema.side_of(i) for i in range(len(asset.source_points.present))])
    keep_left = np.isin(sides, (Side.LEFT, Side.CENTER))
    keep_right = np.isin(sides, (Side.RIGHT, Side.CENTER))

    def half(mask: np.ndarray, keep: np.ndarray, tag: str) -> GarmentAsset:
        points = asset.source_points.with_(present=asset.source_points.present & keep)
        return GarmentAsset(
            id=f"{asset.id}.{tag}",
            category=asset.category,
            tags=asset.tags | {f"split:{tag}"},
            gender=asset.gender,
            image=asset.image,
            mask=mask,
            source_points=points,
            split_polyline=None,
        )

    return half(left_mask, keep_left, "left"), half(right_mask, keep_right, "right")


def merge_warped(left: WarpedGarment, right: WarpedGarment) -> WarpedGarment:
    """Composite the two halves of a split garment, right over left."""
    if left.image.shape != right.image.shape:
        raise WarpError(f"canvas mismatch: {left.image.shape} vs {right.image.shape}")
    image = alpha_over(right.image, left.image)
    return WarpedGarment(image=image, mask=image[:, :, 3] > 0, forward=None, backward=None)
