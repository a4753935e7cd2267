"""PNG-backed raster helpers shared by the warper, layouts, and compositor.

Conventions used everywhere:
  - RGBA rasters are uint8 (H, W, 4) with straight (non-premultiplied) alpha.
  - Masks are boolean (H, W).
  - Normalized coordinates map to pixel centers via px = x * (width - 1),
    py = y * (height - 1), so x, y in [0, 1] spans the full pixel grid.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image


def load_rgba(path: Path | str) -> np.ndarray:
    with Image.open(path) as img:
        return np.array(img.convert("RGBA"), dtype=np.uint8)


def save_rgba(image: np.ndarray, path: Path | str) -> None:
    Image.fromarray(np.asarray(image, dtype=np.uint8), mode="RGBA").save(path)


def load_mask(path: Path | str) -> np.ndarray:
    with Image.open(path) as img:
        return np.array(img.convert("L")) > 0


def save_mask(mask: np.ndarray, path: Path | str) -> None:
    Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L").save(path)


def load_indexed(path: Path | str) -> np.ndarray:
    """Read a palette or grayscale PNG as raw class indices."""
    with Image.open(path) as img:
        if img.mode not in ("P", "L"):
            raise ValueError(f"{path}: expected an indexed (P/L) PNG, got mode {img.mode}")
        return np.array(img, dtype=np.uint8)


def save_indexed(classes: np.ndarray, path: Path | str, palette: list[tuple[int, int, int]] | None = None) -> None:
    img = Image.fromarray(np.asarray(classes, dtype=np.uint8), mode="P")
    if palette is not None:
        flat = []
        for rgb in palette:
            flat.extend(rgb)
        flat.extend([0] * (768 - len(flat)))
        img.putpalette(flat)
    img.save(path)


def alpha_over(top: np.ndarray, bottom: np.ndarray) -> np.ndarray:
    """Composite ``top`` over ``bottom`` (straight alpha, uint8 in and out)."""
    if top.shape != bottom.shape:
        raise ValueError(f"canvas mismatch: {top.shape} vs {bottom.shape}")
    ta = top[..., 3:4].astype(np.float64) / 255.0
    ba = bottom[..., 3:4].astype(np.float64) / 255.0
    out_a = ta + ba * (1.0 - ta)
    top_rgb = top[..., :3].astype(np.float64)
    bot_rgb = bottom[..., :3].astype(np.float64)
    out_rgb = top_rgb * ta + bot_rgb * ba * (1.0 - ta)
    np.divide(out_rgb, out_a, out=out_rgb, where=out_a > 0)
    result = np.empty_like(top)
    result[..., :3] = np.rint(np.clip(out_rgb, 0, 255)).astype(np.uint8)
    result[..., 3] = np.rint(np.clip(out_a[..., 0] * 255.0, 0, 255)).astype(np.uint8)
    return result


def bilinear_sample(image: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sample ``image`` at fractional pixel coordinates.

    Returns (values, inbounds). Values are float64, shape (n, channels) for a
    (H, W, C) image or (n,) for (H, W); out-of-bounds samples are zero.
    Each in-bounds value is a convex combination of at most 4 source pixels.
    """
    h, w = image.shape[:2]
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    inbounds = (xs >= 0) & (xs <= w - 1) & (ys >= 0) & (ys <= h - 1)
    x = np.clip(xs, 0, w - 1)
    y = np.clip(ys, 0, h - 1)
    x0 = np.floor(x).astype(np.intp)
    y0 = np.floor(y).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = x - x0
    fy = y - y0
    if image.ndim == 3:
        fx = fx[:, None]
        fy = fy[:, None]
    data = image.astype(np.float64)
    value = (
        data[y0, x0] * (1 - fx) * (1 - fy)
        + data[y0, x1] * fx * (1 - fy)
        + data[y1, x0] * (1 - fx) * fy
        + data[y1, x1] * fx * fy
    )
    if image.ndim == 3:
        value[~inbounds] = 0.0
    else:
        value = np.where(inbounds, value, 0.0)
    return value, inbounds


def mask_boundary(mask: np.ndarray) -> np.ndarray:
    """Pixels of a mask that touch its outside (4-neighbour erosion residue)."""
    from scipy import ndimage

    if not mask.any():
        return np.zeros_like(mask)
    eroded = ndimage.binary_erosion(mask, border_value=0)
    return mask & ~eroded
