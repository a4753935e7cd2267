"""Garment asset bundles: the neutral product image plus its annotations.

An asset is a directory:

    <asset>/image.png    RGBA neutral garment photo (straight alpha)
    <asset>/mask.png     binary garment mask
    <asset>/points.json  source control points, in garment-image normalized
                         coordinates (same 49-slot layout as on-body sets)
    <asset>/meta.json    id, category, tags, gender, optional split_polyline

The split polyline (outerwear only) traces where the garment separates when
worn open, as (x, y) pairs in garment-image coordinates with y increasing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import AssetError
from .raster import load_mask, load_rgba, save_mask, save_rgba
from .schema import (
    ControlPointSet,
    GarmentCategory,
    GENDERS,
    default_schema,
    dumps_points,
    loads_points,
    schema_for_version,
)


@dataclass(frozen=True, eq=False)
class GarmentAsset:
    id: str
    category: GarmentCategory
    tags: frozenset[str]
    gender: str
    image: np.ndarray
    mask: np.ndarray
    source_points: ControlPointSet
    split_polyline: np.ndarray | None = None

    @property
    def size(self) -> tuple[int, int]:
        """(width, height) of the garment image."""
        return self.image.shape[1], self.image.shape[0]


def validate_asset(asset: GarmentAsset) -> None:
    """Check the invariants an authored bundle must satisfy.

    Derived assets (e.g. the halves of a split jacket) intentionally relax
    these, so validation runs at load time rather than in the constructor.
    """
    if asset.gender not in GENDERS:
        raise AssetError(f"asset '{asset.id}': unknown gender '{asset.gender}'")
    if asset.image.ndim != 3 or asset.image.shape[2] != 4:
        raise AssetError(f"asset '{asset.id}': image must be RGBA")
    if asset.mask.shape != asset.image.shape[:2]:
        raise AssetError(f"asset '{asset.id}': mask and image dimensions differ")
    if not asset.mask.any():
        raise AssetError(f"asset '{asset.id}': mask is empty")
    schema = schema_for_version(asset.source_points.schema_version)
    applicable = schema.applicability(asset.category)
    if not np.array_equal(asset.source_points.present, applicable):
        bad = np.flatnonzero(asset.source_points.present ^ applicable)
        name = schema.point(int(bad[0])).name
        raise AssetError(
            f"asset '{asset.id}': source point presence does not match category "
            f"'{asset.category.value}' (first mismatch: '{name}')"
        )
    has_polyline = asset.split_polyline is not None
    if has_polyline != (asset.category == GarmentCategory.OUTERWEAR):
        raise AssetError(
            f"asset '{asset.id}': split_polyline must be present exactly for outerwear"
        )
    if has_polyline:
        poly = asset.split_polyline
        if poly.ndim != 2 or poly.shape[1] != 2 or poly.shape[0] < 2:
            raise AssetError(f"asset '{asset.id}': split_polyline must be (k>=2, 2)")
        if np.any(np.diff(poly[:, 1]) <= 0):
            raise AssetError(f"asset '{asset.id}': split_polyline y must be increasing")


def load_asset(path: Path | str, validate: bool = True) -> GarmentAsset:
    path = Path(path)
    for name in ("image.png", "mask.png", "points.json", "meta.json"):
        if not (path / name).exists():
            raise AssetError(f"asset bundle {path} is missing {name}")
    meta = json.loads((path / "meta.json").read_text())
    try:
        category = GarmentCategory(meta["category"])
    except (KeyError, ValueError) as exc:
        raise AssetError(f"asset bundle {path}: bad category in meta.json: {exc}") from exc
    polyline = meta.get("split_polyline")
    asset = GarmentAsset(
        id=str(meta.get("id", path.name)),
        category=category,
        tags=frozenset(meta.get("tags", ())),
        gender=str(meta.get("gender", "unisex")),
        image=load_rgba(path / "image.png"),
        mask=load_mask(path / "mask.png"),
        source_points=loads_points((path / "points.json").read_text()),
        split_polyline=None if polyline is None else np.array(polyline, dtype=np.float64),
    )
    if validate:
        validate_asset(asset)
    return asset


def save_asset(asset: GarmentAsset, path: Path | str) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    save_rgba(asset.image, path / "image.png")
    save_mask(asset.mask, path / "mask.png")
    (path / "points.json").write_text(dumps_points(asset.source_points))
    meta = {
        "id": asset.id,
        "category": asset.category.value,
        "tags": sorted(asset.tags),
        "gender": asset.gender,
        "split_polyline": None
        if asset.split_polyline is None
        else [[float(x), float(y)] for x, y in asset.split_polyline],
    }
    (path / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def load_catalog(root: Path | str) -> list[GarmentAsset]:
    """Load every asset bundle directly under ``root`` (sorted by name)."""
    root = Path(root)
    assets = []
    for entry in sorted(root.iterdir()):
        if entry.is_dir() and (entry / "meta.json").exists():
            assets.append(load_asset(entry))
    if not assets:
        raise AssetError(f"no asset bundles found under {root}")
    return assets
