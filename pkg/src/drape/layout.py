"""Semantic layouts, the occlusion rule, style labeling, and coordination.

A layout is a class-indexed raster over the person canvas. The class table
is versioned alongside the point schema; rasters save as indexed PNG with
the table in a JSON sidecar (same path with a ``.classes.json`` suffix).

The occlusion rule clears a garment category's own region plus the skin
classes it connects to (dressing a top invalidates the arms and neckline,
never the legs), which is what lets a new garment be painted cleanly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy import ndimage

from . import geometry
from .assets import GarmentAsset
from .errors import LayoutError
from .pose import BodyPose
from .raster import load_indexed, save_indexed
from .schema import ControlPointSet, GarmentCategory, PointGroup, schema_for_version
from .warp import WarpedGarment

LAYOUT_VERSION = "1.0"

CLASS_TABLE: dict[str, int] = {
    "background": 0,
    "hair": 1,
    "face": 2,
    "neckline_skin": 3,
    "arms": 4,
    "legs": 5,
    "top": 6,
    "bottom": 7,
    "outerwear": 8,
    "dress": 9,
    "shoes": 10,
}

# Skin classes directly connected to each garment category.
ADJACENT_SKIN: dict[GarmentCategory, tuple[str, ...]] = {
    GarmentCategory.TOP: ("arms", "neckline_skin"),
    GarmentCategory.OUTERWEAR: ("arms", "neckline_skin"),
    GarmentCategory.BOTTOM: ("legs",),
    GarmentCategory.SKIRT: ("legs",),
    GarmentCategory.DRESS: ("arms", "neckline_skin", "legs"),
}

# Layout class painted for each garment category (skirts raster as bottoms).
CATEGORY_CLASS: dict[GarmentCategory, str] = {
    GarmentCategory.TOP: "top",
    GarmentCategory.BOTTOM: "bottom",
    GarmentCategory.SKIRT: "bottom",
    GarmentCategory.OUTERWEAR: "outerwear",
    GarmentCategory.DRESS: "dress",
}

# Display palette for indexed PNGs (purely cosmetic).
PALETTE = [
    (0, 0, 0),
    (90, 60, 30),
    (240, 200, 170),
    (250, 220, 190),
    (235, 190, 160),
    (225, 180, 150),
    (70, 130, 200),
    (60, 90, 160),
    (180, 70, 70),
    (150, 80, 170),
    (40, 40, 40),
]


@dataclass(frozen=True, eq=False)
class SemanticLayout:
    """Class-id raster plus its class table."""

    classes: np.ndarray
    table: Mapping[str, int]
    version: str = LAYOUT_VERSION

    def __post_init__(self):
        arr = np.asarray(self.classes, dtype=np.uint8)
        valid = set(self.table.values())
        found = set(np.unique(arr).tolist())
        if not found <= valid:
            raise LayoutError(f"layout contains unknown class ids {sorted(found - valid)}")
        arr.setflags(write=False)
        object.__setattr__(self, "classes", arr)
        object.__setattr__(self, "table", dict(self.table))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SemanticLayout):
            return NotImplemented
        return (
            self.version == other.version
            and self.table == other.table
            and np.array_equal(self.classes, other.classes)
        )

    @property
    def size(self) -> tuple[int, int]:
        return self.classes.shape[1], self.classes.shape[0]

    def class_id(self, name: str) -> int:
        try:
            return self.table[name]
        except KeyError:
            raise LayoutError(f"unknown layout class '{name}'") from None

    def region(self, name: str) -> np.ndarray:
        return self.classes == self.class_id(name)

    def with_classes(self, classes: np.ndarray) -> "SemanticLayout":
        return SemanticLayout(classes=classes, table=self.table, version=self.version)


def blank_layout(canvas: tuple[int, int]) -> SemanticLayout:
    width, height = canvas
    return SemanticLayout(classes=np.zeros((height, width), dtype=np.uint8), table=CLASS_TABLE)


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".classes.json")


def save_layout(layout: SemanticLayout, path: Path | str) -> None:
    path = Path(path)
    save_indexed(layout.classes, path, palette=PALETTE)
    doc = {"version": layout.version, "classes": dict(layout.table)}
    _sidecar(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_layout(path: Path | str) -> SemanticLayout:
    path = Path(path)
    classes = load_indexed(path)
    sidecar = _sidecar(path)
    if sidecar.exists():
        doc = json.loads(sidecar.read_text())
        table = {str(k): int(v) for k, v in doc["classes"].items()}
        version = str(doc.get("version", LAYOUT_VERSION))
    else:
        table, version = CLASS_TABLE, LAYOUT_VERSION
    return SemanticLayout(classes=classes, table=table, version=version)


def occlude(layout: SemanticLayout, category: GarmentCategory) -> SemanticLayout:
    """Clear a garment category's region and its connected skin classes.

    Idempotent, and touches nothing outside the category's own class and its
    adjacency set.
    """
    if category not in ADJACENT_SKIN:
        raise LayoutError(f"unknown garment category '{category}'")
    cleared = [CATEGORY_CLASS[category], *ADJACENT_SKIN[category]]
    background = layout.class_id("background")
    classes = np.array(layout.classes)
    for name in cleared:
        classes[layout.region(name)] = background
    return layout.with_classes(classes)


def rasterize_layout(
    base: SemanticLayout,
    garments: Sequence[tuple[WarpedGarment, GarmentCategory]],
) -> SemanticLayout:
    """Paint garment classes over a base layout, innermost first."""
    classes = np.array(base.classes)
    for warped, category in garments:
        if warped.mask.shape != classes.shape:
            raise LayoutError(
                f"warped garment canvas {warped.mask.shape} does not match layout "
                f"{classes.shape}"
            )
        classes[warped.mask] = base.class_id(CATEGORY_CLASS[category])
    return base.with_classes(classes)


@dataclass(frozen=True)
class StyleLabel:
    tuck: str | None = None
    closure: str | None = None
    notes: tuple[str, ...] = ()


def label_closure(
    layout: SemanticLayout,
    *,
    min_area_frac: float = 0.05,
    ratio_limit: float = 2.0,
) -> StyleLabel:
    """Heuristic open/closed label for the outerwear in a layout.

    Open means the outerwear splits into two large disjoint regions of
    similar size: the two biggest 4-connected components each cover more
    than ``min_area_frac`` of the canvas and their areas differ by at most
    ``ratio_limit``.
    """
    region = layout.region("outerwear")
    if not region.any():
        raise LayoutError("layout contains no outerwear pixels")
    labels, count = ndimage.label(region)  # default structure = 4-connectivity
    areas = np.sort(np.bincount(labels.ravel())[1:])[::-1]
    canvas_area = region.size
    notes = (f"components={count}",)
    if count >= 2:
        a0, a1 = areas[0] / canvas_area, areas[1] / canvas_area
        if a0 > min_area_frac and a1 > min_area_frac and areas[0] / areas[1] <= ratio_limit:
            return StyleLabel(closure="open", notes=notes)
    return StyleLabel(closure="closed", notes=notes)


def label_tuck(points: ControlPointSet, pose: BodyPose, *, band: float = 0.01) -> StyleLabel:
    """Heuristic tuck label: hem height against the waist (mean hip y)."""
    if not (pose.usable("left_hip") and pose.usable("right_hip")):
        raise LayoutError("pose is missing hip joints")
    waist_y = float((pose.joint("left_hip")[1] + pose.joint("right_hip")[1]) / 2.0)
    schema = schema_for_version(points.schema_version)
    ids = [i for i in schema.ids_in_group(PointGroup.HEM) if points.present[i]]
    source = "hem"
    if not ids:
        ids = [i for i in schema.ids_in_group(PointGroup.WAISTLINE) if points.present[i]]
        source = "waistline"
    if not ids:
        raise LayoutError("no hem or waistline points present to label tuck from")
    ys = points.coords[ids, 1]
    notes = (f"waist_y={waist_y:.4f}", f"points={source}")
    if np.all(ys <= waist_y + band):
        return StyleLabel(tuck="full_tuck", notes=notes)
    if np.all(ys >= waist_y + band):
        return StyleLabel(tuck="untuck", notes=notes)
    return StyleLabel(tuck="half_tuck", notes=notes)


@dataclass(frozen=True)
class Violation:
    """An inner garment's point sticking out of the outerwear above it."""

    inner_index: int
    outer_index: int
    point_id: int
    clearance: float  # inside_distance of the point; < margin means violating


DEFAULT_COORDINATION_MARGIN = 0.01


def _outer_hull(points: ControlPointSet) -> np.ndarray | None:
    hull = geometry.convex_hull(points.coords[points.present])
    return hull if len(hull) >= 3 else None


def check_coordination(
    outfit: Sequence[tuple[ControlPointSet, GarmentAsset]],
    *,
    margin: float = DEFAULT_COORDINATION_MARGIN,
) -> list[Violation]:
    """Find inner-garment points not safely inside outerwear layered above.

    For every pair (inner at i, outerwear at j > i) the inner garment's
    present points must sit at least ``margin`` inside the convex hull of
    the outerwear's present points (boundary-inclusive at margin 0).
    """
    violations: list[Violation] = []
    for j, (outer_points, outer_asset) in enumerate(outfit):
        if outer_asset.category != GarmentCategory.OUTERWEAR:
            continue
        hull = _outer_hull(outer_points)
        if hull is None:
            continue
        for i in range(j):
            inner_points, _ = outfit[i]
            for pid in np.flatnonzero(inner_points.present):
                clearance = geometry.inside_distance(hull, inner_points.coords[pid])
                if clearance < margin:
                    violations.append(Violation(i, j, int(pid), float(clearance)))
    return violations


def fix_coordination(
    outfit: Sequence[tuple[ControlPointSet, GarmentAsset]],
    violations: Sequence[Violation],
    margin: float = DEFAULT_COORDINATION_MARGIN,
) -> list[tuple[ControlPointSet, GarmentAsset]]:
    """Move every violating point just inside its outerwear hull.

    Each flagged point is projected into the hull eroded by the margin (the
    nearest admissible location), so one pass reaches a fixpoint and a
    re-check comes back empty. Garments without violations are returned
    untouched.
    """
    by_inner: dict[int, dict[int, list[int]]] = {}
    for v in violations:
        by_inner.setdefault(v.inner_index, {}).setdefault(v.outer_index, []).append(v.point_id)
    result = list(outfit)
    for inner_idx, per_outer in by_inner.items():
        points, asset = result[inner_idx]
        coords = np.array(points.coords)
        # A point may violate several outer hulls; the admissible region is
        # the intersection, still convex, so a single projection suffices.
        pid_outers: dict[int, list[int]] = {}
        for outer_idx, pids in per_outer.items():
            for pid in pids:
                pid_outers.setdefault(pid, []).append(outer_idx)
        for pid, outers in pid_outers.items():
            region = None
            for outer_idx in outers:
                hull = _outer_hull(outfit[outer_idx][0])
                if hull is None:
                    raise LayoutError(
                        f"outerwear at index {outer_idx} has a degenerate hull (<3 points)"
                    )
                region = hull if region is None else geometry.intersect_hulls(region, hull)
            if region is None or len(region) < 3:
                raise LayoutError("coordination region is degenerate")
            coords[pid] = geometry.project_into_hull(region, coords[pid], margin)
        result[inner_idx] = (points.with_(coords=coords), asset)
    return result
