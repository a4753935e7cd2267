"""Procedural people and garments for demos and tests.

Every builder returns fully consistent artifacts: garment rasters are drawn
from the same parametric outlines that define their source control points,
and the person raster shares its geometry with the base semantic layout.
Deterministic given the same arguments.
"""

from __future__ import annotations

import numpy as np
from PIL import Image, ImageDraw

from .assets import GarmentAsset
from .layout import CLASS_TABLE, SemanticLayout
from .pose import JOINT_NAMES, BodyPose
from .pose_fit import default_templates
from .schema import (
    POINT_COUNT,
    ControlPointSet,
    GarmentCategory,
    StyleVector,
    default_schema,
)

DEFAULT_GARMENT_SIZE = (384, 512)

SKIN = (231, 188, 153)
HAIR = (92, 62, 36)
BASE_TOP = (176, 176, 176)
BASE_BOTTOM = (140, 140, 140)
SHOE = (48, 48, 48)


def reference_pose() -> BodyPose:
    """The canonical standing pose the point templates were authored on."""
    library = default_templates()
    ref = library.templates[0].reference_joints
    joints = np.stack([ref[name] for name in JOINT_NAMES])
    return BodyPose(joints=joints, confidence=np.ones(len(JOINT_NAMES)))


def jittered_pose(seed: int, amount: float = 0.015) -> BodyPose:
    """Reference pose with a deterministic random wobble per joint."""
    rng = np.random.default_rng(seed)
    base = reference_pose()
    joints = base.joints + rng.uniform(-amount, amount, size=base.joints.shape)
    return BodyPose(joints=joints, confidence=base.confidence)


# ---------------------------------------------------------------------------
# Garments

TOP_SOURCE = {
    "collar_left": (0.38, 0.075),
    "collar_center": (0.50, 0.105),
    "collar_right": (0.62, 0.075),
    "shoulder_left": (0.24, 0.10),
    "shoulder_right": (0.76, 0.10),
    "sleeve_cap_left": (0.20, 0.145),
    "sleeve_cap_right": (0.80, 0.145),
    "sleeve_outer_elbow_left": (0.13, 0.40),
    "sleeve_outer_elbow_right": (0.87, 0.40),
    "sleeve_outer_wrist_left": (0.08, 0.62),
    "sleeve_outer_wrist_right": (0.92, 0.62),
    "armpit_left": (0.28, 0.26),
    "armpit_right": (0.72, 0.26),
    "sleeve_inner_elbow_left": (0.21, 0.44),
    "sleeve_inner_elbow_right": (0.79, 0.44),
    "sleeve_inner_wrist_left": (0.16, 0.645),
    "sleeve_inner_wrist_right": (0.84, 0.645),
    "torso_side_upper_left": (0.28, 0.42),
    "torso_side_upper_right": (0.72, 0.42),
    "torso_side_lower_left": (0.285, 0.66),
    "torso_side_lower_right": (0.715, 0.66),
    "torso_center": (0.50, 0.80),
    "waistline_left": (0.295, 0.74),
    "waistline_right": (0.705, 0.74),
    "hem_left": (0.30, 0.92),
    "hem_mid_left": (0.40, 0.93),
    "hem_center": (0.50, 0.935),
    "hem_mid_right": (0.60, 0.93),
    "hem_right": (0.70, 0.92),
}

_TOP_OUTLINE = (
    "collar_left",
    "shoulder_left",
    "sleeve_cap_left",
    "sleeve_outer_elbow_left",
    "sleeve_outer_wrist_left",
    "sleeve_inner_wrist_left",
    "sleeve_inner_elbow_left",
    "armpit_left",
    "torso_side_upper_left",
    "torso_side_lower_left",
    "waistline_left",
    "hem_left",
    "hem_mid_left",
    "hem_center",
    "hem_mid_right",
    "hem_right",
    "waistline_right",
    "torso_side_lower_right",
    "torso_side_upper_right",
    "armpit_right",
    "sleeve_inner_elbow_right",
    "sleeve_inner_wrist_right",
    "sleeve_outer_wrist_right",
    "sleeve_outer_elbow_right",
    "sleeve_cap_right",
    "shoulder_right",
    "collar_right",
    "collar_center",
)

OUTERWEAR_SOURCE = {
    "collar_left": (0.40, 0.06),
    "collar_center": (0.50, 0.085),
    "collar_right": (0.60, 0.06),
    "shoulder_left": (0.22, 0.09),
    "shoulder_right": (0.78, 0.09),
    "sleeve_cap_left": (0.175, 0.135),
    "sleeve_cap_right": (0.825, 0.135),
    "sleeve_outer_elbow_left": (0.105, 0.38),
    "sleeve_outer_elbow_right": (0.895, 0.38),
    "sleeve_outer_wrist_left": (0.06, 0.58),
    "sleeve_outer_wrist_right": (0.94, 0.58),
    "armpit_left": (0.26, 0.25),
    "armpit_right": (0.74, 0.25),
    "sleeve_inner_elbow_left": (0.19, 0.42),
    "sleeve_inner_elbow_right": (0.81, 0.42),
    "sleeve_inner_wrist_left": (0.14, 0.60),
    "sleeve_inner_wrist_right": (0.86, 0.60),
    "torso_side_upper_left": (0.26, 0.42),
    "torso_side_upper_right": (0.74, 0.42),
    "torso_side_lower_left": (0.265, 0.68),
    "torso_side_lower_right": (0.735, 0.68),
    "torso_center": (0.50, 0.82),
    "waistline_left": (0.27, 0.76),
    "waistline_right": (0.73, 0.76),
    "hem_left": (0.275, 0.93),
    "hem_mid_left": (0.39, 0.94),
    "hem_center": (0.50, 0.945),
    "hem_mid_right": (0.61, 0.94),
    "hem_right": (0.725, 0.93),
    # The split points straddle the cut line (x = 0.5) by half a percent so
    # each half's warp sees them strictly on its own side.
    "split_top_left": (0.496, 0.095),
    "split_top_right": (0.504, 0.095),
    "split_mid_upper_left": (0.496, 0.37),
    "split_mid_upper_right": (0.504, 0.37),
    "split_mid_lower_left": (0.496, 0.65),
    "split_mid_lower_right": (0.504, 0.65),
    "split_bottom_left": (0.496, 0.93),
    "split_bottom_right": (0.504, 0.93),
}

BOTTOM_SOURCE = {
    "waistline_left": (0.30, 0.055),
    "waistline_center": (0.50, 0.06),
    "waistline_right": (0.70, 0.055),
    "crotch": (0.50, 0.34),
    "leg_inner_thigh_left": (0.455, 0.42),
    "leg_inner_thigh_right": (0.545, 0.42),
    "leg_outer_knee_left": (0.295, 0.56),
    "leg_inner_knee_left": (0.43, 0.56),
    "leg_outer_knee_right": (0.705, 0.56),
    "leg_inner_knee_right": (0.57, 0.56),
    "leg_outer_ankle_left": (0.29, 0.92),
    "leg_inner_ankle_left": (0.42, 0.92),
    "leg_outer_ankle_right": (0.71, 0.92),
    "leg_inner_ankle_right": (0.58, 0.92),
    "hem_left": (0.355, 0.945),
    "hem_right": (0.645, 0.945),
}

_BOTTOM_OUTLINE = (
    "waistline_left",
    "leg_outer_knee_left",
    "leg_outer_ankle_left",
    "hem_left",
    "leg_inner_ankle_left",
    "leg_inner_knee_left",
    "leg_inner_thigh_left",
    "crotch",
    "leg_inner_thigh_right",
    "leg_inner_knee_right",
    "leg_inner_ankle_right",
    "hem_right",
    "leg_outer_ankle_right",
    "leg_outer_knee_right",
    "waistline_right",
    "waistline_center",
)

SKIRT_SOURCE = {
    "waistline_left": (0.32, 0.06),
    "waistline_center": (0.50, 0.07),
    "waistline_right": (0.68, 0.06),
    "hem_left": (0.16, 0.915),
    "hem_mid_left": (0.33, 0.94),
    "hem_center": (0.50, 0.95),
    "hem_mid_right": (0.67, 0.94),
    "hem_right": (0.84, 0.915),
}

_SKIRT_OUTLINE = (
    "waistline_left",
    "hem_left",
    "hem_mid_left",
    "hem_center",
    "hem_mid_right",
    "hem_right",
    "waistline_right",
    "waistline_center",
)

DRESS_SOURCE = dict(
    {k: v for k, v in TOP_SOURCE.items() if k != "torso_center"},
    **{
        "torso_side_upper_left": (0.29, 0.40),
        "torso_side_upper_right": (0.71, 0.40),
        "torso_side_lower_left": (0.285, 0.56),
        "torso_side_lower_right": (0.715, 0.56),
        "waistline_left": (0.30, 0.62),
        "waistline_center": (0.50, 0.625),
        "waistline_right": (0.70, 0.62),
        "hem_left": (0.20, 0.93),
        "hem_mid_left": (0.35, 0.95),
        "hem_center": (0.50, 0.955),
        "hem_mid_right": (0.65, 0.95),
        "hem_right": (0.80, 0.93),
    },
)

_DRESS_OUTLINE = _TOP_OUTLINE  # same path; the coordinates flare the lower half


def _pattern_texture(size, pattern, color, color2):
    width, height = size
    tex = np.zeros((height, width, 3), dtype=np.uint8)
    tex[:, :] = color
    if pattern == "stripes":
        rows = (np.arange(height) // 24) % 2 == 1
        tex[rows] = color2
    elif pattern == "checker":
        yy, xx = np.mgrid[0:height, 0:width]
        cells = ((yy // 32) + (xx // 32)) % 2 == 1
        tex[cells] = color2
    elif pattern != "solid":
        raise ValueError(f"unknown pattern '{pattern}'")
    return tex


def _points_from_table(table: dict, category: GarmentCategory) -> ControlPointSet:
    schema = default_schema()
    coords = np.zeros((POINT_COUNT, 2))
    present = schema.applicability(category)
    for name, (x, y) in table.items():
        coords[schema.id_of(name)] = (x, y)
    missing = [schema.point(int(i)).name for i in np.flatnonzero(present) if not np.any(coords[i])]
    if missing:
        raise ValueError(f"source table for {category.value} missing {missing}")
    return ControlPointSet(schema_version=schema.version, coords=coords, present=np.array(present))


def _draw_garment(table, outline, size, pattern, color, color2):
    width, height = size
    img = Image.new("L", size, 0)
    draw = ImageDraw.Draw(img)
    path = [(table[n][0] * (width - 1), table[n][1] * (height - 1)) for n in outline]
    draw.polygon(path, fill=255)
    mask = np.array(img) > 0
    tex = _pattern_texture(size, pattern, color, color2)
    image = np.zeros((height, width, 4), dtype=np.uint8)
    image[mask, :3] = tex[mask]
    image[mask, 3] = 255
    return image, mask


def _make(
    category: GarmentCategory,
    table,
    outline,
    asset_id,
    *,
    size=DEFAULT_GARMENT_SIZE,
    pattern="solid",
    color=(200, 60, 60),
    color2=(240, 240, 240),
    tags=(),
    gender="unisex",
    split=False,
):
    image, mask = _draw_garment(table, outline, size, pattern, color, color2)
    return GarmentAsset(
        id=asset_id,
        category=category,
        tags=frozenset(tags),
        gender=gender,
        image=image,
        mask=mask,
        source_points=_points_from_table(table, category),
        split_polyline=np.array([[0.5, 0.0], [0.5, 1.0]]) if split else None,
    )


def make_top(asset_id="top", **kw) -> GarmentAsset:
    return _make(GarmentCategory.TOP, TOP_SOURCE, _TOP_OUTLINE, asset_id, **kw)


def make_outerwear(asset_id="jacket", **kw) -> GarmentAsset:
    kw.setdefault("color", (70, 70, 110))
    return _make(
        GarmentCategory.OUTERWEAR, OUTERWEAR_SOURCE, _TOP_OUTLINE, asset_id, split=True, **kw
    )


def make_bottom(asset_id="trousers", **kw) -> GarmentAsset:
    kw.setdefault("color", (60, 70, 90))
    return _make(GarmentCategory.BOTTOM, BOTTOM_SOURCE, _BOTTOM_OUTLINE, asset_id, **kw)


def make_skirt(asset_id="skirt", **kw) -> GarmentAsset:
    kw.setdefault("color", (150, 90, 50))
    return _make(GarmentCategory.SKIRT, SKIRT_SOURCE, _SKIRT_OUTLINE, asset_id, **kw)


def make_dress(asset_id="dress", **kw) -> GarmentAsset:
    kw.setdefault("color", (110, 60, 130))
    return _make(GarmentCategory.DRESS, DRESS_SOURCE, _DRESS_OUTLINE, asset_id, **kw)


def make_garment(category: GarmentCategory, asset_id: str, **kw) -> GarmentAsset:
    builders = {
        GarmentCategory.TOP: make_top,
        GarmentCategory.BOTTOM: make_bottom,
        GarmentCategory.SKIRT: make_skirt,
        GarmentCategory.OUTERWEAR: make_outerwear,
        GarmentCategory.DRESS: make_dress,
    }
    return builders[category](asset_id, **kw)


# ---------------------------------------------------------------------------
# Person


class _Painter:
    """Paints the person raster and the base layout from one geometry."""

    def __init__(self, canvas):
        self.canvas = canvas
        self.img = Image.new("RGBA", canvas, (0, 0, 0, 0))
        self.lay = Image.new("L", canvas, 0)
        self._img = ImageDraw.Draw(self.img)
        self._lay = ImageDraw.Draw(self.lay)

    def _px(self, p):
        return (p[0] * (self.canvas[0] - 1), p[1] * (self.canvas[1] - 1))

    def polygon(self, pts, color, cls):
        path = [self._px(p) for p in pts]
        self._img.polygon(path, fill=(*color, 255))
        self._lay.polygon(path, fill=CLASS_TABLE[cls])

    def limb(self, pts, width, color, cls):
        path = [self._px(p) for p in pts]
        w = max(1, int(round(width * (self.canvas[0] - 1))))
        self._img.line(path, fill=(*color, 255), width=w, joint="curve")
        self._lay.line(path, fill=CLASS_TABLE[cls], width=w, joint="curve")
        for p in path:
            r = w / 2
            box = (p[0] - r, p[1] - r, p[0] + r, p[1] + r)
            self._img.ellipse(box, fill=(*color, 255))
            self._lay.ellipse(box, fill=CLASS_TABLE[cls])

    def disc(self, center, radius, color, cls):
        c = self._px(center)
        rx = radius * (self.canvas[0] - 1)
        ry = radius * (self.canvas[0] - 1)
        box = (c[0] - rx, c[1] - ry, c[0] + rx, c[1] + ry)
        self._img.ellipse(box, fill=(*color, 255))
        self._lay.ellipse(box, fill=CLASS_TABLE[cls])


def make_person(canvas=(512, 768), pose: BodyPose | None = None):
    """A synthetic model wearing plain base clothes.

    Returns (rgba image, base SemanticLayout, pose). The base layout marks
    the plain tee and shorts as top/bottom classes so occlusion has real
    regions to clear.
    """
    pose = pose or reference_pose()
    painter = _Painter(canvas)
    j = {name: pose.joint(name) for name in JOINT_NAMES}

    # Skin first: arms and legs as thick polylines.
    painter.limb([j["left_hip"], j["left_knee"], j["left_ankle"]], 0.055, SKIN, "legs")
    painter.limb([j["right_hip"], j["right_knee"], j["right_ankle"]], 0.055, SKIN, "legs")
    painter.limb([j["left_shoulder"], j["left_elbow"], j["left_wrist"]], 0.042, SKIN, "arms")
    painter.limb([j["right_shoulder"], j["right_elbow"], j["right_wrist"]], 0.042, SKIN, "arms")

    # Base shorts: hips down to mid thigh.
    mid_l = j["left_hip"] * 0.45 + j["left_knee"] * 0.55
    mid_r = j["right_hip"] * 0.45 + j["right_knee"] * 0.55
    painter.polygon(
        [
            j["left_hip"] + (-0.035, -0.01),
            j["right_hip"] + (0.035, -0.01),
            mid_r + (0.04, 0),
            mid_l + (-0.04, 0),
        ],
        BASE_BOTTOM,
        "bottom",
    )

    # Base tee: shoulders to hips.
    painter.polygon(
        [
            j["left_shoulder"] + (-0.01, -0.012),
            j["right_shoulder"] + (0.01, -0.012),
            j["right_hip"] + (0.04, 0.01),
            j["left_hip"] + (-0.04, 0.01),
        ],
        BASE_TOP,
        "top",
    )

    # Neckline skin between neck and chest.
    neck = j["neck"]
    painter.polygon(
        [neck + (-0.045, -0.01), neck + (0.045, -0.01), neck + (0, 0.05)],
        SKIN,
        "neckline_skin",
    )

    painter.disc(j["head"] + (0, -0.012), 0.062, HAIR, "hair")
    painter.disc(j["head"] + (0, 0.008), 0.05, SKIN, "face")

    painter.disc(j["left_ankle"] + (0, 0.018), 0.028, SHOE, "shoes")
    painter.disc(j["right_ankle"] + (0, 0.018), 0.028, SHOE, "shoes")

    image = np.array(painter.img)
    layout = SemanticLayout(classes=np.array(painter.lay), table=CLASS_TABLE)
    return image, layout, pose
