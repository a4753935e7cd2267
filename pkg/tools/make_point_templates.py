#!/usr/bin/env python3
"""Regenerate the canonical point templates under src/drape/data/templates/.

The coordinate tables below were authored by eye on the shared reference
skeleton. Run this after editing a table; the JSON files are committed.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from drape.schema import POINT_COUNT, default_schema  # noqa: E402

REFERENCE_JOINTS = {
    "head": (0.500, 0.080),
    "neck": (0.500, 0.160),
    "left_shoulder": (0.380, 0.200),
    "right_shoulder": (0.620, 0.200),
    "left_elbow": (0.330, 0.340),
    "right_elbow": (0.670, 0.340),
    "left_wrist": (0.300, 0.470),
    "right_wrist": (0.700, 0.470),
    "left_hip": (0.430, 0.500),
    "right_hip": (0.570, 0.500),
    "left_knee": (0.420, 0.700),
    "right_knee": (0.580, 0.700),
    "left_ankle": (0.420, 0.900),
    "right_ankle": (0.580, 0.900),
    "left_eye": (0.480, 0.072),
    "right_eye": (0.520, 0.072),
    "left_ear": (0.460, 0.082),
    "right_ear": (0.540, 0.082),
}

SHOULDER_PAIR = ["left_shoulder", "right_shoulder"]
HIP_PAIR = ["left_hip", "right_hip"]
TORSO_QUAD = SHOULDER_PAIR + HIP_PAIR

UPPER_BODY_ANCHORS = [
    {"group": "collar", "side": "any", "joints": SHOULDER_PAIR},
    {"group": "shoulder", "side": "any", "joints": SHOULDER_PAIR},
    {"group": "sleeve_outer", "side": "left", "joints": ["left_shoulder", "left_elbow", "left_wrist"]},
    {"group": "sleeve_outer", "side": "right", "joints": ["right_shoulder", "right_elbow", "right_wrist"]},
    {"group": "sleeve_inner", "side": "left", "joints": ["left_shoulder", "left_elbow", "left_wrist"]},
    {"group": "sleeve_inner", "side": "right", "joints": ["right_shoulder", "right_elbow", "right_wrist"]},
    {"group": "torso_side", "side": "left", "joints": ["left_shoulder", "left_hip"]},
    {"group": "torso_side", "side": "right", "joints": ["right_shoulder", "right_hip"]},
    {"group": "waistline", "side": "any", "joints": HIP_PAIR},
    {"group": "hem", "side": "any", "joints": HIP_PAIR},
]

TOP_UNTUCK = {
    "collar_left": (0.440, 0.178),
    "collar_center": (0.500, 0.192),
    "collar_right": (0.560, 0.178),
    "shoulder_left": (0.380, 0.200),
    "shoulder_right": (0.620, 0.200),
    "sleeve_cap_left": (0.352, 0.228),
    "sleeve_cap_right": (0.648, 0.228),
    "sleeve_outer_elbow_left": (0.312, 0.342),
    "sleeve_outer_elbow_right": (0.688, 0.342),
    "sleeve_outer_wrist_left": (0.282, 0.462),
    "sleeve_outer_wrist_right": (0.718, 0.462),
    "armpit_left": (0.402, 0.268),
    "armpit_right": (0.598, 0.268),
    "sleeve_inner_elbow_left": (0.352, 0.360),
    "sleeve_inner_elbow_right": (0.648, 0.360),
    "sleeve_inner_wrist_left": (0.322, 0.478),
    "sleeve_inner_wrist_right": (0.678, 0.478),
    "torso_side_upper_left": (0.398, 0.330),
    "torso_side_upper_right": (0.602, 0.330),
    "torso_side_lower_left": (0.406, 0.452),
    "torso_side_lower_right": (0.594, 0.452),
    "torso_center": (0.500, 0.530),
    "waistline_left": (0.416, 0.500),
    "waistline_right": (0.584, 0.500),
    "hem_left": (0.408, 0.578),
    "hem_mid_left": (0.452, 0.588),
    "hem_center": (0.500, 0.592),
    "hem_mid_right": (0.548, 0.588),
    "hem_right": (0.592, 0.578),
}

# Tuck variants may move only waistline, hem, and torso_side groups.
TOP_FULL_TUCK = dict(
    TOP_UNTUCK,
    **{
        "torso_side_lower_left": (0.414, 0.448),
        "torso_side_lower_right": (0.586, 0.448),
        "torso_center": (0.500, 0.498),
        "waistline_left": (0.424, 0.498),
        "waistline_right": (0.576, 0.498),
        "hem_left": (0.422, 0.500),
        "hem_mid_left": (0.460, 0.506),
        "hem_center": (0.500, 0.508),
        "hem_mid_right": (0.540, 0.506),
        "hem_right": (0.578, 0.500),
    },
)

BOTTOM_DEFAULT = {
    "waistline_left": (0.428, 0.512),
    "waistline_center": (0.500, 0.518),
    "waistline_right": (0.572, 0.512),
    "hem_left": (0.424, 0.924),
    "hem_right": (0.576, 0.924),
    "crotch": (0.500, 0.568),
    "leg_inner_thigh_left": (0.472, 0.610),
    "leg_inner_thigh_right": (0.528, 0.610),
    "leg_outer_knee_left": (0.398, 0.700),
    "leg_inner_knee_left": (0.452, 0.700),
    "leg_outer_knee_right": (0.602, 0.700),
    "leg_inner_knee_right": (0.548, 0.700),
    "leg_outer_ankle_left": (0.394, 0.916),
    "leg_inner_ankle_left": (0.454, 0.916),
    "leg_outer_ankle_right": (0.606, 0.916),
    "leg_inner_ankle_right": (0.546, 0.916),
}

BOTTOM_ANCHORS = [
    {"group": "waistline", "side": "any", "joints": HIP_PAIR},
    {"group": "leg", "side": "left", "joints": ["left_hip", "left_knee", "left_ankle"]},
    {"group": "leg", "side": "right", "joints": ["right_hip", "right_knee", "right_ankle"]},
    {"group": "leg", "side": "center", "joints": HIP_PAIR},
    {"group": "hem", "side": "left", "joints": ["left_knee", "left_ankle"]},
    {"group": "hem", "side": "right", "joints": ["right_knee", "right_ankle"]},
]

SKIRT_DEFAULT = {
    "waistline_left": (0.426, 0.512),
    "waistline_center": (0.500, 0.518),
    "waistline_right": (0.574, 0.512),
    "hem_left": (0.398, 0.772),
    "hem_mid_left": (0.448, 0.782),
    "hem_center": (0.500, 0.786),
    "hem_mid_right": (0.552, 0.782),
    "hem_right": (0.602, 0.772),
}

SKIRT_ANCHORS = [
    {"group": "waistline", "side": "any", "joints": HIP_PAIR},
    {"group": "hem", "side": "any", "joints": HIP_PAIR},
]

DRESS_DEFAULT = dict(
    {k: v for k, v in TOP_UNTUCK.items() if k != "torso_center"},
    **{
        "torso_side_lower_left": (0.408, 0.440),
        "torso_side_lower_right": (0.592, 0.440),
        "waistline_left": (0.418, 0.500),
        "waistline_center": (0.500, 0.505),
        "waistline_right": (0.582, 0.500),
        "hem_left": (0.396, 0.812),
        "hem_mid_left": (0.446, 0.824),
        "hem_center": (0.500, 0.828),
        "hem_mid_right": (0.554, 0.824),
        "hem_right": (0.604, 0.812),
    },
)

OUTERWEAR_CLOSED = {
    "collar_left": (0.432, 0.172),
    "collar_center": (0.500, 0.188),
    "collar_right": (0.568, 0.172),
    "shoulder_left": (0.372, 0.198),
    "shoulder_right": (0.628, 0.198),
    "sleeve_cap_left": (0.340, 0.230),
    "sleeve_cap_right": (0.660, 0.230),
    "sleeve_outer_elbow_left": (0.300, 0.344),
    "sleeve_outer_elbow_right": (0.700, 0.344),
    "sleeve_outer_wrist_left": (0.268, 0.468),
    "sleeve_outer_wrist_right": (0.732, 0.468),
    "armpit_left": (0.398, 0.272),
    "armpit_right": (0.602, 0.272),
    "sleeve_inner_elbow_left": (0.344, 0.364),
    "sleeve_inner_elbow_right": (0.656, 0.364),
    "sleeve_inner_wrist_left": (0.312, 0.484),
    "sleeve_inner_wrist_right": (0.688, 0.484),
    "torso_side_upper_left": (0.392, 0.335),
    "torso_side_upper_right": (0.608, 0.335),
    "torso_side_lower_left": (0.398, 0.490),
    "torso_side_lower_right": (0.602, 0.490),
    "torso_center": (0.500, 0.545),
    "waistline_left": (0.406, 0.520),
    "waistline_right": (0.594, 0.520),
    "hem_left": (0.402, 0.628),
    "hem_mid_left": (0.450, 0.636),
    "hem_center": (0.500, 0.640),
    "hem_mid_right": (0.550, 0.636),
    "hem_right": (0.598, 0.628),
}

# Open variant: front spreads, split edge becomes live, the two center-front
# points (torso_center, hem_center) are retired so the halves can separate.
OUTERWEAR_OPEN = dict(
    {k: v for k, v in OUTERWEAR_CLOSED.items() if k not in ("torso_center", "hem_center")},
    **{
        "collar_left": (0.428, 0.170),
        "collar_center": (0.500, 0.192),
        "collar_right": (0.572, 0.170),
        "torso_side_upper_left": (0.388, 0.335),
        "torso_side_upper_right": (0.612, 0.335),
        "torso_side_lower_left": (0.390, 0.492),
        "torso_side_lower_right": (0.610, 0.492),
        "waistline_left": (0.400, 0.522),
        "waistline_right": (0.600, 0.522),
        "hem_left": (0.396, 0.630),
        "hem_mid_left": (0.440, 0.636),
        "hem_mid_right": (0.560, 0.636),
        "hem_right": (0.604, 0.630),
        "split_top_left": (0.468, 0.212),
        "split_top_right": (0.532, 0.212),
        "split_mid_upper_left": (0.448, 0.330),
        "split_mid_upper_right": (0.552, 0.330),
        "split_mid_lower_left": (0.428, 0.470),
        "split_mid_lower_right": (0.572, 0.470),
        "split_bottom_left": (0.416, 0.618),
        "split_bottom_right": (0.584, 0.618),
    },
)

OUTERWEAR_ANCHORS = UPPER_BODY_ANCHORS + [
    {"group": "split_edge", "side": "any", "joints": TORSO_QUAD},
]

TEMPLATES = [
    ("top__untuck", "top", {"tuck": "untuck"}, TOP_UNTUCK, UPPER_BODY_ANCHORS),
    ("top__full_tuck", "top", {"tuck": "full_tuck"}, TOP_FULL_TUCK, UPPER_BODY_ANCHORS),
    ("bottom__default", "bottom", {}, BOTTOM_DEFAULT, BOTTOM_ANCHORS),
    ("skirt__default", "skirt", {}, SKIRT_DEFAULT, SKIRT_ANCHORS),
    ("dress__default", "dress", {}, DRESS_DEFAULT, UPPER_BODY_ANCHORS),
    ("outerwear__closed", "outerwear", {"closure": "closed"}, OUTERWEAR_CLOSED, OUTERWEAR_ANCHORS),
    ("outerwear__open", "outerwear", {"closure": "open"}, OUTERWEAR_OPEN, OUTERWEAR_ANCHORS),
]


def build(name, category, style, table, anchors, schema):
    points = []
    for i in range(POINT_COUNT):
        pname = schema.point(i).name
        if pname in table:
            x, y = table[pname]
            points.append({"id": i, "x": x, "y": y, "present": True})
        else:
            points.append({"id": i, "x": 0.0, "y": 0.0, "present": False})
    unknown = set(table) - set(schema.names)
    if unknown:
        raise SystemExit(f"{name}: unknown point names {sorted(unknown)}")
    return {
        "schema_version": schema.version,
        "category": category,
        "style": style,
        "reference_joints": {k: list(v) for k, v in REFERENCE_JOINTS.items()},
        "anchors": anchors,
        "points": points,
    }


def main():
    schema = default_schema()
    out_dir = REPO / "src" / "drape" / "data" / "templates"
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, category, style, table, anchors in TEMPLATES:
        doc = build(name, category, style, table, anchors, schema)
        path = out_dir / f"{name}.json"
        path.write_text(json.dumps(doc, indent=1) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
