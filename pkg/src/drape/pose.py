"""Body pose representation: 18 named skeleton joints on the person canvas.

Poses are inputs to the engine (estimated upstream or authored); nothing
here runs pose estimation. Joint coordinates use the same normalized canvas
units as control points, and the same canvas-space left/right convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import PoseError

JOINT_NAMES = (
    "head",
    "neck",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
)

JOINT_INDEX = {name: i for i, name in enumerate(JOINT_NAMES)}

# Joints that must be detected for any garment to be placed at all.
ANCHOR_MINIMUM = ("neck", "left_shoulder", "right_shoulder", "left_hip", "right_hip")


@dataclass(frozen=True, eq=False)
class BodyPose:
    """Joint coordinates (18, 2), per-joint confidence (18,), canvas aspect."""

    joints: np.ndarray
    confidence: np.ndarray
    canvas_aspect: float = 2.0 / 3.0

    def __post_init__(self):
        joints = np.array(self.joints, dtype=np.float64)
        conf = np.array(self.confidence, dtype=np.float64)
        if joints.shape != (len(JOINT_NAMES), 2):
            raise PoseError(f"expected {len(JOINT_NAMES)} joints, got shape {joints.shape}")
        if conf.shape != (len(JOINT_NAMES),):
            raise PoseError("confidence must have one value per joint")
        if not np.all(np.isfinite(joints)):
            raise PoseError("joint coordinates must be finite")
        if np.any(conf < 0) or np.any(conf > 1):
            raise PoseError("joint confidence must lie in [0, 1]")
        if self.canvas_aspect <= 0:
            raise PoseError("canvas aspect must be positive")
        joints.setflags(write=False)
        conf.setflags(write=False)
        object.__setattr__(self, "joints", joints)
        object.__setattr__(self, "confidence", conf)
        missing = [n for n in ANCHOR_MINIMUM if conf[JOINT_INDEX[n]] <= 0]
        if missing:
            raise PoseError(f"pose missing required joints: {', '.join(missing)}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, BodyPose):
            return NotImplemented
        return (
            self.canvas_aspect == other.canvas_aspect
            and np.array_equal(self.joints, other.joints)
            and np.array_equal(self.confidence, other.confidence)
        )

    def joint(self, name: str) -> np.ndarray:
        return self.joints[JOINT_INDEX[name]]

    def usable(self, name: str) -> bool:
        return self.confidence[JOINT_INDEX[name]] > 0

    def transformed(self, fn) -> "BodyPose":
        """New pose with every joint mapped through ``fn`` (an (n,2)->(n,2) map)."""
        return BodyPose(
            joints=fn(np.array(self.joints)),
            confidence=self.confidence,
            canvas_aspect=self.canvas_aspect,
        )

    def to_dict(self) -> dict:
        return {
            "canvas_aspect": self.canvas_aspect,
            "joints": {
                name: {
                    "x": float(self.joints[i, 0]),
                    "y": float(self.joints[i, 1]),
                    "confidence": float(self.confidence[i]),
                }
                for i, name in enumerate(JOINT_NAMES)
            },
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "BodyPose":
        raw = doc.get("joints", {})
        unknown = set(raw) - set(JOINT_NAMES)
        if unknown:
            raise PoseError(f"unknown joint name '{sorted(unknown)[0]}'")
        joints = np.zeros((len(JOINT_NAMES), 2))
        conf = np.zeros(len(JOINT_NAMES))
        for name, rec in raw.items():
            i = JOINT_INDEX[name]
            joints[i] = (float(rec["x"]), float(rec["y"]))
            conf[i] = float(rec.get("confidence", 1.0))
        return cls(
            joints=joints,
            confidence=conf,
            canvas_aspect=float(doc.get("canvas_aspect", 2.0 / 3.0)),
        )


def dumps_pose(pose: BodyPose) -> str:
    return json.dumps(pose.to_dict(), indent=2) + "\n"


def loads_pose(text: str) -> BodyPose:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PoseError(f"pose file is not valid JSON: {exc}") from exc
    return BodyPose.from_dict(doc)
