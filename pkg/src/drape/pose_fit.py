"""Control-point prediction by fitting canonical templates to a skeleton.

Each garment category (and each discrete style that needs its own point
arrangement, e.g. an open vs. a closed jacket) ships a canonical template:
the 49 points laid out on a reference skeleton, plus a table assigning every
point group to the joints it should follow. Prediction fits a least-squares
similarity transform per group from the reference joints to the actual pose
and maps the template points through it, so sleeves follow arms and hems
follow hips independently.

Templates are data files; adding a style means adding a file, not code.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateFitError, TemplateError
from .pose import JOINT_NAMES, BodyPose
from .schema import (
    POINT_COUNT,
    ControlPointSchema,
    ControlPointSet,
    GarmentCategory,
    PointGroup,
    Side,
    StyleVector,
    default_schema,
)

# Groups a tuck change is allowed to move. Template pairs that differ only
# in tuck must keep every other group bit-identical; the linter enforces it.
TUCK_MUTABLE_GROUPS = frozenset(
    {PointGroup.WAISTLINE, PointGroup.HEM, PointGroup.TORSO_SIDE}
)
# Groups a closure change may move (an opening jacket spreads its front).
CLOSURE_MUTABLE_GROUPS = frozenset(
    {
        PointGroup.COLLAR,
        PointGroup.TORSO_SIDE,
        PointGroup.WAISTLINE,
        PointGroup.HEM,
        PointGroup.SPLIT_EDGE,
    }
)

# Used when a group's own anchor joints are mostly undetected in a pose.
FALLBACK_ANCHORS = ("left_shoulder", "right_shoulder", "left_hip", "right_hip")


@dataclass(frozen=True)
class Similarity:
    """2D similarity transform: rotate by ``rotation``, scale, translate."""

    scale: float
    rotation: float
    translation: np.ndarray

    def apply(self, pts: np.ndarray) -> np.ndarray:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        m = self.scale * np.array([[c, -s], [s, c]])
        return np.asarray(pts, dtype=np.float64) @ m.T + self.translation


def fit_similarity(src: np.ndarray, dst: np.ndarray) -> Similarity:
    """Least-squares similarity (scale, rotation, translation) mapping src to dst.

    Closed form via the complex-number formulation of 2D Procrustes without
    reflection. Requires at least two distinct source points.
    """
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    if src.shape != dst.shape or src.ndim != 2 or src.shape[1] != 2:
        raise DegenerateFitError("source and destination must be matching (n, 2) arrays")
    if src.shape[0] < 2:
        raise DegenerateFitError("similarity fit needs at least 2 points")
    src_mean = src.mean(axis=0)
    dst_mean = dst.mean(axis=0)
    zs = (src[:, 0] - src_mean[0]) + 1j * (src[:, 1] - src_mean[1])
    zd = (dst[:, 0] - dst_mean[0]) + 1j * (dst[:, 1] - dst_mean[1])
    # conj(z)*z keeps the numerator and denominator arithmetic identical, so
    # src == dst recovers the identity transform bit-exactly.
    norm = float(np.sum((np.conj(zs) * zs).real))
    if norm == 0.0:
        raise DegenerateFitError("all source points are coincident; similarity fit is degenerate")
    z = complex(np.sum(np.conj(zs) * zd) / norm)
    scale = abs(z)
    rotation = math.atan2(z.imag, z.real)
    c, s = math.cos(rotation), math.sin(rotation)
    m = scale * np.array([[c, -s], [s, c]])
    translation = dst_mean - m @ src_mean
    return Similarity(scale=scale, rotation=rotation, translation=translation)


@dataclass(frozen=True)
class CanonicalTemplate:
    """Reference layout of the 49 points for one (category, style) pair."""

    name: str
    category: GarmentCategory
    style_key: StyleVector
    schema_version: str
    reference_joints: Mapping[str, np.ndarray]
    points: np.ndarray
    present: np.ndarray
    anchors: Mapping[tuple[PointGroup, str], tuple[str, ...]]

    def anchor_joints(self, group: PointGroup, side: Side) -> tuple[str, ...]:
        exact = self.anchors.get((group, side.value))
        if exact is not None:
            return exact
        generic = self.anchors.get((group, "any"))
        if generic is not None:
            return generic
        raise TemplateError(
            f"template '{self.name}' has no anchor for group '{group.value}' side '{side.value}'"
        )


def load_template(text: str, name: str = "<inline>") -> CanonicalTemplate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TemplateError(f"template '{name}' is not valid JSON: {exc}") from exc
    try:
        category = GarmentCategory(doc["category"])
        style_key = StyleVector.from_dict(doc.get("style", {}))
        ref = {
            joint: np.array([float(v[0]), float(v[1])])
            for joint, v in doc["reference_joints"].items()
        }
        points = np.zeros((POINT_COUNT, 2))
        present = np.zeros(POINT_COUNT, dtype=bool)
        for rec in doc["points"]:
            i = int(rec["id"])
            points[i] = (float(rec["x"]), float(rec["y"]))
            present[i] = bool(rec["present"])
        anchors = {}
        for entry in doc["anchors"]:
            key = (PointGroup(entry["group"]), str(entry["side"]))
            anchors[key] = tuple(entry["joints"])
    except (KeyError, ValueError, TypeError) as exc:
        raise TemplateError(f"template '{name}' is malformed: {exc}") from exc
    points.setflags(write=False)
    present.setflags(write=False)
    return CanonicalTemplate(
        name=name,
        category=category,
        style_key=style_key,
        schema_version=str(doc.get("schema_version", "")),
        reference_joints=ref,
        points=points,
        present=present,
        anchors=anchors,
    )


def lint_template(template: CanonicalTemplate, schema: ControlPointSchema) -> None:
    """Validate one template against the schema. Raises TemplateError."""
    if template.schema_version != schema.version:
        raise TemplateError(
            f"template '{template.name}' targets schema {template.schema_version!r}, "
            f"active schema is {schema.version!r}"
        )
    applicable = schema.applicability(template.category)
    extra = np.flatnonzero(template.present & ~applicable)
    if extra.size:
        name = schema.point(int(extra[0])).name
        raise TemplateError(
            f"template '{template.name}' marks '{name}' present but it does not exist "
            f"for category '{template.category.value}'"
        )
    if not np.all(np.isfinite(template.points)):
        raise TemplateError(f"template '{template.name}' has non-finite coordinates")
    for i in np.flatnonzero(template.present):
        pdef = schema.point(int(i))
        joints = template.anchor_joints(pdef.group, pdef.side)
        if len(joints) < 2:
            raise TemplateError(
                f"template '{template.name}': group '{pdef.group.value}' needs >= 2 anchor joints"
            )
        for joint in joints:
            if joint not in JOINT_NAMES:
                raise TemplateError(
                    f"template '{template.name}': unknown anchor joint '{joint}'"
                )
            if joint not in template.reference_joints:
                raise TemplateError(
                    f"template '{template.name}': anchor joint '{joint}' missing from "
                    "reference_joints"
                )


def _styles_differ_only_in(a: StyleVector, b: StyleVector, entry: str) -> bool:
    da, db = a.as_dict(), b.as_dict()
    da.pop(entry, None)
    db.pop(entry, None)
    return da == db and a.get(entry) != b.get(entry)


def _lint_style_locality(templates: Sequence[CanonicalTemplate], schema: ControlPointSchema):
    """Cross-template check: style flips only move their allowed groups."""
    rules = (("tuck", TUCK_MUTABLE_GROUPS), ("closure", CLOSURE_MUTABLE_GROUPS))
    for entry, mutable in rules:
        frozen_ids = [
            p.id for p in schema.points if p.group not in mutable
        ]
        for i, ta in enumerate(templates):
            for tb in templates[i + 1 :]:
                if ta.category != tb.category:
                    continue
                if not _styles_differ_only_in(ta.style_key, tb.style_key, entry):
                    continue
                for pid in frozen_ids:
                    same_presence = ta.present[pid] == tb.present[pid]
                    same_coords = (not ta.present[pid]) or np.array_equal(
                        ta.points[pid], tb.points[pid]
                    )
                    if not (same_presence and same_coords):
                        raise TemplateError(
                            f"templates '{ta.name}' and '{tb.name}' differ only in "
                            f"{entry} but move point '{schema.point(pid).name}' "
                            f"(group '{schema.group_of(pid).value}')"
                        )


class TemplateLibrary:
    """A validated set of canonical templates with (category, style) lookup."""

    def __init__(self, templates: Iterable[CanonicalTemplate], schema: ControlPointSchema):
        self.schema = schema
        self.templates = tuple(templates)
        for t in self.templates:
            lint_template(t, schema)
        _lint_style_locality(self.templates, schema)

    def select(self, category: GarmentCategory, style: StyleVector) -> CanonicalTemplate:
        matches = [
            t
            for t in self.templates
            if t.category == category and t.style_key.is_subset_of(style)
        ]
        if not matches:
            raise TemplateError(
                f"no template for category '{category.value}' and style {style.as_dict()}"
            )
        best = max(len(t.style_key.entries) for t in matches)
        top = [t for t in matches if len(t.style_key.entries) == best]
        if len(top) > 1:
            names = ", ".join(t.name for t in top)
            raise TemplateError(
                f"ambiguous templates for category '{category.value}': {names}"
            )
        return top[0]


def load_template_dir(path: Path | str, schema: ControlPointSchema | None = None) -> TemplateLibrary:
    schema = schema or default_schema()
    path = Path(path)
    templates = []
    for file in sorted(path.glob("*.json")):
        templates.append(load_template(file.read_text(), name=file.stem))
    if not templates:
        raise TemplateError(f"no templates found under {path}")
    return TemplateLibrary(templates, schema)


_DEFAULT_LIBRARY: TemplateLibrary | None = None


def default_templates() -> TemplateLibrary:
    global _DEFAULT_LIBRARY
    if _DEFAULT_LIBRARY is None:
        schema = default_schema()
        templates = []
        root = resources.files("drape").joinpath("data/templates")
        for file in sorted(root.iterdir(), key=lambda f: f.name):
            if file.name.endswith(".json"):
                templates.append(load_template(file.read_text(), name=file.name[:-5]))
        _DEFAULT_LIBRARY = TemplateLibrary(templates, schema)
    return _DEFAULT_LIBRARY


def _group_fit(template: CanonicalTemplate, pose: BodyPose, joints: tuple[str, ...]) -> Similarity:
    usable = [j for j in joints if pose.usable(j)]
    if len(usable) < 2:
        usable = [j for j in FALLBACK_ANCHORS if pose.usable(j)]
    if len(usable) < 2:
        raise DegenerateFitError("pose has too few detected joints to anchor any group")
    src = np.stack([template.reference_joints[j] for j in usable])
    dst = np.stack([pose.joint(j) for j in usable])
    return fit_similarity(src, dst)


def predict_control_points(
    asset,
    pose: BodyPose,
    style: StyleVector,
    library: TemplateLibrary | None = None,
) -> ControlPointSet:
    """Place a garment's control points on a body.

    Selects the canonical template for (asset.category, style), fits one
    similarity per point group from the template's reference skeleton to the
    given pose, and maps the group's points through its fit. Deterministic:
    identical inputs give bit-identical outputs.
    """
    library = library or default_templates()
    template = library.select(asset.category, style)
    schema = library.schema
    coords = np.array(template.points)
    fits: dict[tuple[str, ...], Similarity] = {}
    for pid in np.flatnonzero(template.present):
        pdef = schema.point(int(pid))
        joints = template.anchor_joints(pdef.group, pdef.side)
        if joints not in fits:
            fits[joints] = _group_fit(template, pose, joints)
        coords[pid] = fits[joints].apply(template.points[pid : pid + 1])[0]
    return ControlPointSet(
        schema_version=schema.version,
        coords=coords,
        present=np.array(template.present),
        style=style,
    )
