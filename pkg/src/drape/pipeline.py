"""End-to-end outfit rendering.

Stage order per render:
  1. predict control points for every garment first (cross-garment edits and
     coordination need all point sets up front)
  2. apply edit templates, metadata-matched, resolving ``other`` to the
     nearest co-garment in layering order
  3. coordination check (and optional fix)
  4. warp each garment; open outerwear is split and the halves warped
     separately, then merged
  5. build the occluded person image by clearing every outfit category's
     region (plus connected skin) from the base layout
  6. composite warped garments over the occluded person, innermost first
  7. rasterize the final semantic layout

The output is a draft: geometry is exact, no synthetic shading. Rendering is
a pure function of the spec and assets; re-rendering is bit-identical.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import dsl
from .assets import GarmentAsset, load_asset
from .errors import DrapeError, EditError, RenderError, SpecError
from .layout import (
    DEFAULT_COORDINATION_MARGIN,
    SemanticLayout,
    Violation,
    blank_layout,
    check_coordination,
    fix_coordination,
    load_layout,
    occlude,
    rasterize_layout,
    save_layout,
)
from .pose import BodyPose, loads_pose
from .pose_fit import TemplateLibrary, default_templates, predict_control_points
from .raster import alpha_over, load_rgba, mask_boundary, save_rgba
from .schema import (
    DEFAULT_STYLES,
    ControlPointSet,
    GarmentCategory,
    PointGroup,
    StyleVector,
    schema_for_version,
)
from .warp import (
    DEFAULT_SMOOTHING,
    WarpedGarment,
    merge_warped,
    split_garment,
    warp_image,
)

DEFAULT_CANVAS = (512, 768)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def resolve_style(category: GarmentCategory, overrides: Mapping[str, str] | None = None) -> StyleVector:
    """Category defaults merged with per-garment overrides."""
    entries = dict(DEFAULT_STYLES[category])
    entries.update(overrides or {})
    return StyleVector.from_dict(entries)


@dataclass(frozen=True, eq=False)
class OutfitGarment:
    asset: GarmentAsset
    style: StyleVector


@dataclass(frozen=True, eq=False)
class OutfitSpec:
    """Everything a render needs, already loaded."""

    person_image: np.ndarray
    pose: BodyPose
    base_layout: SemanticLayout
    garments: tuple[OutfitGarment, ...]
    templates: tuple[dsl.EditTemplate, ...] = ()
    canvas: tuple[int, int] = DEFAULT_CANVAS
    smoothing: float = DEFAULT_SMOOTHING
    coordination: str = "check"  # off | check | fix
    coordination_margin: float = DEFAULT_COORDINATION_MARGIN
    clamp_margin: float = dsl.DEFAULT_CLAMP_MARGIN
    initial_points: tuple[ControlPointSet | None, ...] | None = None
    library: TemplateLibrary | None = None


def validate_outfit(spec: OutfitSpec) -> None:
    if not spec.garments:
        raise SpecError("outfit has no garments")
    width, height = spec.canvas
    if width < 2 or height < 2:
        raise SpecError(f"canvas {spec.canvas} is too small")
    if spec.person_image.shape[:2] != (height, width):
        raise SpecError(
            f"person image is {spec.person_image.shape[1]}x{spec.person_image.shape[0]}, "
            f"canvas is {width}x{height}"
        )
    if spec.base_layout.classes.shape != (height, width):
        raise SpecError("base layout does not match the canvas")
    if spec.coordination not in ("off", "check", "fix"):
        raise SpecError(f"unknown coordination mode '{spec.coordination}'")
    categories = [g.asset.category for g in spec.garments]
    for i, cat in enumerate(categories):
        if cat == GarmentCategory.OUTERWEAR:
            above = categories[i + 1 :]
            if GarmentCategory.TOP in above or GarmentCategory.DRESS in above:
                raise SpecError("invalid layering: outerwear cannot sit below a top or dress")
    if spec.initial_points is not None and len(spec.initial_points) != len(spec.garments):
        raise SpecError("initial_points must align with the garment list")


@dataclass(frozen=True, eq=False)
class RenderResult:
    draft: np.ndarray
    layout: SemanticLayout
    pre_edit_points: tuple[ControlPointSet, ...]
    post_edit_points: tuple[ControlPointSet, ...]
    edit_reports: tuple[tuple[int, dsl.EditReport], ...]
    coordination_violations: tuple[Violation, ...]
    coordination_fixed: bool
    warped: tuple[WarpedGarment, ...]
    occluded_person: np.ndarray
    occluded_layout: SemanticLayout
    layout_without: tuple[SemanticLayout, ...]


def resolve_other(
    template: dsl.EditTemplate, target: int, garments: Sequence[OutfitGarment]
) -> int | None:
    """Index of the nearest co-garment matching the template's require clause.

    Returns None when nothing matches; raises when two candidates tie at the
    same layering distance (an ambiguous edit is an error, not a guess).
    """
    if template.requires is None:
        return None
    candidates = [
        j
        for j in range(len(garments))
        if j != target and dsl.matches_selector(template.requires, garments[j].asset)
    ]
    if not candidates:
        return None
    best = min(abs(j - target) for j in candidates)
    nearest = [j for j in candidates if abs(j - target) == best]
    if len(nearest) > 1:
        names = ", ".join(garments[j].asset.id for j in nearest)
        raise EditError(
            f"template '{template.name}': ambiguous co-garment for "
            f"'{garments[target].asset.id}' ({names})"
        )
    return nearest[0]


def apply_template_in_outfit(
    template: dsl.EditTemplate,
    target: int,
    points: Sequence[ControlPointSet],
    garments: Sequence[OutfitGarment],
    pose: BodyPose,
    library: TemplateLibrary | None = None,
    clamp_margin: float = dsl.DEFAULT_CLAMP_MARGIN,
) -> tuple[ControlPointSet, dsl.EditReport]:
    """Apply one template to one garment inside an outfit.

    When the template rewrites a discrete style, the garment's points are
    re-predicted for the new style and the template's point statements are
    then applied once on top of the fresh prediction.
    """
    library = library or default_templates()
    asset = garments[target].asset
    other = None
    other_idx = resolve_other(template, target, garments)
    if template.requires is not None:
        if other_idx is None:
            raise EditError(
                f"template '{template.name}' requires a co-garment; none in this outfit"
            )
        other = (points[other_idx], garments[other_idx].asset)
    result, report = dsl.apply_template(
        template, points[target], asset, other, clamp_margin=clamp_margin
    )
    if result.style != points[target].style:
        repredicted = predict_control_points(asset, pose, result.style, library)
        result, report = dsl.apply_template(
            template, repredicted, asset, other, clamp_margin=clamp_margin
        )
    return result, report


def _stage(stage: str, garment_id: str, fn):
    try:
        return fn()
    except RenderError:
        raise
    except DrapeError as exc:
        raise RenderError(stage, garment_id, exc) from exc


def _warp_garment(
    garment: OutfitGarment,
    points: ControlPointSet,
    canvas: tuple[int, int],
    smoothing: float,
) -> WarpedGarment:
    asset = garment.asset
    open_outerwear = (
        asset.category == GarmentCategory.OUTERWEAR
        and points.style.get("closure") == "open"
        and asset.split_polyline is not None
    )
    if open_outerwear:
        left, right = split_garment(asset)
        warped_left = warp_image(left, points, canvas, smoothing)
        warped_right = warp_image(right, points, canvas, smoothing)
        return merge_warped(warped_left, warped_right)
    return warp_image(asset, points, canvas, smoothing)


def prepare_points(
    spec: OutfitSpec,
) -> tuple[
    list[ControlPointSet],
    list[ControlPointSet],
    list[tuple[int, dsl.EditReport]],
    tuple[Violation, ...],
    bool,
]:
    """Stages 1-3: prediction, template edits, coordination."""
    library = spec.library or default_templates()
    garments = spec.garments

    pre: list[ControlPointSet] = []
    for i, garment in enumerate(garments):
        if spec.initial_points is not None and spec.initial_points[i] is not None:
            pre.append(spec.initial_points[i])
            continue
        pre.append(
            _stage(
                "predict",
                garment.asset.id,
                lambda g=garment: predict_control_points(g.asset, spec.pose, g.style, library),
            )
        )

    post = list(pre)
    reports: list[tuple[int, dsl.EditReport]] = []
    for template in spec.templates:
        for i in range(len(garments)):
            if not dsl.applicable(template, garments[i].asset):
                continue
            if template.requires is not None and resolve_other(template, i, garments) is None:
                reports.append((i, dsl.skip_report(template, "no co-garment matches require")))
                continue

            def run(i=i, template=template):
                return apply_template_in_outfit(
                    template, i, post, garments, spec.pose, library, spec.clamp_margin
                )

            new_points, report = _stage("edit", garments[i].asset.id, run)
            post[i] = new_points
            reports.append((i, report))

    violations: tuple[Violation, ...] = ()
    fixed = False
    if spec.coordination != "off":
        pairs = [(post[i], garments[i].asset) for i in range(len(garments))]
        found = check_coordination(pairs, margin=spec.coordination_margin)
        violations = tuple(found)
        if spec.coordination == "fix" and found:
            repaired = _stage(
                "coordinate",
                garments[found[0].inner_index].asset.id,
                lambda: fix_coordination(pairs, found, spec.coordination_margin),
            )
            post = [p for p, _ in repaired]
            fixed = True
    return pre, post, reports, violations, fixed


def render_outfit(spec: OutfitSpec) -> RenderResult:
    """Run the full pipeline; see the module docstring for the stage order."""
    validate_outfit(spec)
    garments = spec.garments
    pre, post, reports, violations, fixed = prepare_points(spec)

    warped: list[WarpedGarment] = []
    for i, garment in enumerate(garments):
        warped.append(
            _stage(
                "warp",
                garment.asset.id,
                lambda g=garment, p=post[i]: _warp_garment(g, p, spec.canvas, spec.smoothing),
            )
        )

    occluded_layout = spec.base_layout
    for garment in garments:
        occluded_layout = occlude(occluded_layout, garment.asset.category)
    cleared = spec.base_layout.classes != occluded_layout.classes
    occluded_person = np.array(spec.person_image)
    occluded_person[cleared] = 0

    draft = occluded_person
    for piece in warped:
        draft = alpha_over(piece.image, draft)

    categories = [g.asset.category for g in garments]
    final_layout = _stage(
        "layout",
        garments[-1].asset.id,
        lambda: rasterize_layout(occluded_layout, list(zip(warped, categories))),
    )

    background = final_layout.class_id("background")
    layout_without = []
    for category in categories:
        classes = np.array(final_layout.classes)
        classes[final_layout.region({
            GarmentCategory.TOP: "top",
            GarmentCategory.BOTTOM: "bottom",
            GarmentCategory.SKIRT: "bottom",
            GarmentCategory.OUTERWEAR: "outerwear",
            GarmentCategory.DRESS: "dress",
        }[category])] = background
        layout_without.append(final_layout.with_classes(classes))

    return RenderResult(
        draft=draft,
        layout=final_layout,
        pre_edit_points=tuple(pre),
        post_edit_points=tuple(post),
        edit_reports=tuple(reports),
        coordination_violations=violations,
        coordination_fixed=fixed,
        warped=tuple(warped),
        occluded_person=occluded_person,
        occluded_layout=occluded_layout,
        layout_without=tuple(layout_without),
    )


# ---------------------------------------------------------------------------
# Batch application over a catalog


@dataclass(frozen=True, eq=False)
class BatchItem:
    asset_id: str
    applied: bool
    reason: str | None = None
    result: RenderResult | None = None
    error: str | None = None


def batch_apply(
    catalog: Sequence[GarmentAsset],
    template: dsl.EditTemplate,
    pose: BodyPose,
    *,
    canvas: tuple[int, int] = (256, 384),
    smoothing: float = DEFAULT_SMOOTHING,
    library: TemplateLibrary | None = None,
) -> list[BatchItem]:
    """Render every applicable garment in a catalog with one template.

    Inapplicable garments are skipped with a reason; per-item failures are
    collected rather than aborting the batch.
    """
    width, height = canvas
    person = np.zeros((height, width, 4), dtype=np.uint8)
    base = blank_layout(canvas)
    items: list[BatchItem] = []
    for asset in catalog:
        if not dsl.applicable(template, asset):
            items.append(BatchItem(asset.id, applied=False, reason="selector mismatch"))
            continue
        spec = OutfitSpec(
            person_image=person,
            pose=pose,
            base_layout=base,
            garments=(OutfitGarment(asset, resolve_style(asset.category)),),
            templates=(template,),
            canvas=canvas,
            smoothing=smoothing,
            coordination="off",
            library=library,
        )
        try:
            items.append(BatchItem(asset.id, applied=True, result=render_outfit(spec)))
        except DrapeError as exc:
            items.append(BatchItem(asset.id, applied=False, reason="error", error=str(exc)))
    return items


# ---------------------------------------------------------------------------
# Interpolation between the un-edited and edited drape


@dataclass(frozen=True, eq=False)
class InterpolationStep:
    t: float
    points: tuple[ControlPointSet, ...]
    result: RenderResult


def interpolate_template(
    spec: OutfitSpec, template: dsl.EditTemplate, steps: int
) -> list[InterpolationStep]:
    """Render a sequence of drafts sweeping a template's point edits.

    The endpoints are the outfit right before the template's point
    statements (style switches are applied up front so the point sets stay
    comparable) and right after them; intermediate frames lerp the target
    garments' coordinates. Coordination is left off so the sweep shows pure
    point movement.
    """
    if steps < 2:
        raise SpecError("interpolation needs at least 2 steps")
    validate_outfit(spec)
    library = spec.library or default_templates()
    garments = spec.garments
    _, post, _, _, _ = prepare_points(spec)

    style_only = dsl.EditTemplate(
        name=f"{template.name}#style",
        selector=template.selector,
        requires=template.requires,
        statements=tuple(s for s in template.statements if isinstance(s, dsl.SetStyle)),
    )
    start = list(post)
    end = list(post)
    targets = []
    for i in range(len(garments)):
        if not dsl.applicable(template, garments[i].asset):
            continue
        if template.requires is not None and resolve_other(template, i, garments) is None:
            continue
        start[i], _ = apply_template_in_outfit(
            style_only, i, post, garments, spec.pose, library, spec.clamp_margin
        )
        end[i], _ = apply_template_in_outfit(
            template, i, post, garments, spec.pose, library, spec.clamp_margin
        )
        targets.append(i)
    if not targets:
        raise SpecError(f"template '{template.name}' applies to nothing in this outfit")

    frames: list[InterpolationStep] = []
    for step in range(steps):
        t = step / (steps - 1)
        blended = list(post)
        for i in targets:
            coords = (1.0 - t) * start[i].coords + t * end[i].coords
            blended[i] = end[i].with_(coords=coords)
        frame_spec = replace(
            spec,
            templates=(),
            initial_points=tuple(blended),
            coordination="off",
        )
        frames.append(
            InterpolationStep(t=t, points=tuple(blended), result=render_outfit(frame_spec))
        )
    return frames


def moved_point_ids(start: ControlPointSet, end: ControlPointSet) -> np.ndarray:
    """Points present at the end whose coordinates changed."""
    changed = np.any(start.coords != end.coords, axis=1)
    return np.flatnonzero(changed & end.present)


# ---------------------------------------------------------------------------
# Geometric agreement measurements


def point_mask_distances(
    points: ControlPointSet, mask: np.ndarray, canvas: tuple[int, int]
) -> np.ndarray:
    """Distance from each present point to the mask support (0 when on it)."""
    width, height = canvas
    ids = np.flatnonzero(points.present)
    out = np.zeros(len(ids))
    if not mask.any():
        return np.full(len(ids), np.inf)
    edge = np.argwhere(mask_boundary(mask))
    edge_xy = np.column_stack([edge[:, 1] / (width - 1), edge[:, 0] / (height - 1)])
    for n, pid in enumerate(ids):
        x, y = points.coords[pid]
        px = int(round(x * (width - 1)))
        py = int(round(y * (height - 1)))
        if 0 <= px < width and 0 <= py < height and mask[py, px]:
            continue
        out[n] = np.min(np.hypot(edge_xy[:, 0] - x, edge_xy[:, 1] - y))
    return out


def boundary_deviation(
    points: ControlPointSet,
    mask: np.ndarray,
    canvas: tuple[int, int],
    point_ids: Sequence[int],
) -> float:
    """Max distance from the given points to the mask boundary."""
    width, height = canvas
    edge = np.argwhere(mask_boundary(mask))
    if edge.size == 0:
        return float("inf")
    edge_xy = np.column_stack([edge[:, 1] / (width - 1), edge[:, 0] / (height - 1)])
    worst = 0.0
    for pid in point_ids:
        x, y = points.coords[pid]
        worst = max(worst, float(np.min(np.hypot(edge_xy[:, 0] - x, edge_xy[:, 1] - y))))
    return worst


def split_edge_deviation(result: RenderResult, garment_index: int) -> float:
    """Max distance from a garment's split-edge points to its mask boundary."""
    points = result.post_edit_points[garment_index]
    schema = schema_for_version(points.schema_version)
    ids = [i for i in schema.ids_in_group(PointGroup.SPLIT_EDGE) if points.present[i]]
    if not ids:
        raise SpecError("garment has no present split-edge points")
    mask = result.warped[garment_index].mask
    return boundary_deviation(points, mask, result.warped[garment_index].canvas, ids)


# ---------------------------------------------------------------------------
# Outfit spec files and result export


def outfit_from_dict(
    doc: Mapping,
    base_dir: Path | str,
    *,
    library: TemplateLibrary | None = None,
) -> OutfitSpec:
    """Build a spec from a parsed outfit document (TOML file or request body).

    Relative paths resolve against ``base_dir``. Template entries are either
    names (looked up among the built-in drapes plus any ``template_dirs``)
    or inline template source.
    """
    base = Path(base_dir)
    try:
        person = doc["person"]
        person_image = load_rgba(base / person["image"])
        pose = loads_pose((base / person["pose"]).read_text())
        base_layout = load_layout(base / person["layout"])
        garment_docs = doc["garments"]
    except KeyError as exc:
        raise SpecError(f"outfit spec missing required field {exc}") from exc
    except (OSError, ValueError) as exc:
        raise SpecError(f"outfit spec: {exc}") from exc
    if not garment_docs:
        raise SpecError("outfit spec lists no garments")

    garments = []
    for g in garment_docs:
        if "asset" not in g:
            raise SpecError("garment entry missing 'asset'")
        asset = load_asset(base / g["asset"])
        garments.append(OutfitGarment(asset, resolve_style(asset.category, g.get("style"))))

    known = dsl.builtin_drapes()
    for extra in doc.get("template_dirs", ()):
        known.update(dsl.load_drape_dir(base / extra))
    templates = []
    for entry in doc.get("templates", ()):
        text = str(entry)
        if text.lstrip().startswith("template"):
            templates.append(dsl.parse_template(text))
        elif text in known:
            templates.append(known[text])
        else:
            raise SpecError(f"unknown edit template '{text}'")

    canvas = tuple(doc.get("canvas", DEFAULT_CANVAS))
    if len(canvas) != 2:
        raise SpecError("canvas must be [width, height]")
    return OutfitSpec(
        person_image=person_image,
        pose=pose,
        base_layout=base_layout,
        garments=tuple(garments),
        templates=tuple(templates),
        canvas=(int(canvas[0]), int(canvas[1])),
        smoothing=float(doc.get("smoothing", DEFAULT_SMOOTHING)),
        coordination=str(doc.get("coordination", "check")),
        coordination_margin=float(doc.get("coordination_margin", DEFAULT_COORDINATION_MARGIN)),
        library=library,
    )


def load_outfit_file(path: Path | str, library: TemplateLibrary | None = None) -> OutfitSpec:
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise SpecError(f"{path}: not valid TOML: {exc}") from exc
    return outfit_from_dict(doc, path.parent, library=library)


def write_render_result(result: RenderResult, out_dir: Path | str, spec: OutfitSpec) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_rgba(result.draft, out / "draft.png")
    save_layout(result.layout, out / "layout.png")
    save_rgba(result.occluded_person, out / "occluded_person.png")
    points_doc = {
        "garments": [
            {
                "index": i,
                "asset_id": spec.garments[i].asset.id,
                "pre_edit": result.pre_edit_points[i].to_dict(),
                "post_edit": result.post_edit_points[i].to_dict(),
            }
            for i in range(len(spec.garments))
        ]
    }
    (out / "points.json").write_text(json.dumps(points_doc, indent=2) + "\n")
    reports_doc = {
        "edits": [
            {"garment_index": i, **report.to_dict()} for i, report in result.edit_reports
        ],
        "coordination": {
            "fixed": result.coordination_fixed,
            "violations": [
                {
                    "inner_index": v.inner_index,
                    "outer_index": v.outer_index,
                    "point_id": v.point_id,
                    "clearance": v.clearance,
                }
                for v in result.coordination_violations
            ],
        },
    }
    (out / "reports.json").write_text(json.dumps(reports_doc, indent=2) + "\n")
