"""Control-point vocabulary, on-body point sets, and point-set metrics.

Garment placement is described by a fixed vocabulary of 49 semantic control
points. Each point has a category-level meaning ("left collar", "crotch")
shared by every garment instance of the categories it applies to, which is
what makes drape edits portable across a whole catalog.

The vocabulary itself is a versioned config document, not code. The default
document ships with the package (``data/schema_v1.json``) and covers the
categories top, bottom, skirt, outerwear, and dress. Nothing in the engine
hard-codes point names; everything resolves them through a loaded
:class:`ControlPointSchema`.

Coordinates live in normalized person-canvas units: x and y in [0, 1],
origin at the top-left, y growing downward. "left"/"right" are in canvas
terms, i.e. left means smaller x on an upright, camera-facing body.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping

import numpy as np

from .errors import MetricError, SchemaError

POINT_COUNT = 49


class GarmentCategory(str, Enum):
    TOP = "top"
    BOTTOM = "bottom"
    SKIRT = "skirt"
    OUTERWEAR = "outerwear"
    DRESS = "dress"


class PointGroup(str, Enum):
    COLLAR = "collar"
    SHOULDER = "shoulder"
    SLEEVE_OUTER = "sleeve_outer"
    SLEEVE_INNER = "sleeve_inner"
    TORSO_SIDE = "torso_side"
    WAISTLINE = "waistline"
    HEM = "hem"
    SPLIT_EDGE = "split_edge"
    LEG = "leg"


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    CENTER = "center"


# Discrete drape styles and their allowed values. Enum order defines the
# numeric encoding (position in the tuple), e.g. tuck: full_tuck=0, untuck=1.
STYLE_DOMAINS: dict[str, tuple[str, ...]] = {
    "tuck": ("full_tuck", "untuck", "front_tuck", "side_tuck", "half_tuck"),
    "closure": ("closed", "open"),
}

# Style entries assumed when a garment does not override them. Closure is
# only meaningful for outerwear; tuck only for tops.
DEFAULT_STYLES: dict[GarmentCategory, dict[str, str]] = {
    GarmentCategory.TOP: {"tuck": "untuck"},
    GarmentCategory.OUTERWEAR: {"closure": "closed"},
    GarmentCategory.BOTTOM: {},
    GarmentCategory.SKIRT: {},
    GarmentCategory.DRESS: {},
}

GENDERS = ("female", "male", "unisex")


@dataclass(frozen=True)
class StyleVector:
    """Discrete drape controls (tuck mode, closure) as named entries.

    Entries are validated against :data:`STYLE_DOMAINS` and kept sorted by
    name so equal vectors compare equal regardless of construction order.
    """

    entries: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        seen = set()
        for name, value in self.entries:
            if name in seen:
                raise SchemaError(f"duplicate style entry '{name}'")
            seen.add(name)
            domain = STYLE_DOMAINS.get(name)
            if domain is None:
                raise SchemaError(f"unknown style '{name}'")
            if value not in domain:
                raise SchemaError(
                    f"style '{name}' cannot be '{value}' (one of {', '.join(domain)})"
                )
        object.__setattr__(self, "entries", tuple(sorted(self.entries)))

    @classmethod
    def of(cls, **entries: str) -> "StyleVector":
        return cls(tuple(entries.items()))

    @classmethod
    def from_dict(cls, mapping: Mapping[str, str]) -> "StyleVector":
        return cls(tuple(mapping.items()))

    def get(self, name: str) -> str | None:
        for key, value in self.entries:
            if key == name:
                return value
        return None

    def with_entry(self, name: str, value: str) -> "StyleVector":
        kept = tuple((k, v) for k, v in self.entries if k != name)
        return StyleVector(kept + ((name, value),))

    def as_dict(self) -> dict[str, str]:
        return dict(self.entries)

    def value_index(self, name: str) -> int | None:
        """Numeric encoding of an entry: its position in the style domain."""
        value = self.get(name)
        if value is None:
            return None
        return STYLE_DOMAINS[name].index(value)

    def is_subset_of(self, other: "StyleVector") -> bool:
        return all(other.get(k) == v for k, v in self.entries)


@dataclass(frozen=True)
class LossWeights:
    """Weights blending the three point-set loss components."""

    lambda1: float = 1.0
    lambda2: float = 1.0
    lambda3: float = 1.0

    def __post_init__(self):
        if min(self.lambda1, self.lambda2, self.lambda3) < 0:
            raise SchemaError("loss weights must be non-negative")
        if self.lambda1 == self.lambda2 == self.lambda3 == 0:
            raise SchemaError("at least one loss weight must be positive")


@dataclass(frozen=True)
class PointDef:
    id: int
    name: str
    group: PointGroup
    side: Side
    categories: frozenset[GarmentCategory]


@dataclass(frozen=True)
class ControlPointSchema:
    """The versioned 49-point vocabulary with per-category applicability."""

    version: str
    points: tuple[PointDef, ...]

    def __post_init__(self):
        if len(self.points) != POINT_COUNT:
            raise SchemaError(f"expected {POINT_COUNT} points, got {len(self.points)}")
        ids = [p.id for p in self.points]
        if sorted(ids) != list(range(POINT_COUNT)):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            if dupes:
                raise SchemaError(f"duplicate point id {dupes[0]}")
            raise SchemaError("point ids must cover 0..48 exactly")
        names = [p.name for p in self.points]
        for name in names:
            if names.count(name) > 1:
                raise SchemaError(f"duplicate point name '{name}'")
        for cat in GarmentCategory:
            if not any(cat in p.categories for p in self.points):
                raise SchemaError(f"category '{cat.value}' has no applicable points")

    def _by_id(self) -> dict[int, PointDef]:
        cached = self.__dict__.get("_by_id_cache")
        if cached is None:
            cached = {p.id: p for p in self.points}
            self.__dict__["_by_id_cache"] = cached
        return cached

    def _by_name(self) -> dict[str, PointDef]:
        cached = self.__dict__.get("_by_name_cache")
        if cached is None:
            cached = {p.name: p for p in self.points}
            self.__dict__["_by_name_cache"] = cached
        return cached

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in sorted(self.points, key=lambda p: p.id))

    def has_point(self, name: str) -> bool:
        return name in self._by_name()

    def id_of(self, name: str) -> int:
        point = self._by_name().get(name)
        if point is None:
            raise SchemaError(f"unknown point name '{name}'")
        return point.id

    def point(self, ident: int | str) -> PointDef:
        if isinstance(ident, str):
            return self._by_name()[ident]
        return self._by_id()[ident]

    def group_of(self, point_id: int) -> PointGroup:
        return self._by_id()[point_id].group

    def side_of(self, point_id: int) -> Side:
        return self._by_id()[point_id].side

    def ids_in_group(self, group: PointGroup, side: Side | None = None) -> tuple[int, ...]:
        return tuple(
            p.id
            for p in sorted(self.points, key=lambda p: p.id)
            if p.group == group and (side is None or p.side == side)
        )

    def applicability(self, category: GarmentCategory) -> np.ndarray:
        """Boolean mask (49,) of the points that exist for a category."""
        mask = np.zeros(POINT_COUNT, dtype=bool)
        for p in self.points:
            if category in p.categories:
                mask[p.id] = True
        mask.setflags(write=False)
        return mask

    def match_pattern(self, pattern: str) -> tuple[int, ...]:
        """Resolve a name pattern (exact, ``pre*``, ``*fix``, or ``*``) to ids."""
        stars = pattern.count("*")
        if stars > 1 or (stars == 1 and not (pattern.startswith("*") or pattern.endswith("*"))):
            raise SchemaError(f"bad point pattern '{pattern}': * allowed as prefix or suffix only")
        if pattern == "*":
            test = lambda name: True
        elif pattern.endswith("*"):
            stem = pattern[:-1]
            test = lambda name: name.startswith(stem)
        elif pattern.startswith("*"):
            stem = pattern[1:]
            test = lambda name: name.endswith(stem)
        else:
            test = lambda name: name == pattern
        return tuple(p.id for p in sorted(self.points, key=lambda p: p.id) if test(p.name))


def _parse_enum(enum_cls, value, what: str, entry: str):
    try:
        return enum_cls(value)
    except ValueError:
        raise SchemaError(f"unknown {what} '{value}' in point '{entry}'") from None


def load_schema(text: str) -> ControlPointSchema:
    """Parse and validate a schema document (JSON)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"schema document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "points" not in doc:
        raise SchemaError("schema document must be an object with a 'points' list")
    version = str(doc.get("version", ""))
    if not version:
        raise SchemaError("schema document missing 'version'")
    points = []
    for raw in doc["points"]:
        name = raw.get("name", "<unnamed>")
        for key in ("id", "name", "group", "side", "categories"):
            if key not in raw:
                raise SchemaError(f"point '{name}' missing field '{key}'")
        points.append(
            PointDef(
                id=int(raw["id"]),
                name=str(raw["name"]),
                group=_parse_enum(PointGroup, raw["group"], "group", name),
                side=_parse_enum(Side, raw["side"], "side", name),
                categories=frozenset(
                    _parse_enum(GarmentCategory, c, "category", name) for c in raw["categories"]
                ),
            )
        )
    return ControlPointSchema(version=version, points=tuple(points))


def dump_schema(schema: ControlPointSchema) -> str:
    doc = {
        "version": schema.version,
        "points": [
            {
                "id": p.id,
                "name": p.name,
                "group": p.group.value,
                "side": p.side.value,
                "categories": sorted(c.value for c in p.categories),
            }
            for p in sorted(schema.points, key=lambda p: p.id)
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


@lru_cache(maxsize=1)
def default_schema() -> ControlPointSchema:
    text = resources.files("drape").joinpath("data/schema_v1.json").read_text()
    return load_schema(text)


_SCHEMA_REGISTRY: dict[str, ControlPointSchema] = {}


def register_schema(schema: ControlPointSchema) -> None:
    _SCHEMA_REGISTRY[schema.version] = schema


def schema_for_version(version: str) -> ControlPointSchema:
    default = default_schema()
    if version == default.version:
        return default
    if version in _SCHEMA_REGISTRY:
        return _SCHEMA_REGISTRY[version]
    raise SchemaError(f"no schema registered for version '{version}'")


def _frozen_array(values, dtype, shape) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    if arr.shape != shape:
        raise SchemaError(f"expected array of shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ControlPointSet:
    """On-body 2D coordinates for one garment, with a presence mask.

    Coordinates are kept for all 49 slots; slots where ``present`` is False
    are ignored by every metric and edit. The presence mask mirrors the
    schema's applicability for the garment's category, minus anything an
    edit has disabled.
    """

    schema_version: str
    coords: np.ndarray
    present: np.ndarray
    style: StyleVector = StyleVector()

    def __post_init__(self):
        object.__setattr__(
            self, "coords", _frozen_array(self.coords, np.float64, (POINT_COUNT, 2))
        )
        object.__setattr__(self, "present", _frozen_array(self.present, bool, (POINT_COUNT,)))
        if not np.all(np.isfinite(self.coords)):
            raise SchemaError("control point coordinates must be finite")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ControlPointSet):
            return NotImplemented
        return (
            self.schema_version == other.schema_version
            and self.style == other.style
            and np.array_equal(self.coords, other.coords)
            and np.array_equal(self.present, other.present)
        )

    def with_(
        self,
        coords: np.ndarray | None = None,
        present: np.ndarray | None = None,
        style: StyleVector | None = None,
    ) -> "ControlPointSet":
        return ControlPointSet(
            schema_version=self.schema_version,
            coords=self.coords if coords is None else coords,
            present=self.present if present is None else present,
            style=self.style if style is None else style,
        )

    def present_ids(self) -> np.ndarray:
        return np.flatnonzero(self.present)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "points": [
                {
                    "id": i,
                    "x": float(self.coords[i, 0]),
                    "y": float(self.coords[i, 1]),
                    "present": bool(self.present[i]),
                }
                for i in range(POINT_COUNT)
            ],
            "style": self.style.as_dict(),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ControlPointSet":
        records = doc.get("points")
        if records is None or len(records) != POINT_COUNT:
            raise SchemaError(f"point set must contain exactly {POINT_COUNT} records")
        coords = np.zeros((POINT_COUNT, 2))
        present = np.zeros(POINT_COUNT, dtype=bool)
        seen = set()
        for rec in records:
            i = int(rec["id"])
            if i in seen or not 0 <= i < POINT_COUNT:
                raise SchemaError(f"bad or repeated point id {i}")
            seen.add(i)
            coords[i] = (float(rec["x"]), float(rec["y"]))
            present[i] = bool(rec["present"])
        return cls(
            schema_version=str(doc.get("schema_version", "")),
            coords=coords,
            present=present,
            style=StyleVector.from_dict(doc.get("style", {})),
        )


def dumps_points(points: ControlPointSet) -> str:
    return json.dumps(points.to_dict(), indent=2) + "\n"


def loads_points(text: str) -> ControlPointSet:
    return ControlPointSet.from_dict(json.loads(text))


def distance_matrix(points: ControlPointSet) -> np.ndarray:
    """Pairwise Euclidean distances between all 49 coordinate slots.

    Rows and columns of absent points are computed like any other; callers
    that care about presence mask them (see :func:`structural_loss`).
    """
    c = points.coords
    diff = c[:, None, :] - c[None, :, :]
    return np.sqrt((diff**2).sum(axis=2))


def _shared_ids(a: ControlPointSet, b: ControlPointSet) -> np.ndarray:
    if a.schema_version != b.schema_version:
        raise MetricError(
            f"point sets use different schemas ({a.schema_version!r} vs {b.schema_version!r})"
        )
    shared = np.flatnonzero(a.present & b.present)
    if shared.size == 0:
        raise MetricError("empty intersection: no control point is present in both sets")
    return shared


def structural_loss(a: ControlPointSet, b: ControlPointSet) -> float:
    """Frobenius norm of the difference between pairwise-distance matrices.

    Computed over the points present in both sets. Zero under any rigid
    motion of either set; positive under anything that changes the garment's
    internal structure (e.g. anisotropic scaling).
    """
    idx = _shared_ids(a, b)
    sub = np.ix_(idx, idx)
    return float(np.linalg.norm(distance_matrix(a)[sub] - distance_matrix(b)[sub]))


@dataclass(frozen=True)
class PointLosses:
    l1: float
    l2: float
    ls: float
    total: float


def point_losses(
    a: ControlPointSet, b: ControlPointSet, weights: LossWeights = LossWeights()
) -> PointLosses:
    """Coordinate and structural errors between two point sets.

    l1 is the mean absolute coordinate error and l2 the mean squared error,
    both averaged over every coordinate of every shared-present point so the
    values are comparable across garments with different point counts.
    """
    idx = _shared_ids(a, b)
    diff = a.coords[idx] - b.coords[idx]
    l1 = float(np.abs(diff).mean())
    l2 = float((diff**2).mean())
    ls = structural_loss(a, b)
    total = weights.lambda1 * l1 + weights.lambda2 * l2 + weights.lambda3 * ls
    return PointLosses(l1=l1, l2=l2, ls=ls, total=total)
