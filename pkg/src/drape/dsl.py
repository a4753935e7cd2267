"""The .drape edit-template language: parser, printer, and evaluator.

A template is a named, metadata-conditioned rule that moves control points.
It never touches pixels, which is what guarantees garment identity survives
every edit. The canonical grammar:

    template  = "template" STRING "for" selector "{" {stmt} "}" ;
    selector  = cond {"," cond} ;
    cond      = ("category"|"tag"|"gender") "=" IDENT ;
    stmt      = require | offset | setaxis | align | disable | enable
              | setstyle | clamp ;
    require   = "require" "other" "(" selector ")" ";" ;
    offset    = "offset" pset "by" "(" NUM "," NUM ")" ";" ;
    setaxis   = "set" pref "." axis "=" expr ";" ;
    align     = "align" pset "with" "other" "." pref "." axis ";" ;
    disable   = "disable" pset ";" ;
    enable    = "enable" pset ";" ;
    setstyle  = "set" "style" IDENT "=" IDENT ";" ;
    clamp     = "clamp" pset "within" "other" ";" ;
    pset      = "points" "(" PATTERN ")" ;
    pref      = "point" "(" IDENT ")" ;
    expr      = NUM | "other" "." pref "." axis ["+" NUM] ;
    axis      = "x" | "y" ;

PATTERN globs schema point names with a single ``*`` as prefix or suffix.
``#`` starts a line comment (accepted on input, dropped by the printer).
Offsets are in normalized canvas units, so one template fits every body and
resolution. Files use the ``.drape`` extension; a library directory is
scanned recursively.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from . import geometry
from .errors import DslLintError, DslSyntaxError, EditError
from .schema import (
    GENDERS,
    STYLE_DOMAINS,
    ControlPointSchema,
    ControlPointSet,
    GarmentCategory,
    SchemaError,
    StyleVector,
    default_schema,
    schema_for_version,
)

COND_KEYS = ("category", "tag", "gender")
AXES = ("x", "y")
DEFAULT_CLAMP_MARGIN = 0.01


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Condition:
    key: str
    value: str


@dataclass(frozen=True)
class Selector:
    conditions: tuple[Condition, ...]


@dataclass(frozen=True)
class OtherAxis:
    """Reads ``other.point(name).axis`` with an optional added constant."""

    point: str
    axis: str
    offset: float | None = None


Expr = Union[float, OtherAxis]


@dataclass(frozen=True)
class Offset:
    pattern: str
    dx: float
    dy: float


@dataclass(frozen=True)
class SetAxis:
    point: str
    axis: str
    expr: Expr


@dataclass(frozen=True)
class Align:
    pattern: str
    point: str
    axis: str


@dataclass(frozen=True)
class Disable:
    pattern: str


@dataclass(frozen=True)
class Enable:
    pattern: str


@dataclass(frozen=True)
class SetStyle:
    style: str
    value: str


@dataclass(frozen=True)
class ClampWithin:
    pattern: str


Statement = Union[Offset, SetAxis, Align, Disable, Enable, SetStyle, ClampWithin]


@dataclass(frozen=True)
class EditTemplate:
    name: str
    selector: Selector
    requires: Selector | None
    statements: tuple[Statement, ...]

    def uses_other(self) -> bool:
        return any(_stmt_uses_other(s) for s in self.statements)


def _stmt_uses_other(stmt: Statement) -> bool:
    if isinstance(stmt, (Align, ClampWithin)):
        return True
    return isinstance(stmt, SetAxis) and isinstance(stmt.expr, OtherAxis)


# ---------------------------------------------------------------------------
# Lexer

_PUNCT = set("{}(),;=.*+")


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | num | string | punct | eof
    text: str
    line: int
    col: int


def _lex(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col, i = 1, 1, 0
    n = len(source)

    def err(msg):
        raise DslSyntaxError(msg, line, col)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == '"':
            j = i + 1
            buf = []
            while j < n and source[j] != '"':
                if source[j] == "\n":
                    err("unterminated string")
                if source[j] == "\\" and j + 1 < n and source[j + 1] in '"\\':
                    buf.append(source[j + 1])
                    j += 2
                else:
                    buf.append(source[j])
                    j += 1
            if j >= n:
                err("unterminated string")
            tokens.append(_Token("string", "".join(buf), start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(_Token("ident", source[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and (source[i + 1].isdigit() or source[i + 1] == ".")):
            j = i + 1 if ch == "-" else i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == ".":
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            text = source[i:j]
            try:
                float(text)
            except ValueError:
                err(f"bad number '{text}'")
            tokens.append(_Token("num", text, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch in _PUNCT:
            tokens.append(_Token("punct", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        err(f"unexpected character {ch!r}")
    tokens.append(_Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser (syntax and schema lint in one pass, so errors carry line/column)


class _Parser:
    def __init__(self, tokens: list[_Token], schema: ControlPointSchema):
        self.tokens = tokens
        self.pos = 0
        self.schema = schema
        self.requires: Selector | None = None

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def _advance(self) -> _Token:
        tok = self.cur
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def _syntax(self, msg: str, tok: _Token | None = None):
        tok = tok or self.cur
        raise DslSyntaxError(msg, tok.line, tok.col)

    def _lint(self, msg: str, tok: _Token):
        raise DslLintError(msg, tok.line, tok.col)

    def _expect_punct(self, ch: str) -> _Token:
        if self.cur.kind != "punct" or self.cur.text != ch:
            self._syntax(f"expected '{ch}', found {self._describe(self.cur)}")
        return self._advance()

    def _expect_keyword(self, word: str) -> _Token:
        if self.cur.kind != "ident" or self.cur.text != word:
            self._syntax(f"expected '{word}', found {self._describe(self.cur)}")
        return self._advance()

    def _expect_ident(self, what: str) -> _Token:
        if self.cur.kind != "ident":
            self._syntax(f"expected {what}, found {self._describe(self.cur)}")
        return self._advance()

    def _expect_num(self) -> tuple[float, _Token]:
        if self.cur.kind != "num":
            self._syntax(f"expected a number, found {self._describe(self.cur)}")
        tok = self._advance()
        return float(tok.text), tok

    @staticmethod
    def _describe(tok: _Token) -> str:
        if tok.kind == "eof":
            return "end of input"
        return f"'{tok.text}'"

    # --- selector ---------------------------------------------------------

    def _selector(self) -> Selector:
        conditions = [self._condition()]
        while self.cur.kind == "punct" and self.cur.text == ",":
            self._advance()
            conditions.append(self._condition())
        return Selector(tuple(conditions))

    def _condition(self) -> Condition:
        key_tok = self._expect_ident("a selector key")
        if key_tok.text not in COND_KEYS:
            self._lint(f"unknown selector key '{key_tok.text}'", key_tok)
        self._expect_punct("=")
        val_tok = self._expect_ident("a selector value")
        if key_tok.text == "category":
            try:
                GarmentCategory(val_tok.text)
            except ValueError:
                self._lint(f"unknown category '{val_tok.text}'", val_tok)
        elif key_tok.text == "gender" and val_tok.text not in GENDERS:
            self._lint(f"unknown gender '{val_tok.text}'", val_tok)
        return Condition(key_tok.text, val_tok.text)

    # --- point references --------------------------------------------------

    def _pattern(self) -> str:
        self._expect_keyword("points")
        self._expect_punct("(")
        first = self.cur
        parts = []
        while self.cur.kind == "ident" or (self.cur.kind == "punct" and self.cur.text == "*"):
            parts.append(self._advance().text)
        pattern = "".join(parts)
        if not pattern:
            self._syntax("expected a point pattern")
        try:
            matched = self.schema.match_pattern(pattern)
        except SchemaError as exc:
            self._lint(str(exc), first)
        if not matched:
            self._lint(f"pattern '{pattern}' matches no schema point", first)
        self._expect_punct(")")
        return pattern

    def _point_name(self) -> str:
        self._expect_keyword("point")
        self._expect_punct("(")
        tok = self._expect_ident("a point name")
        if not self.schema.has_point(tok.text):
            self._lint(f"unknown point name '{tok.text}'", tok)
        self._expect_punct(")")
        return tok.text

    def _axis(self) -> str:
        tok = self._expect_ident("'x' or 'y'")
        if tok.text not in AXES:
            self._syntax(f"expected 'x' or 'y', found '{tok.text}'", tok)
        return tok.text

    # --- statements ---------------------------------------------------------

    def _statement(self) -> Statement | None:
        tok = self.cur
        word = tok.text if tok.kind == "ident" else None
        if word == "require":
            self._require(tok)
            return None
        if word == "offset":
            return self._offset()
        if word == "set":
            return self._set()
        if word == "align":
            return self._align(tok)
        if word == "disable":
            self._advance()
            pattern = self._pattern()
            self._expect_punct(";")
            return Disable(pattern)
        if word == "enable":
            self._advance()
            pattern = self._pattern()
            self._expect_punct(";")
            return Enable(pattern)
        if word == "clamp":
            return self._clamp(tok)
        self._syntax(f"expected a statement, found {self._describe(tok)}")

    def _require(self, tok: _Token):
        if self.requires is not None:
            self._lint("duplicate require clause", tok)
        self._advance()
        self._expect_keyword("other")
        self._expect_punct("(")
        selector = self._selector()
        self._expect_punct(")")
        self._expect_punct(";")
        self.requires = selector

    def _offset(self) -> Offset:
        self._advance()
        pattern = self._pattern()
        self._expect_keyword("by")
        self._expect_punct("(")
        dx, _ = self._expect_num()
        self._expect_punct(",")
        dy, _ = self._expect_num()
        self._expect_punct(")")
        self._expect_punct(";")
        return Offset(pattern, dx, dy)

    def _set(self) -> Statement:
        self._advance()
        if self.cur.kind == "ident" and self.cur.text == "style":
            self._advance()
            name_tok = self._expect_ident("a style name")
            if name_tok.text not in STYLE_DOMAINS:
                self._lint(f"unknown style '{name_tok.text}'", name_tok)
            self._expect_punct("=")
            val_tok = self._expect_ident("a style value")
            if val_tok.text not in STYLE_DOMAINS[name_tok.text]:
                self._lint(
                    f"style '{name_tok.text}' cannot be '{val_tok.text}'", val_tok
                )
            self._expect_punct(";")
            return SetStyle(name_tok.text, val_tok.text)
        point = self._point_name()
        self._expect_punct(".")
        axis = self._axis()
        self._expect_punct("=")
        expr = self._expr()
        self._expect_punct(";")
        return SetAxis(point, axis, expr)

    def _expr(self) -> Expr:
        if self.cur.kind == "num":
            value, _ = self._expect_num()
            return value
        tok = self.cur
        self._expect_keyword("other")
        self._mark_other(tok)
        self._expect_punct(".")
        point = self._point_name()
        self._expect_punct(".")
        axis = self._axis()
        offset = None
        if self.cur.kind == "punct" and self.cur.text == "+":
            self._advance()
            offset, _ = self._expect_num()
        return OtherAxis(point, axis, offset)

    def _align(self, tok: _Token) -> Align:
        self._advance()
        pattern = self._pattern()
        self._expect_keyword("with")
        other_tok = self.cur
        self._expect_keyword("other")
        self._mark_other(other_tok)
        self._expect_punct(".")
        point = self._point_name()
        self._expect_punct(".")
        axis = self._axis()
        self._expect_punct(";")
        return Align(pattern, point, axis)

    def _clamp(self, tok: _Token) -> ClampWithin:
        self._advance()
        pattern = self._pattern()
        self._expect_keyword("within")
        other_tok = self.cur
        self._expect_keyword("other")
        self._mark_other(other_tok)
        self._expect_punct(";")
        return ClampWithin(pattern)

    def _mark_other(self, tok: _Token):
        if self.requires is None:
            self._lint("'other' used before any require clause", tok)

    # --- template -----------------------------------------------------------

    def parse(self) -> EditTemplate:
        self._expect_keyword("template")
        if self.cur.kind != "string":
            self._syntax(f"expected a template name string, found {self._describe(self.cur)}")
        name = self._advance().text
        self._expect_keyword("for")
        selector = self._selector()
        self._expect_punct("{")
        statements = []
        while not (self.cur.kind == "punct" and self.cur.text == "}"):
            if self.cur.kind == "eof":
                self._syntax("expected '}' before end of input")
            stmt = self._statement()
            if stmt is not None:
                statements.append(stmt)
        self._expect_punct("}")
        if self.cur.kind != "eof":
            self._syntax(f"unexpected trailing {self._describe(self.cur)}")
        return EditTemplate(
            name=name,
            selector=selector,
            requires=self.requires,
            statements=tuple(statements),
        )


def parse_template(source: str, schema: ControlPointSchema | None = None) -> EditTemplate:
    """Parse and lint one template. Errors carry 1-based line and column."""
    schema = schema or default_schema()
    return _Parser(_lex(source), schema).parse()


def lint_template(template: EditTemplate, schema: ControlPointSchema | None = None) -> None:
    """Re-lint a programmatically built AST (no positions available)."""
    parse_template(print_template(template), schema)
    if template.uses_other() and template.requires is None:
        raise DslLintError("'other' used without a require clause")


# ---------------------------------------------------------------------------
# Printer


def _fmt_selector(selector: Selector) -> str:
    return ", ".join(f"{c.key}={c.value}" for c in selector.conditions)


def print_statement(stmt: Statement) -> str:
    if isinstance(stmt, Offset):
        return f"offset points({stmt.pattern}) by ({stmt.dx!r}, {stmt.dy!r});"
    if isinstance(stmt, SetAxis):
        return f"set point({stmt.point}).{stmt.axis} = {_fmt_expr(stmt.expr)};"
    if isinstance(stmt, Align):
        return f"align points({stmt.pattern}) with other.point({stmt.point}).{stmt.axis};"
    if isinstance(stmt, Disable):
        return f"disable points({stmt.pattern});"
    if isinstance(stmt, Enable):
        return f"enable points({stmt.pattern});"
    if isinstance(stmt, SetStyle):
        return f"set style {stmt.style} = {stmt.value};"
    if isinstance(stmt, ClampWithin):
        return f"clamp points({stmt.pattern}) within other;"
    raise TypeError(f"unknown statement {stmt!r}")


def _fmt_expr(expr: Expr) -> str:
    if isinstance(expr, OtherAxis):
        text = f"other.point({expr.point}).{expr.axis}"
        if expr.offset is not None:
            text += f" + {expr.offset!r}"
        return text
    return repr(expr)


def print_template(template: EditTemplate) -> str:
    """Canonical text form; parse(print(t)) is structurally equal to t."""
    lines = [f'template "{template.name}" for {_fmt_selector(template.selector)} {{']
    if template.requires is not None:
        lines.append(f"  require other({_fmt_selector(template.requires)});")
    for stmt in template.statements:
        lines.append("  " + print_statement(stmt))
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Applicability and application


def matches_selector(selector: Selector, asset) -> bool:
    for cond in selector.conditions:
        if cond.key == "category":
            if asset.category.value != cond.value:
                return False
        elif cond.key == "tag":
            if cond.value not in asset.tags:
                return False
        elif cond.key == "gender":
            if asset.gender != cond.value:
                return False
    return True


def applicable(template: EditTemplate, garment) -> bool:
    """True iff every selector condition matches the garment's metadata."""
    return matches_selector(template.selector, garment)


@dataclass(frozen=True)
class PointMove:
    point_id: int
    before: tuple[float, float]
    after: tuple[float, float]


@dataclass(frozen=True)
class AppliedStatement:
    index: int
    text: str
    moved: tuple[PointMove, ...] = ()
    presence_changed: tuple[int, ...] = ()
    note: str | None = None


@dataclass(frozen=True)
class SkippedStatement:
    index: int
    text: str
    reason: str


@dataclass(frozen=True)
class EditReport:
    """What one template application did: every statement appears exactly
    once, as applied or skipped."""

    template: str
    applied: tuple[AppliedStatement, ...]
    skipped: tuple[SkippedStatement, ...]
    style_changes: tuple[tuple[str, str | None, str], ...]

    def to_dict(self) -> dict:
        return {
            "template": self.template,
            "applied": [
                {
                    "index": a.index,
                    "statement": a.text,
                    "moved": [
                        {"point": m.point_id, "before": list(m.before), "after": list(m.after)}
                        for m in a.moved
                    ],
                    "presence_changed": list(a.presence_changed),
                    "note": a.note,
                }
                for a in self.applied
            ],
            "skipped": [
                {"index": s.index, "statement": s.text, "reason": s.reason}
                for s in self.skipped
            ],
            "style_changes": [list(c) for c in self.style_changes],
        }


def skip_report(template: EditTemplate, reason: str) -> EditReport:
    """Report for a template that could not run at all (e.g. unmet require)."""
    skipped = tuple(
        SkippedStatement(i, print_statement(s), reason)
        for i, s in enumerate(template.statements)
    )
    return EditReport(template.name, (), skipped, ())


def _axis_index(axis: str) -> int:
    return 0 if axis == "x" else 1


def apply_template(
    template: EditTemplate,
    target: ControlPointSet,
    target_asset,
    other: tuple[ControlPointSet, object] | None = None,
    *,
    clamp_margin: float = DEFAULT_CLAMP_MARGIN,
) -> tuple[ControlPointSet, EditReport]:
    """Run a template's statements, in order, over a copy of ``target``.

    ``other`` supplies the co-garment named by the template's require clause
    (its point set and asset). Offsets move every matching present point;
    presence edits never touch coordinates. A set-style statement rewrites
    the style vector only; re-predicting points for the new style is the
    caller's concern.
    """
    if not applicable(template, target_asset):
        raise EditError(
            f"template '{template.name}' does not apply to garment '{target_asset.id}'"
        )
    other_points: ControlPointSet | None = None
    other_asset = None
    if template.requires is not None:
        if other is None:
            raise EditError(
                f"template '{template.name}' requires a co-garment matching "
                f"({_fmt_selector(template.requires)}); none supplied"
            )
        other_points, other_asset = other
        if not matches_selector(template.requires, other_asset):
            raise EditError(
                f"template '{template.name}': supplied co-garment "
                f"'{other_asset.id}' does not match ({_fmt_selector(template.requires)})"
            )

    schema = schema_for_version(target.schema_version)
    applicability = schema.applicability(target_asset.category)
    coords = np.array(target.coords)
    present = np.array(target.present)
    style = target.style

    applied: list[AppliedStatement] = []
    skipped: list[SkippedStatement] = []
    style_changes: list[tuple[str, str | None, str]] = []
    last_writer: dict[tuple[int, int], int] = {}

    def eval_other(point: str, axis: str, offset: float | None) -> float:
        assert other_points is not None
        j = schema_for_version(other_points.schema_version).id_of(point)
        if not other_points.present[j]:
            raise EditError(
                f"template '{template.name}' reads point '{point}' which is absent "
                "in the co-garment"
            )
        value = float(other_points.coords[j, _axis_index(axis)])
        if offset is not None:
            value = value + offset
        return value

    def write_axis(pid: int, axis: int, value: float, index: int) -> str | None:
        note = None
        prev = last_writer.get((pid, axis))
        if prev is not None:
            note = f"overwrites statement {prev}"
        last_writer[(pid, axis)] = index
        coords[pid, axis] = value
        return note

    for index, stmt in enumerate(template.statements):
        text = print_statement(stmt)
        if isinstance(stmt, Offset):
            ids = [i for i in schema.match_pattern(stmt.pattern) if present[i]]
            moves = []
            for i in ids:
                before = (float(coords[i, 0]), float(coords[i, 1]))
                coords[i, 0] += stmt.dx
                coords[i, 1] += stmt.dy
                moves.append(PointMove(i, before, (float(coords[i, 0]), float(coords[i, 1]))))
            applied.append(AppliedStatement(index, text, tuple(moves)))
        elif isinstance(stmt, SetAxis):
            pid = schema.id_of(stmt.point)
            if not present[pid]:
                skipped.append(SkippedStatement(index, text, "target point not present"))
                continue
            if isinstance(stmt.expr, OtherAxis):
                value = eval_other(stmt.expr.point, stmt.expr.axis, stmt.expr.offset)
            else:
                value = float(stmt.expr)
            axis = _axis_index(stmt.axis)
            before = (float(coords[pid, 0]), float(coords[pid, 1]))
            note = write_axis(pid, axis, value, index)
            move = PointMove(pid, before, (float(coords[pid, 0]), float(coords[pid, 1])))
            applied.append(AppliedStatement(index, text, (move,), note=note))
        elif isinstance(stmt, Align):
            value = eval_other(stmt.point, stmt.axis, None)
            axis = _axis_index(stmt.axis)
            ids = [i for i in schema.match_pattern(stmt.pattern) if present[i]]
            moves = []
            notes = []
            for i in ids:
                before = (float(coords[i, 0]), float(coords[i, 1]))
                note = write_axis(i, axis, value, index)
                if note:
                    notes.append(note)
                moves.append(PointMove(i, before, (float(coords[i, 0]), float(coords[i, 1]))))
            applied.append(
                AppliedStatement(index, text, tuple(moves), note="; ".join(notes) or None)
            )
        elif isinstance(stmt, Disable):
            ids = tuple(i for i in schema.match_pattern(stmt.pattern) if present[i])
            present[list(ids)] = False
            applied.append(AppliedStatement(index, text, presence_changed=ids))
        elif isinstance(stmt, Enable):
            matched = schema.match_pattern(stmt.pattern)
            enabled = tuple(i for i in matched if not present[i] and applicability[i])
            refused = [i for i in matched if not applicability[i]]
            present[list(enabled)] = True
            note = None
            if refused:
                names = ", ".join(schema.point(i).name for i in refused)
                note = f"not applicable to category '{target_asset.category.value}': {names}"
            applied.append(AppliedStatement(index, text, presence_changed=enabled, note=note))
        elif isinstance(stmt, SetStyle):
            old = style.get(stmt.style)
            style = style.with_entry(stmt.style, stmt.value)
            style_changes.append((stmt.style, old, stmt.value))
            applied.append(AppliedStatement(index, text))
        elif isinstance(stmt, ClampWithin):
            assert other_points is not None
            hull_pts = other_points.coords[other_points.present]
            hull = geometry.convex_hull(hull_pts)
            if len(hull) < 3:
                raise EditError(
                    f"template '{template.name}': co-garment hull is degenerate"
                )
            ids = [i for i in schema.match_pattern(stmt.pattern) if present[i]]
            moves = []
            for i in ids:
                before = (float(coords[i, 0]), float(coords[i, 1]))
                coords[i] = geometry.project_into_hull(hull, coords[i], clamp_margin)
                after = (float(coords[i, 0]), float(coords[i, 1]))
                if before != after:
                    moves.append(PointMove(i, before, after))
            applied.append(AppliedStatement(index, text, tuple(moves)))
        else:  # pragma: no cover - parser produces no other nodes
            raise TypeError(f"unknown statement {stmt!r}")

    report = EditReport(
        template=template.name,
        applied=tuple(applied),
        skipped=tuple(skipped),
        style_changes=tuple(style_changes),
    )
    result = target.with_(coords=coords, present=present, style=style)
    return result, report


# ---------------------------------------------------------------------------
# Template libraries on disk


def load_drape_file(path: Path | str, schema: ControlPointSchema | None = None) -> EditTemplate:
    path = Path(path)
    try:
        return parse_template(path.read_text(), schema)
    except (DslSyntaxError, DslLintError) as exc:
        raise type(exc)(f"{path.name}: {exc.args[0]}") from exc


def load_drape_dir(path: Path | str, schema: ControlPointSchema | None = None) -> dict[str, EditTemplate]:
    """Recursively load every .drape file under a directory, keyed by name."""
    path = Path(path)
    templates: dict[str, EditTemplate] = {}
    for file in sorted(path.rglob("*.drape")):
        template = load_drape_file(file, schema)
        if template.name in templates:
            raise DslLintError(f"duplicate template name '{template.name}' in {file}")
        templates[template.name] = template
    return templates


def builtin_drapes(schema: ControlPointSchema | None = None) -> dict[str, EditTemplate]:
    """The edit templates shipped with the package."""
    from importlib import resources

    templates: dict[str, EditTemplate] = {}
    root = resources.files("drape").joinpath("data/drapes")
    for file in sorted(root.iterdir(), key=lambda f: f.name):
        if file.name.endswith(".drape"):
            template = parse_template(file.read_text(), schema)
            templates[template.name] = template
    return templates
