"""Exception types shared across the engine."""


class DrapeError(Exception):
    """Base class for all engine errors."""


class SchemaError(DrapeError):
    """Control-point schema document is malformed or inconsistent."""


class MetricError(DrapeError):
    """A point-set metric could not be computed (e.g. no shared points)."""


class PoseError(DrapeError):
    """Body pose is missing required joints or is otherwise unusable."""


class DegenerateFitError(DrapeError):
    """A transform fit has no unique solution (coincident or collinear sites)."""


class TemplateError(DrapeError):
    """Canonical point template is missing or failed validation."""


class DslError(DrapeError):
    """Problem in a .drape edit template source.

    Carries the 1-based source line and column when known.
    """

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class DslSyntaxError(DslError):
    pass


class DslLintError(DslError):
    pass


class EditError(DrapeError):
    """An edit template could not be applied to a garment."""


class AssetError(DrapeError):
    """Garment asset bundle is missing files or internally inconsistent."""


class WarpError(DrapeError):
    """Warp fitting or application failed."""


class LayoutError(DrapeError):
    """Semantic layout operation failed."""


class SpecError(DrapeError):
    """Outfit spec failed validation."""


class RenderError(DrapeError):
    """A render stage failed; carries the garment and stage for context."""

    def __init__(self, stage: str, garment_id: str, cause: Exception):
        self.stage = stage
        self.garment_id = garment_id
        self.cause = cause
        super().__init__(f"stage '{stage}' failed for garment '{garment_id}': {cause}")
