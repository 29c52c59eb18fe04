"""Exception types shared across the package."""


class MinsurfError(Exception):
    """Base class for all package errors."""


class ParseError(MinsurfError, ValueError):
    """Syntax or semantic error in an expression string.

    Carries the byte offset of the offending token.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.message = message
        self.offset = offset


class SurfaceSpecError(MinsurfError, ValueError):
    """Malformed surface description (JSON spec or constructor arguments)."""


class EmptyReportError(MinsurfError):
    """A grid operation found zero usable points."""


class InsufficientSamplesError(MinsurfError):
    """Fewer usable samples than the operation requires."""

    def __init__(self, count: int, required: int = 25, context: str = ""):
        detail = f"only {count} usable samples, need {required}"
        if context:
            detail += f" ({context})"
        super().__init__(detail)
        self.count = count
        self.required = required


class PathThroughPoleError(MinsurfError):
    """An integration path runs through (or too close to) a singular point."""

    def __init__(self, point: complex, detail: str = ""):
        msg = f"integration path hits singular point {point!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.point = point
