"""Exception hierarchy shared by all mdlconf modules."""

from __future__ import annotations


class MdlError(ValueError):
    """Base class for every error raised by this package."""


class MdlSyntaxError(MdlError):
    def __init__(self, message: str, line: int, column: int, source: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")


class DuplicateLabelError(MdlError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"duplicate label {label!r}")


class GroundingError(MdlError):
    """Raised when a substitution cannot be applied to a term."""


class UncoveredVariableError(GroundingError):
    def __init__(self, name: str, kind: str = "term"):
        self.name = name
        self.kind = kind
        super().__init__(f"{kind} variable {name!r} is not covered by the substitution")


class KindMismatchError(GroundingError):
    pass


class LabelCollisionError(GroundingError):
    def __init__(self, label: str, var: str):
        self.label = label
        self.var = var
        super().__init__(f"tail ${var} supplies label {label!r} already present in the collection")


class StubError(MdlError):
    """Invalid service stub or shell description."""


class TopologyError(MdlError):
    """Invalid topology, bundle, or unresolved port reference."""


class EmitError(MdlError):
    pass


class UniverseTooLarge(MdlError):
    pass
