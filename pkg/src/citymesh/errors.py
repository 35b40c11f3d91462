"""Exception types shared across the package."""


class CitymeshError(Exception):
    """Base class for every error this package raises deliberately."""


class ObjParseError(CitymeshError):
    """Malformed OBJ input. Carries the 1-based line number of the record."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class DegenerateFaceError(CitymeshError):
    """Triangle with no defined normal (collinear or coincident corners)."""


class ParameterError(CitymeshError):
    """Argument outside its documented domain."""


class MeshMismatchError(CitymeshError):
    """Operands refer to different meshes."""
