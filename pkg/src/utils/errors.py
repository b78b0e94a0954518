from typing import Any, Dict, Optional


class PatchLocatorError(Exception):
    """Base class for all errors raised by the locator packages."""


class MeshFormatError(PatchLocatorError, ValueError):
    """A mesh file could not be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None, path: Optional[str] = None):
        self.line_number = line_number
        self.path = path
        where = ""
        if path:
            where += f"{path}"
        if line_number is not None:
            where += f":{line_number}"
        super().__init__(f"{where}: {message}" if where else message)


class UnsupportedElementError(PatchLocatorError, ValueError):
    pass


class NonConformingMeshError(PatchLocatorError, ValueError):
    pass


class DegenerateElementError(PatchLocatorError, ValueError):
    def __init__(self, element_id: Optional[int], measure: float):
        self.element_id = element_id
        self.measure = measure
        label = "Element" if element_id is None else f"Element {element_id}"
        super().__init__(f"{label} is degenerate (measure {measure:.3e})")


class ZeroVectorError(PatchLocatorError, ValueError):
    pass


class DegenerateProjectionError(PatchLocatorError, ValueError):
    pass


class NonConvexPolygonError(PatchLocatorError, ValueError):
    pass


class OutsideGridError(PatchLocatorError, ValueError):
    pass


class IndexBuildError(PatchLocatorError, RuntimeError):
    def __init__(self, message: str, cell_id: Optional[int] = None):
        self.cell_id = cell_id
        super().__init__(message if cell_id is None else f"{message} (cell {cell_id})")


class LocatorInvariantError(PatchLocatorError, RuntimeError):
    def __init__(self, message: str, state: Optional[Dict[str, Any]] = None):
        self.state = state or {}
        details = ", ".join(f"{k}={v}" for k, v in self.state.items())
        super().__init__(f"{message} [{details}]" if details else message)


class WalkCycleError(PatchLocatorError, RuntimeError):
    pass


class ResampleLimitError(PatchLocatorError, RuntimeError):
    pass


class CrossCheckError(PatchLocatorError, RuntimeError):
    def __init__(self, message: str, trace: Optional[Dict[str, Any]] = None):
        self.trace = trace or {}
        super().__init__(f"{message}: {self.trace}" if self.trace else message)


class WalkTieError(WalkCycleError):
    """A walk could not decide which element follows a corner shared by several exit facets."""
