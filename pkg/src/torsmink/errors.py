"""Structured errors shared by the library and the CLI.

Every failure the tools can report carries a machine-readable kind, a human
message, and a context dict that serializes to the error JSON emitted on
stderr: {"kind": ..., "message": ..., "context": {...}}.
"""

from __future__ import annotations

from typing import Any


class ToolError(Exception):
    """Base class; subclasses fix `kind`, constructors may override it."""

    kind = "error"

    def __init__(self, message: str, *, kind: str | None = None, **context: Any):
        super().__init__(message)
        if kind is not None:
            self.kind = kind
        self.message = message
        self.context = context

    def to_jsonable(self) -> dict:
        ctx = {}
        for key, val in self.context.items():
            if hasattr(val, "tolist"):
                val = val.tolist()
            ctx[key] = val
        return {"kind": self.kind, "message": self.message, "context": ctx}


class InvalidInputError(ToolError):
    kind = "invalid_input"


class NormDomainError(ToolError):
    kind = "norm_domain"


class InvalidExponentError(ToolError):
    kind = "invalid_p"


class UnboundedRegionError(ToolError):
    kind = "unbounded_region"


class EmptyInteriorError(ToolError):
    kind = "empty_interior"


class OriginNotInteriorError(ToolError):
    kind = "origin_not_interior"


class NonConvergenceError(ToolError):
    """Iteration budget exhausted; `partial` carries the last iterate."""

    kind = "nonconvergence"

    def __init__(self, message: str, *, partial: Any = None, **context: Any):
        super().__init__(message, **context)
        self.partial = partial


class FacetDeathError(ToolError):
    kind = "facet_death"


class MeasureValidationError(ToolError):
    """Kinds: centroid_nonzero, hemisphere_concentrated, general_position."""

    kind = "measure_invalid"


class DirectionMismatchError(ToolError):
    kind = "direction_mismatch"


class MassInequalityError(ToolError):
    kind = "mass_inequality_violation"


class InnerMaximizerError(ToolError):
    kind = "inner_maximizer_divergence"
