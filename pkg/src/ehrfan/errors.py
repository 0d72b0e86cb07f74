"""Exception hierarchy with stable machine-readable error codes.

Every error the library raises carries a ``code`` string and an optional
``witness`` payload; the CLI and the HTTP service serialize both verbatim.
"""

from __future__ import annotations

from typing import Any


def _jsonable(value: Any) -> Any:
    """Coerce witness data (tuples, frozensets, nested) to JSON-friendly types."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(_jsonable(v) for v in value)
    return value


class EhrfanError(Exception):
    """Base class for all domain errors (CLI exit code 1)."""

    code = "ERROR"

    def __init__(self, message: str, *, code: str | None = None, witness: Any = None):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.witness = witness

    def payload(self) -> dict:
        out: dict[str, Any] = {"code": self.code, "message": str(self)}
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        return out


class ZeroVectorError(EhrfanError):
    code = "ZERO_VECTOR"


class DependentVectorsError(EhrfanError):
    code = "DEPENDENT_VECTORS"


class NotUnimodularError(EhrfanError):
    """Vectors do not extend to a lattice basis; witness holds the SNF diagonal."""

    code = "NOT_UNIMODULAR"


class FanValidationError(EhrfanError):
    """Raised by fan construction; code is one of NON_PRIMITIVE_RAY,
    DUPLICATE_RAY, NOT_SIMPLICIAL, NOT_UNIMODULAR, BAD_INTERSECTION."""


class ConeNotInFanError(EhrfanError):
    code = "CONE_NOT_IN_FAN"


class BadRayError(EhrfanError):
    code = "BAD_RAY"


class WrongFanError(EhrfanError):
    code = "WRONG_FAN"


class NotPureError(EhrfanError):
    code = "NOT_PURE"


class NotCompleteError(EhrfanError):
    code = "NOT_COMPLETE"


class NotBalancedError(EhrfanError):
    code = "NOT_BALANCED"


class NotConvexError(EhrfanError):
    code = "NOT_CONVEX"


class MixedSignError(EhrfanError):
    """pointwise max/min undefined on the fan; witness names the cone."""

    code = "MIXED_SIGN_ON_CONE"


class RefinementRequiredError(EhrfanError):
    """A pair of exponents is incomparable on some cone; witness names the pair."""

    code = "REFINEMENT_REQUIRED"


class NotEhrhartError(EhrfanError):
    """Fan fails the Ehrhart decision procedure; witness carries the failure."""

    code = "NOT_EHRHART"


class DegreeBoundError(EhrfanError):
    code = "DEGREE_BOUND_EXCEEDED"


class UnboundedPolytopeError(EhrfanError):
    code = "UNBOUNDED_POLYTOPE"


class ShellLimitError(EhrfanError):
    code = "SHELL_LIMIT_EXCEEDED"


class MatroidError(EhrfanError):
    """Invalid matroid input; code is INVALID_BASES, LOOPS_PRESENT or NOT_A_FLAT."""
