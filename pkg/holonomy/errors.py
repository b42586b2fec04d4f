# holonomy/errors.py
from __future__ import annotations

from typing import Any, Optional


class HolonomyError(Exception):
    """
    Base class for every failure raised by the lab.
    Subclasses keep their structured fields so the CLI/log can report them.
    """


class _Detailed(HolonomyError):
    """
    Error with a context + reason message:
        "<context> | key=value | reason"
    """

    def __init__(self, context: str, reason: str, **fields: Any):
        self.context = str(context)
        self.reason = str(reason)
        self.fields = dict(fields)
        parts = [self.context]
        parts += [f"{k}={v}" for k, v in self.fields.items()]
        parts.append(self.reason)
        super().__init__(" | ".join(parts))


class BranchError(_Detailed):
    """log_map called outside the branch-safety radius."""

    def __init__(self, distance: float, radius: float):
        self.distance = float(distance)
        self.radius = float(radius)
        super().__init__("log_map", "element outside branch-safety radius",
                         distance=f"{self.distance:.3g}", radius=self.radius)


class TagMismatch(_Detailed):
    def __init__(self, op: str, left: str, right: str):
        self.left = str(left)
        self.right = str(right)
        super().__init__(op, "operands belong to different groups/algebras", left=self.left, right=self.right)


class EvalError(_Detailed):
    """An evaluator (field, map, integrand) raised or produced non-finite values."""

    def __init__(self, what: str, reason: str, point: Optional[Any] = None):
        self.what = str(what)
        self.point = point
        if point is None:
            super().__init__(what, reason)
        else:
            super().__init__(what, reason, point=point)


class MembershipError(_Detailed):
    """Matrix does not satisfy the group constraint / algebra subspace."""

    def __init__(self, tag: str, residual: float, tol: float):
        self.tag = str(tag)
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(tag, "matrix is not a member", residual=f"{self.residual:.3e}", tol=self.tol)


class ConstraintError(_Detailed):
    """Fake-curvature / fake-2-curvature precondition failed."""

    def __init__(self, check: str, residual: float, tol: float):
        self.check = str(check)
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(check, "constraint violated", residual=f"{self.residual:.3e}", tol=f"{self.tol:.3e}")


class _MapInvalid(_Detailed):
    def __init__(self, kind: str, face: str, reason: str, value: float):
        self.face = str(face)
        self.value = float(value)
        super().__init__(kind, reason, face=self.face, value=f"{self.value:.3g}")


class CubeInvalid(_MapInvalid):
    def __init__(self, face: str, reason: str, value: float):
        super().__init__("cube", face, reason, value)


class TesseractInvalid(_MapInvalid):
    def __init__(self, face: str, reason: str, value: float):
        super().__init__("tesseract", face, reason, value)


class NotABigon(_MapInvalid):
    def __init__(self, face: str, value: float):
        super().__init__("bigon", face, "edge is not pinned to a point", value)


class PinError(_MapInvalid):
    def __init__(self, value: float):
        super().__init__("square", "t=0", "bottom edge must be constant in s", value)


class StartMismatch(_Detailed):
    def __init__(self, reason: str, distance: float):
        self.distance = float(distance)
        super().__init__("transport_string", reason, distance=f"{self.distance:.3e}")


class InvariantViolated(_Detailed):
    def __init__(self, what: str, residual: float, tol: float):
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(what, "sample violates its defining equation",
                         residual=f"{self.residual:.3e}", tol=f"{self.tol:.3e}")


class NotCentral(_Detailed):
    def __init__(self, residual: float, tol: float):
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__("center variant", "2-curvature values are not central",
                         residual=f"{self.residual:.3e}", tol=f"{self.tol:.3e}")


class JunctionMismatch(_Detailed):
    def __init__(self, kind: str, distance: float):
        self.distance = float(distance)
        super().__init__(kind, "pieces do not meet at the junction", distance=f"{self.distance:.3e}")


class ConfigError(_Detailed, ValueError):
    """
    Raised for malformed scene files, unknown ids and invalid run settings.
    The CLI maps it to exit code 2.
    """

    def __init__(self, source: str, reason: str, key: Optional[str] = None):
        self.source = str(source)
        self.key = key
        if key is None:
            super().__init__(self.source, reason)
        else:
            super().__init__(self.source, reason, key=key)
