# holonomy/logic/lie/elements.py
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from holonomy.errors import BranchError, MembershipError, TagMismatch
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.groups import MatrixGroup
from holonomy.logic.tuning import TUNING


@dataclass(frozen=True, eq=False)
class GroupElement:
    matrix: np.ndarray
    group: MatrixGroup

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.group.size, self.group.size):
            raise MembershipError(self.group.tag, float("inf"), TUNING.tol_group)
        res = float(self.group.constraint_residual(m))
        if res > TUNING.tol_group * max(1.0, float(np.linalg.norm(m))):
            raise MembershipError(self.group.tag, res, TUNING.tol_group)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def tag(self) -> str:
        return self.group.tag

    @classmethod
    def identity(cls, group: MatrixGroup) -> "GroupElement":
        return cls(group.identity(), group)

    def _check(self, other: "GroupElement", op: str) -> None:
        if self.tag != other.tag:
            raise TagMismatch(op, self.tag, other.tag)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        self._check(other, "mul")
        return GroupElement(self.matrix @ other.matrix, self.group)

    def inverse(self) -> "GroupElement":
        return GroupElement(np.linalg.inv(self.matrix), self.group)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    matrix: np.ndarray
    group: MatrixGroup  # the algebra is the group's tangent space at e

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.group.size, self.group.size):
            raise MembershipError("Lie(" + self.group.tag + ")", float("inf"), TUNING.tol_group)
        res = float(self.group.algebra_residual(m))
        if res > TUNING.tol_group * max(1.0, float(np.linalg.norm(m))):
            raise MembershipError("Lie(" + self.group.tag + ")", res, TUNING.tol_group)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def tag(self) -> str:
        return self.group.tag

    @classmethod
    def zero(cls, group: MatrixGroup) -> "AlgebraElement":
        return cls(np.zeros((group.size, group.size), dtype=complex), group)

    @classmethod
    def from_coords(cls, coords, group: MatrixGroup) -> "AlgebraElement":
        return cls(group.from_coords(np.asarray(coords, dtype=float)), group)

    def coords(self) -> np.ndarray:
        return self.group.coords(self.matrix)

    def _check(self, other: "AlgebraElement", op: str) -> None:
        if self.tag != other.tag:
            raise TagMismatch(op, self.tag, other.tag)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other, "add")
        return AlgebraElement(self.matrix + other.matrix, self.group)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other, "sub")
        return AlgebraElement(self.matrix - other.matrix, self.group)

    def __mul__(self, scalar: float) -> "AlgebraElement":
        return AlgebraElement(float(scalar) * self.matrix, self.group)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


def exp_map(x: AlgebraElement) -> GroupElement:
    return GroupElement(lg.expm(x.matrix), x.group)


def log_map(g: GroupElement, radius: float = TUNING.branch_radius) -> AlgebraElement:
    """
    Principal logarithm near the identity.
    Raises BranchError outside ||g - I||_F <= radius instead of picking a branch.
    """
    dist = float(np.linalg.norm(g.matrix - np.eye(g.group.size)))
    if dist > radius:
        raise BranchError(dist, radius)
    raw = scipy.linalg.logm(g.matrix)
    # logm may return tiny off-algebra parts; the projection drops them
    return AlgebraElement(g.group.project(raw), g.group)


def bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    x._check(y, "bracket")
    return AlgebraElement(lg.commutator(x.matrix, y.matrix), x.group)


def adjoint(g: GroupElement, x: AlgebraElement) -> AlgebraElement:
    if g.tag != x.tag:
        raise TagMismatch("adjoint", g.tag, x.tag)
    return AlgebraElement(lg.conj(g.matrix, x.matrix), x.group)


def group_distance(g1: GroupElement, g2: GroupElement) -> float:
    """||g1 g2^-1 - I||_F"""
    g1._check(g2, "group_distance")
    return float(lg.distance(g1.matrix, g2.matrix))
