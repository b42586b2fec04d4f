# holonomy/logic/higher/crossed.py
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from holonomy.errors import TagMismatch
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.elements import AlgebraElement, GroupElement, log_map
from holonomy.logic.lie.groups import MatrixGroup

# All structure maps take and return raw complex arrays and broadcast over
# leading axes: group-level maps act on (..., n, n) group matrices, algebra-level
# maps on (..., n, n) algebra matrices.
Map1 = Callable[[np.ndarray], np.ndarray]
Map2 = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class CrossedModuleInstance:
    """
    (G, H, tau, alpha) with its differentials.

    alpha(g, h)      G acting on H
    alpha_alg(g, Y)  G acting on the algebra of H
    dalpha(X, Y)     algebra of G acting on the algebra of H
    """

    name: str
    G: MatrixGroup
    H: MatrixGroup
    tau: Map1
    dtau: Map1
    alpha: Map2
    alpha_alg: Map2
    dalpha: Map2

    # right inverse of dtau on its image, used to build B from F_A
    tau_section: Optional[Map1] = None
    # (k, n, n) basis of ker(dtau); free 2-form parts live here
    kernel_basis: Optional[np.ndarray] = None
    # algebra-level Peiffer commutator; None means identically zero
    peiffer: Optional[Map2] = None
    description: str = ""

    def peiffer_or_zero(self, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        if self.peiffer is None:
            return np.zeros(np.broadcast_shapes(v.shape, w.shape), dtype=complex)
        return self.peiffer(v, w)


@dataclass(frozen=True, eq=False)
class Crossed2ModuleInstance:
    """
    L --delta--> H --partial--> G with actions of G on H and L,
    the algebra-level Peiffer lifting {-,-} and the derived action of H on L.

    prime_alg(h, x)  h acting on an algebra value of L (group-level derived action)
    prime_grp(h, l)  the same action on L itself
    """

    name: str
    G: MatrixGroup
    H: MatrixGroup
    L: MatrixGroup

    partial: Map1
    dpartial: Map1
    delta: Map1
    ddelta: Map1

    act_H: Map2
    act_H_alg: Map2
    dact_H: Map2
    act_L: Map2
    act_L_alg: Map2
    dact_L: Map2

    lift: Map2
    prime_alg: Map2
    prime_grp: Map2

    partial_section: Optional[Map1] = None
    delta_section: Optional[Map1] = None
    kernel_basis: Optional[np.ndarray] = None  # ker(dpartial) in the algebra of H
    central_basis: Optional[np.ndarray] = None  # ker(ddelta) in the algebra of L
    # twisted coordinates: central slot shifted by twist * <z0, delta(x)>, z0 = twist_axis in su(2)
    twist: float = 0.0
    twist_axis: Optional[np.ndarray] = None
    description: str = ""
    _lower: Optional[CrossedModuleInstance] = field(default=None, init=False, repr=False)

    def peiffer(self, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        """<v, w> = [v, w] - partial(v) acting on w."""
        return lg.commutator(v, w) - self.dact_H(self.dpartial(v), w)

    def dprime(self, v: np.ndarray, x: np.ndarray) -> np.ndarray:
        """v acting on x: -{delta(x), v}."""
        return -self.lift(self.ddelta(x), v)

    def twist_shift(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if self.twist == 0.0 or self.twist_axis is None or self.central_basis is None:
            return np.zeros_like(x)
        pair = np.asarray(lg.su2_pairing(self.twist_axis, self.ddelta(x)))
        return self.twist * pair[..., None, None] * self.central_basis[0]

    def to_twisted(self, x: np.ndarray) -> np.ndarray:
        """Matrix of x in twisted coordinates (the bracket picks up the beta term)."""
        return np.asarray(x, dtype=complex) + self.twist_shift(x)

    def from_twisted(self, x: np.ndarray) -> np.ndarray:
        """Inverse of to_twisted."""
        return np.asarray(x, dtype=complex) - self.twist_shift(x)

    def twisted_coords(self, x: np.ndarray) -> np.ndarray:
        return self.L.coords(self.to_twisted(x))

    def beta_bracket(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Bracket of two twisted values: ([x, y], twist * <z0, [x, y]>)."""
        y = self.delta_section(lg.commutator(self.ddelta(a), self.ddelta(b)))
        return self.to_twisted(y)

    @property
    def lower(self) -> CrossedModuleInstance:
        """(G, H, partial, acting on H); generally not a crossed module."""
        if self._lower is None:
            low = CrossedModuleInstance(
                name=self.name + "/lower",
                G=self.G,
                H=self.H,
                tau=self.partial,
                dtau=self.dpartial,
                alpha=self.act_H,
                alpha_alg=self.act_H_alg,
                dalpha=self.dact_H,
                tau_section=self.partial_section,
                kernel_basis=self.kernel_basis,
                peiffer=self.peiffer,
                description=self.description,
            )
            object.__setattr__(self, "_lower", low)
        return self._lower


# =========================================================
# Derived action of H on the algebra of L
# =========================================================

def derivation_matrix(inst: Crossed2ModuleInstance, v: np.ndarray) -> np.ndarray:
    """Real matrix of x -> v acting on x in the algebra basis of L."""
    basis = inst.L.basis
    cols = inst.L.coords(inst.dprime(np.asarray(v, dtype=complex)[None], basis))
    return cols.T


def act_prime(h: GroupElement, x: AlgebraElement, inst: Crossed2ModuleInstance) -> AlgebraElement:
    """
    h acting on x by exponentiating the derivation of log(h).
    Raises BranchError when h is too far from the identity for log_map.
    """
    if h.tag != inst.H.tag:
        raise TagMismatch("act_prime", h.tag, inst.H.tag)
    if x.tag != inst.L.tag:
        raise TagMismatch("act_prime", x.tag, inst.L.tag)
    v = log_map(h)
    d = derivation_matrix(inst, v.matrix)
    c = scipy.linalg.expm(d) @ x.coords()
    return AlgebraElement(inst.L.from_coords(c), inst.L)


def peiffer_commutator(v: AlgebraElement, w: AlgebraElement, inst: Crossed2ModuleInstance) -> AlgebraElement:
    if v.tag != w.tag:
        raise TagMismatch("peiffer_commutator", v.tag, w.tag)
    return AlgebraElement(inst.peiffer(v.matrix, w.matrix), inst.H)


__all__ = [
    "CrossedModuleInstance",
    "Crossed2ModuleInstance",
    "derivation_matrix",
    "act_prime",
    "peiffer_commutator",
]
