# holonomy/logic/transport/tangent.py
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np
import scipy.integrate

from holonomy.errors import InvariantViolated
from holonomy.logic.fields.calculus import contract
from holonomy.logic.fields.forms import CurvatureForm, Form
from holonomy.logic.higher.catalog import as_crossed_module
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.elements import GroupElement
from holonomy.logic.transport.holonomy import Instance
from holonomy.logic.transport.lifts import LiftGrid
from holonomy.logic.transport.pullback import Frame, simpson
from holonomy.logic.tuning import TUNING

logger = logging.getLogger(__name__)

RICHARDSON_EPS = 1e-3


@dataclass(frozen=True, eq=False)
class TangentSample:
    """
    Tangent vector at (lift, h) of the path-lift x H space, sampled on the lift's nodes.

    base  (N+1, d) base part v(t)
    fiber (N+1, n, n) fiber part, right-trivialized: xi(t) g(t)^-1
    eta   left-trivialized H part: X_H = h eta
    """

    lift: LiftGrid
    base: np.ndarray
    fiber: np.ndarray
    h: GroupElement
    eta: np.ndarray

    def __add__(self, other: "TangentSample") -> "TangentSample":
        return replace(self, base=self.base + other.base, fiber=self.fiber + other.fiber, eta=self.eta + other.eta)

    def distance(self, other: "TangentSample") -> float:
        return max(
            float(np.max(np.abs(self.base - other.base))) if self.base.size else 0.0,
            float(np.max(np.linalg.norm(self.fiber - other.fiber, axis=(-2, -1)))),
            float(np.linalg.norm(self.eta - other.eta)),
        )


# =========================================================
# Sampled quantities along the lift
# =========================================================

def _frame(lift: LiftGrid) -> Frame:
    if lift.arity != 1 or lift.source is None:
        raise ValueError("tangent samples live on lifted paths with a known parameter map")
    return Frame.at(lift.source, lift.params[0][:, None])


def _pair(base: np.ndarray, frame: Frame) -> np.ndarray:
    """(N+1, d, 2): columns v(t) and the path velocity."""
    return np.stack([base, frame.jac[..., 0]], axis=-1)


def connection_series(A: Form, sample: TangentSample) -> np.ndarray:
    """omega(v~) = Ad_{g^-1}(A(v) + fiber) per node."""
    frame = _frame(sample.lift)
    g = sample.lift.fibers
    a = contract(A.components(frame.x), sample.base[..., None], [0], A.dim)
    return lg.inv(g) @ (a + sample.fiber) @ g


def curvature_series(A: Form, sample: TangentSample) -> np.ndarray:
    """-Ad_{g^-1} F_A(v, gamma')"""
    frame = _frame(sample.lift)
    g = sample.lift.fibers
    F = contract(CurvatureForm(A).components(frame.x), _pair(sample.base, frame), [0, 1], A.dim)
    return -(lg.inv(g) @ F @ g)


def b_integral(B: Form, sample: TangentSample, inst: Instance) -> np.ndarray:
    """integral over t of alpha_{g^-1} B(v, gamma')"""
    cm = as_crossed_module(inst)
    frame = _frame(sample.lift)
    vals = contract(B.components(frame.x), _pair(sample.base, frame), [0, 1], B.dim)
    vals = cm.alpha_alg(lg.inv(sample.lift.fibers), vals)
    return simpson(vals, sample.lift.params[0], axis=-3)


def invariant_residual(A: Form, sample: TangentSample) -> float:
    """max over nodes of |d_t omega(v~) + Ad_{g^-1} F_A(v, gamma')|"""
    t = sample.lift.params[0]
    da = np.gradient(connection_series(A, sample), t, axis=0, edge_order=2)
    return float(np.max(np.linalg.norm(da - curvature_series(A, sample), axis=(-2, -1))))


# =========================================================
# Construction
# =========================================================

def _cumulative(values: np.ndarray, t: np.ndarray) -> np.ndarray:
    re = scipy.integrate.cumulative_simpson(values.real, x=t, axis=0, initial=0.0)
    im = scipy.integrate.cumulative_simpson(values.imag, x=t, axis=0, initial=0.0)
    return re + 1j * im


def sample_from_base(A: Form, lift: LiftGrid, h: GroupElement, base: np.ndarray, omega0: np.ndarray,
                     eta: np.ndarray) -> TangentSample:
    """
    The unique sample with base part `base` and omega(v~(0)) = omega0: the fiber
    part follows from integrating d_t omega = -Ad_{g^-1} F_A(v, gamma').
    """
    g = lift.fibers
    draft = TangentSample(lift, np.asarray(base, dtype=float), np.zeros_like(g), h, np.asarray(eta, dtype=complex))
    omega = np.asarray(omega0, dtype=complex) + _cumulative(curvature_series(A, draft), lift.params[0])
    frame = _frame(lift)
    a = contract(A.components(frame.x), draft.base[..., None], [0], A.dim)
    return replace(draft, fiber=g @ omega @ lg.inv(g) - a)


def fundamental_sample(lift: LiftGrid, h: GroupElement, X1: np.ndarray, X2: np.ndarray,
                       inst: Instance) -> TangentSample:
    """Fundamental field of (X1, X2) under the right G x_alpha H action at (lift, h)."""
    g = lift.fibers
    d = lift.points.shape[-1]
    eta = X2 + _h_inverse_derivative(h, X1, inst)
    return TangentSample(lift, np.zeros((g.shape[0], d)), g @ X1 @ lg.inv(g), h, eta)


def _h_inverse_derivative(h: GroupElement, X1: np.ndarray, inst: Instance) -> np.ndarray:
    """h^-1 d/de alpha_{exp(-e X1)}(h) at e = 0, central differences with one Richardson step."""
    cm = as_crossed_module(inst)

    def central(eps):
        plus = cm.alpha(lg.expm(-eps * X1), h.matrix)
        minus = cm.alpha(lg.expm(eps * X1), h.matrix)
        return (plus - minus) / (2.0 * eps)

    D = (4.0 * central(RICHARDSON_EPS / 2.0) - central(RICHARDSON_EPS)) / 3.0
    return cm.H.project(lg.inv(h.matrix) @ D)


# =========================================================
# Decomposition
# =========================================================

def decompose_tangent(A: Form, B: Form, sample: TangentSample, inst: Instance,
                      tol: float = TUNING.tangent_tol) -> Tuple[TangentSample, TangentSample]:
    """
    (vertical, horizontal) with vertical + horizontal = sample.

    The vertical part is the fundamental field of (X1, X2) with X1 = omega(v~(0));
    the horizontal part starts horizontal and its H part is the B-integral
    of its base variation.
    """
    res = invariant_residual(A, sample)
    if res > tol:
        raise InvariantViolated("tangent sample", res, tol)

    g = sample.lift.fibers
    X1 = connection_series(A, sample)[0]
    beta = b_integral(B, sample, inst)

    vertical = replace(sample, base=np.zeros_like(sample.base), fiber=g @ X1 @ lg.inv(g), eta=sample.eta - beta)
    horizontal = replace(sample, fiber=sample.fiber - vertical.fiber, eta=beta)
    logger.debug("decompose_tangent: |X1| = %.3e, |beta| = %.3e", np.linalg.norm(X1), np.linalg.norm(beta))
    return vertical, horizontal


def vertical_generator(sample: TangentSample, A: Form, inst: Instance) -> Tuple[np.ndarray, np.ndarray]:
    """(X1, X2) of a vertical sample: X1 = omega(v~(0)), X2 = eta - h^-1 D."""
    X1 = connection_series(A, sample)[0]
    return X1, sample.eta - _h_inverse_derivative(sample.h, X1, inst)


__all__ = [
    "TangentSample",
    "connection_series",
    "curvature_series",
    "b_integral",
    "invariant_residual",
    "sample_from_base",
    "fundamental_sample",
    "decompose_tangent",
    "vertical_generator",
]
