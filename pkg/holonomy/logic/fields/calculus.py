# holonomy/logic/fields/calculus.py
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from holonomy.logic.fields.forms import (
    CurvatureForm,
    Form,
    LiftingWedgeForm,
    SumForm,
    ThreeCurvatureForm,
    TwoCurvatureForm,
    combos,
    sort_sign,
)
from holonomy.logic.fields.param_maps import ParamMap
from holonomy.logic.higher.crossed import CrossedModuleInstance, Crossed2ModuleInstance
from holonomy.logic.tuning import TUNING


# =========================================================
# Jacobians
# =========================================================

def fd_jacobian(pmap: ParamMap, u, h_fd: float = TUNING.h_fd) -> np.ndarray:
    """
    Second-order finite-difference Jacobian (..., d, k).
    Central differences inside [0,1]^k; one-sided three-point stencils where
    the central stencil would leave the parameter domain.
    """
    u = np.asarray(u, dtype=float)
    h = float(h_fd)
    f0 = pmap.evaluate(u)
    cols = []
    for j in range(pmap.arity):
        e = np.zeros(pmap.arity)
        e[j] = h
        a = u[..., j]
        fwd = a - h < 0.0
        bwd = a + h > 1.0
        up = np.clip(u + e, 0.0, 1.0)
        dn = np.clip(u - e, 0.0, 1.0)
        up2 = np.clip(u + 2 * e, 0.0, 1.0)
        dn2 = np.clip(u - 2 * e, 0.0, 1.0)
        central = (pmap.evaluate(up) - pmap.evaluate(dn)) / (2 * h)
        forward = (-3 * f0 + 4 * pmap.evaluate(up) - pmap.evaluate(up2)) / (2 * h)
        backward = (3 * f0 - 4 * pmap.evaluate(dn) + pmap.evaluate(dn2)) / (2 * h)
        col = np.where(fwd[..., None], forward, np.where(bwd[..., None], backward, central))
        cols.append(col)
    return np.stack(cols, axis=-1)


def jacobian(pmap: ParamMap, u, h_fd: float = TUNING.h_fd, mode: Optional[str] = None) -> np.ndarray:
    """d x k Jacobian at u (batched). Analytic when the map has it and mode allows."""
    mode = mode or pmap.derivative_mode
    if mode == "analytic":
        j = pmap.analytic_jac(u)
        if j is not None:
            return j
    return fd_jacobian(pmap, u, h_fd)


# =========================================================
# Contraction of forms with pushforward columns
# =========================================================

def contract(values: np.ndarray, jac: np.ndarray, cols: Sequence[int], dim: int) -> np.ndarray:
    """
    omega(J e_{c1}, ..., J e_{cp}) from stored components:
        sum over sorted I of omega_I det(J[I, cols]).

    values: (..., C(d,p), n, n); jac: (..., d, k) -> (..., n, n)
    """
    cols = list(cols)
    p = len(cols)
    sub = jac[..., :, cols]  # (..., d, p)
    out = None
    for ci, idx in enumerate(combos(dim, p)):
        minor = sub[..., list(idx), :]
        w = minor[..., 0, 0] if p == 1 else np.linalg.det(minor)
        term = w[..., None, None] * values[..., ci, :, :]
        out = term if out is None else out + term
    if out is None:
        return np.zeros(values.shape[:-3] + values.shape[-2:], dtype=complex)
    return out


# =========================================================
# Curvatures at points
# =========================================================

def curvature_form(A: Form) -> CurvatureForm:
    return CurvatureForm(A)


def two_curvature_form(A: Form, B: Form, inst: CrossedModuleInstance) -> TwoCurvatureForm:
    return TwoCurvatureForm(A, B, inst.dalpha)


def three_curvature_form(A: Form, B: Form, C: Form, inst: Crossed2ModuleInstance) -> SumForm:
    """F_C = dC + A wedge C + {B wedge B}"""
    return SumForm(ThreeCurvatureForm(A, C, inst.dact_L), LiftingWedgeForm(B, inst.lift, inst.L))


def curvature_F_A(A: Form, m, h_fd: Optional[float] = None) -> np.ndarray:
    """(..., C(d,2), n, n) components of F_A at m."""
    F = CurvatureForm(A)
    if h_fd is not None:
        F.h_fd = float(h_fd)
    return F.components(m)


def two_curvature_F_B(A: Form, B: Form, m, inst: CrossedModuleInstance, h_fd: Optional[float] = None) -> np.ndarray:
    F = TwoCurvatureForm(A, B, inst.dalpha)
    if h_fd is not None:
        F.h_fd = float(h_fd)
    return F.components(m)


def three_curvature_F_C(A: Form, B: Form, C: Form, m, inst: Crossed2ModuleInstance,
                        h_fd: Optional[float] = None) -> np.ndarray:
    F = three_curvature_form(A, B, C, inst)
    if h_fd is not None:
        for part in F.parts:
            part.h_fd = float(h_fd)
    return F.components(m)


def fd_exterior_derivative(form: Form, x, h_fd: float = TUNING.h_fd) -> np.ndarray:
    """
    Exterior derivative by central differences of the components only:
        (d omega)_{i0..ip} = sum_a (-1)^a d_{ia} omega_{i0..^ia..ip}
    """
    x = np.asarray(x, dtype=float)
    d = form.dim
    p = form.degree
    vals = []
    for l in range(d):
        e = np.zeros(d)
        e[l] = h_fd
        vals.append((form.components(x + e) - form.components(x - e)) / (2 * h_fd))
    out = []
    for idx in combos(d, p + 1):
        acc = 0
        for a, ia in enumerate(idx):
            rest = idx[:a] + idx[a + 1:]
            sign, key = sort_sign(rest)
            acc = acc + (-1) ** a * sign * vals[ia][..., form.index[key], :, :]
        out.append(acc)
    if not out:
        return np.zeros(x.shape[:-1] + (0, form.n, form.n), dtype=complex)
    return np.stack(out, axis=-3)
