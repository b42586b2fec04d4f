# holonomy/logic/transport/holonomy.py
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from holonomy.errors import ConstraintError, NotABigon
from holonomy.logic.fields.forms import Form, ThreeCurvatureForm, TwoCurvatureForm
from holonomy.logic.fields.param_maps import ParamMap
from holonomy.logic.fields.validation import (
    check_fake_2curvature,
    check_fake_curvature,
    parameter_grid,
    pinned_residual,
)
from holonomy.logic.higher.catalog import as_crossed_module
from holonomy.logic.higher.crossed import Crossed2ModuleInstance, CrossedModuleInstance
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.elements import GroupElement
from holonomy.logic.lie.ordered_exp import integrate_sampled
from holonomy.logic.transport.lifts import LiftGrid, Origin, section_lift_square, standard_lift_cube, standard_lift_square
from holonomy.logic.transport.pullback import Frame, simpson, t_integral
from holonomy.logic.tuning import TUNING

logger = logging.getLogger(__name__)

Instance = Union[CrossedModuleInstance, Crossed2ModuleInstance]


# =========================================================
# Preconditions
# =========================================================

def require_fake_flat(A: Form, B: Form, inst: Instance, pmap: ParamMap, tol: float = TUNING.field_tol) -> None:
    """dtau(B) = F_A on the image of the validation grid, else ConstraintError."""
    pts = pmap.evaluate(parameter_grid(pmap.arity))
    rep = check_fake_curvature(A, B, as_crossed_module(inst), pts, tol)
    if not rep.passed:
        raise ConstraintError("fake-curvature", rep.residual, tol)


def require_fake_2flat(A: Form, B: Form, C: Form, inst: Crossed2ModuleInstance, pmap: ParamMap,
                       tol: float = TUNING.field_tol) -> None:
    pts = pmap.evaluate(parameter_grid(pmap.arity))
    rep = check_fake_2curvature(A, B, C, inst, pts, tol)
    if not rep.passed:
        raise ConstraintError("fake-2curvature", rep.residual, tol)


# =========================================================
# Surfaces
# =========================================================

def surface_integrand(B: Form, lift: LiftGrid, inst: Instance) -> np.ndarray:
    """f(s) = integral over t of the pulled-back B(d_s, d_t), one value per s-node."""
    cm = as_crossed_module(inst)
    frame = Frame.at(lift.source, lift.param_grid())
    ginv = lg.inv(lift.fibers)
    return t_integral(B, frame, [0, 1], lift.params[1], ginv, cm.alpha_alg)


def surface_holonomy_from_lift(B: Form, lift: LiftGrid, inst: Instance, scheme: str = "midpoint") -> np.ndarray:
    f = surface_integrand(B, lift, inst)
    h = float(lift.params[0][1] - lift.params[0][0])
    return integrate_sampled(f, h, scheme)


def surface_holonomy(A: Form, B: Form, sigma: ParamMap, g00: Origin, N_s: int, N_t: int, inst: Instance,
                     scheme: str = "midpoint", check: bool = True) -> GroupElement:
    """tra(Sigma): ordered exponential over s of the t-integrated B along the standard lift."""
    if check:
        require_fake_flat(A, B, inst, sigma)
    lift = standard_lift_square(A, sigma, g00, N_s, N_t, scheme)
    return GroupElement(surface_holonomy_from_lift(B, lift, inst, scheme), as_crossed_module(inst).H)


def require_bigon(sigma: ParamMap, tol: float = TUNING.eq_tol) -> None:
    for value in (0.0, 1.0):
        res = pinned_residual(sigma, 1, value)
        if res > tol:
            raise NotABigon(f"t={int(value)}", res)


def surface_holonomy_local(A: Form, B: Form, sigma: ParamMap, N_s: int, N_t: int, inst: Instance,
                           scheme: str = "midpoint", check: bool = True) -> GroupElement:
    """
    Section-based route for pinned bigons: every t-line is lifted from
    (Sigma(s, 0), e) and B enters through alpha_{g_s(t)^-1}.
    """
    require_bigon(sigma)
    if check:
        require_fake_flat(A, B, inst, sigma)
    lift = section_lift_square(A, sigma, N_s, N_t, scheme)
    return GroupElement(surface_holonomy_from_lift(B, lift, inst, scheme), as_crossed_module(inst).H)


# =========================================================
# Cubes
# =========================================================

@dataclass
class SliceIntegrals:
    """t-integrated pullbacks on one (s, t) sheet, one value per s-node."""

    e: np.ndarray  # B(d_r, d_t)
    f: np.ndarray  # B(d_s, d_t)
    h_run: np.ndarray  # running surface holonomy h(s)
    c: Optional[np.ndarray] = None  # C(d_r, d_s, d_t)
    fb: Optional[np.ndarray] = None  # F_B(d_r, d_s, d_t)
    w: Optional[np.ndarray] = None  # (F_C - {B ^ B})(d_q, d_r, d_s, d_t)


def sheet_integrals(A: Form, B: Form, inst: Instance, pmap: ParamMap, u: np.ndarray, fibers: np.ndarray,
                    s_nodes: np.ndarray, t_nodes: np.ndarray, scheme: str, C: Optional[Form] = None,
                    want_fb: bool = False, want_w: bool = False) -> SliceIntegrals:
    """
    u: (N_s+1, N_t+1, k) parameter points of one sheet, the last three axes of the
    map being (r, s, t); fibers: the lift on the same sheet.
    """
    k = pmap.arity
    r, s, t = k - 3, k - 2, k - 1
    cm = as_crossed_module(inst)
    frame = Frame.at(pmap, u)
    ginv = lg.inv(fibers)

    e = t_integral(B, frame, [r, t], t_nodes, ginv, cm.alpha_alg)
    f = t_integral(B, frame, [s, t], t_nodes, ginv, cm.alpha_alg)
    h_run = integrate_sampled(f, float(s_nodes[1] - s_nodes[0]), scheme, cumulative=True)
    out = SliceIntegrals(e=e, f=f, h_run=h_run)
    if C is not None:
        out.c = t_integral(C, frame, [r, s, t], t_nodes, ginv, inst.act_L_alg)
    if want_fb:
        out.fb = t_integral(TwoCurvatureForm(A, B, cm.dalpha), frame, [r, s, t], t_nodes, ginv, cm.alpha_alg)
    if want_w:
        W = ThreeCurvatureForm(A, C, inst.dact_L)
        out.w = t_integral(W, frame, [0, 1, 2, 3], t_nodes, ginv, inst.act_L_alg)
    return out


def volume_integrand(sl: SliceIntegrals, inst: Crossed2ModuleInstance, s_nodes: np.ndarray) -> np.ndarray:
    """integral over s of h(s)^-1 acting on ({e, f} - c)"""
    x = inst.lift(sl.e, sl.f) - sl.c
    return simpson(inst.prime_alg(lg.inv(sl.h_run), x), s_nodes, axis=-3)


@dataclass
class CubeSeries:
    tra: np.ndarray  # (N_r+1, m, m) surface holonomy of every r-slice
    volume: Optional[np.ndarray] = None  # (N_r+1, l, l) volume integrand per r-node
    phi: Optional[np.ndarray] = None  # (N_r+1, m, m) 3D right-hand integrand per r-node
    phi_center: Optional[np.ndarray] = None  # the same without the Ad factor


def cube_series(A: Form, B: Form, lift: LiftGrid, inst: Instance, scheme: str, C: Optional[Form] = None,
                want_phi: bool = False, peiffer=None) -> CubeSeries:
    """
    Sweep the r-slices of a cube lift. phi(r) is
        int_s Ad_{h(s)^-1} (int_t F_B - <e, f>) ds
    and phi_center the same integral without Ad; peiffer=None means <-,-> = 0.
    """
    s_nodes, t_nodes = lift.params[1], lift.params[2]
    tra, vol, phi, phi_c = [], [], [], []
    grid = lift.param_grid()
    for i in range(lift.shape[0]):
        sl = sheet_integrals(A, B, inst, lift.source, grid[i], lift.fibers[i], s_nodes, t_nodes, scheme,
                             C=C, want_fb=want_phi)
        tra.append(sl.h_run[-1])
        if C is not None:
            vol.append(volume_integrand(sl, inst, s_nodes))
        if want_phi:
            x = sl.fb if peiffer is None else sl.fb - peiffer(sl.e, sl.f)
            phi_c.append(simpson(x, s_nodes, axis=-3))
            phi.append(simpson(lg.inv(sl.h_run) @ x @ sl.h_run, s_nodes, axis=-3))
    return CubeSeries(
        tra=np.stack(tra),
        volume=np.stack(vol) if vol else None,
        phi=np.stack(phi) if phi else None,
        phi_center=np.stack(phi_c) if phi_c else None,
    )


@dataclass(frozen=True, eq=False)
class CubeTransport:
    lift: LiftGrid  # standard lift of the whole cube
    volume: GroupElement  # tra(Theta) in L
    bottom: GroupElement  # tra(Sigma_0) in H
    top: GroupElement  # tra(Sigma_1) in H

    @property
    def end_lift(self) -> LiftGrid:
        """The lifted end square Theta(1, ., .)."""
        return self.lift.restrict(0, self.lift.shape[0] - 1)


def _cube_checks(A, B, C, theta, inst, check):
    if not check:
        return
    require_fake_flat(A, B, inst, theta)
    require_fake_2flat(A, B, C, inst, theta)


def cube_transport(A: Form, B: Form, C: Form, theta: ParamMap, g000: Origin, resolutions: Sequence[int],
                   inst: Crossed2ModuleInstance, scheme: str = "midpoint", check: bool = True) -> CubeTransport:
    """Volume holonomy together with the lifted end square and both end surface holonomies."""
    _cube_checks(A, B, C, theta, inst, check)
    n_r, n_s, n_t = (int(n) for n in resolutions)
    lift = standard_lift_cube(A, theta, g000, n_r, n_s, n_t, scheme, validate=check)
    series = cube_series(A, B, lift, inst, scheme, C=C)
    V = integrate_sampled(series.volume, float(lift.params[0][1] - lift.params[0][0]), scheme)
    return CubeTransport(
        lift=lift,
        volume=GroupElement(V, inst.L),
        bottom=GroupElement(series.tra[0], inst.H),
        top=GroupElement(series.tra[-1], inst.H),
    )


def volume_holonomy(A: Form, B: Form, C: Form, theta: ParamMap, g000: Origin, resolutions: Sequence[int],
                    inst: Crossed2ModuleInstance, scheme: str = "midpoint", check: bool = True) -> GroupElement:
    """
    tra(Theta) = ordered exponential over r of
        int_s h_r(s)^-1 acting on ({int_t B_rt, int_t B_st} - int_t C_rst) ds
    """
    return cube_transport(A, B, C, theta, g000, resolutions, inst, scheme, check).volume


__all__ = [
    "require_fake_flat",
    "require_fake_2flat",
    "require_bigon",
    "surface_integrand",
    "surface_holonomy_from_lift",
    "surface_holonomy",
    "surface_holonomy_local",
    "SliceIntegrals",
    "sheet_integrals",
    "volume_integrand",
    "CubeSeries",
    "cube_series",
    "CubeTransport",
    "cube_transport",
    "volume_holonomy",
]
