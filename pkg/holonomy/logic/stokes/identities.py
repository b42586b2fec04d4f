# holonomy/logic/stokes/identities.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from holonomy.errors import BranchError, ConfigError, MembershipError, NotCentral, PinError
from holonomy.logic.fields.forms import CurvatureForm, Form, TwoCurvatureForm
from holonomy.logic.fields.param_maps import ParamMap, path_of
from holonomy.logic.fields.validation import central_residual, parameter_grid, pinned_residual
from holonomy.logic.higher.catalog import as_crossed_module
from holonomy.logic.higher.crossed import Crossed2ModuleInstance
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.elements import GroupElement, log_map
from holonomy.logic.lie.groups import MatrixGroup
from holonomy.logic.lie.ordered_exp import integrate_sampled
from holonomy.logic.stokes.report import VerificationReport, policy_tolerance
from holonomy.logic.transport.holonomy import (
    Instance,
    cube_series,
    require_fake_2flat,
    require_fake_flat,
    sheet_integrals,
    surface_holonomy,
    volume_integrand,
)
from holonomy.logic.transport.lifts import (
    Origin,
    horizontal_lift_path,
    slice_map,
    standard_lift_cube,
    standard_lift_square,
    standard_lift_tesseract,
)
from holonomy.logic.transport.pullback import Frame, simpson, t_integral
from holonomy.logic.tuning import TUNING

logger = logging.getLogger(__name__)

Resolutions = Union[int, Sequence[int]]


# =========================================================
# Series evaluations and the tolerance policy
# =========================================================

@dataclass
class Evaluation:
    """Both sides of an identity as series over the outer parameter (N+1, n, n)."""

    lhs: np.ndarray
    rhs: np.ndarray
    group: MatrixGroup
    details: Dict[str, Any] = field(default_factory=dict)


def resolution_tuple(resolutions: Resolutions, arity: int) -> Tuple[int, ...]:
    if isinstance(resolutions, (int, np.integer)):
        ns = (int(resolutions),) * arity
    else:
        ns = tuple(int(n) for n in resolutions)
    if len(ns) != arity:
        raise ConfigError("resolutions", f"need {arity} resolutions, got {len(ns)}", key="resolutions")
    for n in ns:
        if n < 4 or n % 4:
            raise ConfigError("resolutions", f"{n} is not a positive multiple of 4", key="resolutions")
    return ns


def checkpoint_indices(n: int, checkpoints: Sequence[float] = TUNING.checkpoints) -> Dict[float, int]:
    """Checkpoints that fall on grid nodes."""
    out = {}
    for c in checkpoints:
        k = c * n
        if abs(k - round(k)) < 1e-9:
            out[float(c)] = int(round(k))
    return out


def _max_dist(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(lg.distance(a, b)))


def record_series(mats: np.ndarray, group: MatrixGroup,
                  coords: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> List[Any]:
    """
    Algebra coordinates of log(g) per node where the log is safe, else the raw matrix.
    `coords` maps the log matrix to coordinates (twisted ones for L); default group.coords.
    """
    to_coords = coords or group.coords
    out: List[Any] = []
    for m in np.asarray(mats):
        try:
            x = log_map(GroupElement(m, group)).matrix
            out.append([float(c) for c in np.real(to_coords(x))])
        except (BranchError, MembershipError):
            out.append(m)
    return out


def run_series_identity(identity: str, evaluate: Callable[[Tuple[int, ...]], Evaluation], ns: Tuple[int, ...],
                        multiplier: float = TUNING.tol_multiplier) -> VerificationReport:
    """
    Evaluate at ns and at ns/2. The residual is the worst side distance over the
    checkpoints; the measured error is the worst change of either side between
    the two resolutions on the checkpoints both grids carry.
    """
    full = evaluate(ns)
    half_ns = tuple(n // 2 for n in ns)
    half = evaluate(half_ns)

    n = ns[0]
    cps = checkpoint_indices(n)
    per_cp = {str(c): float(lg.distance(full.lhs[k], full.rhs[k])) for c, k in cps.items()}
    residual = max(per_cp.values())

    measured = 0.0
    for c, k in checkpoint_indices(half_ns[0]).items():
        kf = cps[c]
        measured = max(measured,
                       float(lg.distance(full.lhs[kf], half.lhs[k])),
                       float(lg.distance(full.rhs[kf], half.rhs[k])))

    details = {"checkpoints": per_cp}
    details.update(full.details)
    rep = VerificationReport(
        identity=identity,
        residual=residual,
        tolerance=policy_tolerance(measured, multiplier),
        measured_error=measured,
        resolutions=list(ns),
        sides={"lhs": full.lhs[-1], "rhs": full.rhs[-1]},
        details=details,
    )
    logger.debug("%s: residual %.3e tol %.3e (N=%s)", identity, rep.residual, rep.tolerance, ns)
    return rep


# =========================================================
# 2D
# =========================================================

def evaluate_stokes_2d(A: Form, sigma: ParamMap, g00: Origin, ns: Tuple[int, int],
                       scheme: str = "midpoint") -> Evaluation:
    """
    LHS(s) = g(s,1)^-1 U(s) g(0,1), U the transport along the top edge;
    RHS(s) = ordered exp over [0, s] of int_t Ad_{g^-1} F_A(d_s, d_t).
    """
    pin = pinned_residual(sigma, 1, 0.0)
    if pin > TUNING.eq_tol:
        raise PinError(pin)
    N_s, N_t = ns
    lift = standard_lift_square(A, sigma, g00, N_s, N_t, scheme)
    top, _ = horizontal_lift_path(A, path_of(sigma, 1, 1.0), A.group.identity(), N_s, scheme)
    g = lift.fibers
    lhs = lg.inv(g[:, -1]) @ top.fibers @ g[0, -1]

    frame = Frame.at(sigma, lift.param_grid())
    phi = t_integral(CurvatureForm(A), frame, [0, 1], lift.params[1], lg.inv(g), lg.conj)
    rhs = integrate_sampled(phi, 1.0 / N_s, scheme, cumulative=True)

    details: Dict[str, Any] = {"scheme": scheme}
    top_pin = pinned_residual(sigma, 1, 1.0)
    if top_pin <= TUNING.eq_tol:
        # both edges pinned: the lifted endpoints differ by the right-hand side
        details["endpoint"] = float(lg.distance(g[0, -1], g[-1, -1] @ rhs[-1]))
    return Evaluation(lhs=lhs, rhs=rhs, group=A.group, details=details)


def verify_stokes_2d(A: Form, sigma: ParamMap, g00: Origin, N: Resolutions = TUNING.n_2d,
                     scheme: str = "midpoint", multiplier: float = TUNING.tol_multiplier) -> VerificationReport:
    ns = resolution_tuple(N, 2)
    evaluate = lambda n: evaluate_stokes_2d(A, sigma, g00, n, scheme)  # noqa: E731
    return run_series_identity("stokes-2d", evaluate, ns, multiplier)


# =========================================================
# 3D
# =========================================================

def _peiffer(inst: Instance, use_instance: bool):
    if not use_instance:
        return None
    return as_crossed_module(inst).peiffer


def evaluate_stokes_3d(A: Form, B: Form, theta: ParamMap, g000: Origin, ns: Tuple[int, int, int],
                       inst: Instance, scheme: str = "midpoint", peiffer: bool = False,
                       center: bool = False) -> Evaluation:
    """
    LHS(r) = tra(Sigma_r)^-1 tra(Sigma_0); RHS(r) = ordered exp over [0, r] of -phi.
    With center=True the Ad-free integrand is the right side and the Ad route
    is kept in details for comparison.
    """
    require_fake_flat(A, B, inst, theta)
    N_r, N_s, N_t = ns
    lift = standard_lift_cube(A, theta, g000, N_r, N_s, N_t, scheme)
    series = cube_series(A, B, lift, inst, scheme, want_phi=True, peiffer=_peiffer(inst, peiffer))
    h = 1.0 / N_r
    H = as_crossed_module(inst).H

    lhs = lg.inv(series.tra) @ series.tra[0]
    rhs_ad = integrate_sampled(-series.phi, h, scheme, cumulative=True)
    details: Dict[str, Any] = {"scheme": scheme, "h_r(1)": record_series(series.tra, H)}

    # recorded h_r(1) against an independent surface holonomy of the slice
    slices = {}
    for c, k in checkpoint_indices(N_r).items():
        sl = slice_map(theta, 0, float(lift.params[0][k]))
        tra = surface_holonomy(A, B, sl, lift.fibers[k, 0, 0], N_s, N_t, inst, scheme, check=False)
        slices[str(c)] = float(lg.distance(series.tra[k], tra.matrix))
    details["slice_consistency"] = slices

    if not center:
        return Evaluation(lhs=lhs, rhs=rhs_ad, group=H, details=details)
    rhs_c = integrate_sampled(-series.phi_center, h, scheme, cumulative=True)
    details["routes"] = _max_dist(rhs_c, rhs_ad)
    return Evaluation(lhs=lhs, rhs=rhs_c, group=H, details=details)


def require_central(A: Form, B: Form, inst: Instance, theta: ParamMap, tol: float = TUNING.center_tol) -> float:
    """F_B sampled on the image of the validation grid must commute with the algebra of H."""
    cm = as_crossed_module(inst)
    pts = theta.evaluate(parameter_grid(theta.arity))
    fb = TwoCurvatureForm(A, B, cm.dalpha).components(pts)
    res = central_residual(fb, cm.H.basis)
    if res > tol:
        raise NotCentral(res, tol)
    return res


def verify_stokes_3d(A: Form, B: Form, theta: ParamMap, g000: Origin, resolutions: Resolutions,
                     inst: Instance, scheme: str = "midpoint",
                     multiplier: float = TUNING.tol_multiplier) -> VerificationReport:
    ns = resolution_tuple(resolutions, 3)
    evaluate = lambda n: evaluate_stokes_3d(A, B, theta, g000, n, inst, scheme)  # noqa: E731
    return run_series_identity("stokes-3d", evaluate, ns, multiplier)


def verify_stokes_center_variant(A: Form, B: Form, theta: ParamMap, g000: Origin, resolutions: Resolutions,
                                 inst: Instance, scheme: str = "midpoint",
                                 multiplier: float = TUNING.tol_multiplier) -> VerificationReport:
    """
    Ad-free right side. The residual is the worse of the side comparison and
    the agreement with the Ad route.
    """
    central = require_central(A, B, inst, theta)
    ns = resolution_tuple(resolutions, 3)
    evaluate = lambda n: evaluate_stokes_3d(A, B, theta, g000, n, inst, scheme, center=True)  # noqa: E731
    rep = run_series_identity("stokes-3d-center", evaluate, ns, multiplier)
    rep.residual = max(rep.residual, rep.details["routes"])
    rep.details["central_residual"] = central
    return rep


def verify_stokes_3d_peiffer(A: Form, B: Form, theta: ParamMap, g000: Origin, resolutions: Resolutions,
                             inst: Instance, scheme: str = "midpoint",
                             multiplier: float = TUNING.tol_multiplier) -> VerificationReport:
    """3D identity with the Peiffer commutator of the instance subtracted from F_B."""
    ns = resolution_tuple(resolutions, 3)
    evaluate = lambda n: evaluate_stokes_3d(A, B, theta, g000, n, inst, scheme, peiffer=True)  # noqa: E731
    return run_series_identity("stokes-3d-peiffer", evaluate, ns, multiplier)


# =========================================================
# Volumes
# =========================================================

def _require_c2m(inst: Instance, what: str) -> Crossed2ModuleInstance:
    if not isinstance(inst, Crossed2ModuleInstance):
        raise ConfigError(what, f"{inst.name} is not a crossed 2-module", key="instance")
    return inst


def evaluate_volume_delta(A: Form, B: Form, C: Form, theta: ParamMap, g000: Origin, ns: Tuple[int, int, int],
                          inst: Crossed2ModuleInstance, scheme: str = "midpoint") -> Evaluation:
    """delta of the running volume holonomy against tra(Sigma_r)^-1 tra(Sigma_0)."""
    require_fake_flat(A, B, inst, theta)
    require_fake_2flat(A, B, C, inst, theta)
    N_r, N_s, N_t = ns
    lift = standard_lift_cube(A, theta, g000, N_r, N_s, N_t, scheme)
    series = cube_series(A, B, lift, inst, scheme, C=C)
    l_run = integrate_sampled(series.volume, 1.0 / N_r, scheme, cumulative=True)
    return Evaluation(
        lhs=inst.delta(l_run),
        rhs=lg.inv(series.tra) @ series.tra[0],
        group=inst.H,
        details={"scheme": scheme, "volume": l_run[-1],
                 "volume_twisted": record_series(l_run[-1:], inst.L, inst.twisted_coords)[0]},
    )


def verify_volume_delta(A: Form, B: Form, C: Form, theta: ParamMap, g000: Origin, resolutions: Resolutions,
                        inst: Instance, scheme: str = "midpoint",
                        multiplier: float = TUNING.tol_multiplier) -> VerificationReport:
    inst = _require_c2m(inst, "volume-delta")
    ns = resolution_tuple(resolutions, 3)
    evaluate = lambda n: evaluate_volume_delta(A, B, C, theta, g000, n, inst, scheme)  # noqa: E731
    return run_series_identity("volume-delta", evaluate, ns, multiplier)


# =========================================================
# 4D
# =========================================================

def evaluate_stokes_4d(A: Form, B: Form, C: Form, T: ParamMap, g0000: Origin, ns: Tuple[int, int, int, int],
                       inst: Crossed2ModuleInstance, scheme: str = "midpoint") -> Evaluation:
    """
    LHS(q) = V_q^-1 V_0 with V_q the volume holonomy of the q-slice;
    RHS(q) = ordered exp over [0, q] of
        int_r Ad_{l_q(r)^-1} int_s h_{q,r}(s)^-1 acting on int_t (F_C - {B ^ B}) ds dr
    evaluated one (s, t) sheet at a time.
    """
    require_fake_flat(A, B, inst, T)
    require_fake_2flat(A, B, C, inst, T)
    N_q, N_r = ns[0], ns[1]
    lift = standard_lift_tesseract(A, T, g0000, ns, scheme)
    grid = lift.param_grid()
    r_nodes, s_nodes, t_nodes = lift.params[1], lift.params[2], lift.params[3]

    V, psi, consistency = [], [], 0.0
    for iq in range(N_q + 1):
        vol_r, w_r = [], []
        for ir in range(N_r + 1):
            sl = sheet_integrals(A, B, inst, T, grid[iq, ir], lift.fibers[iq, ir], s_nodes, t_nodes, scheme,
                                 C=C, want_fb=(iq == 0), want_w=True)
            vol_r.append(volume_integrand(sl, inst, s_nodes))
            w_r.append(simpson(inst.prime_alg(lg.inv(sl.h_run), sl.w), s_nodes, axis=-3))
            if iq == 0:
                # delta({e, f} - c) = <e, f> - int_t F_B per s-node
                d = inst.ddelta(inst.lift(sl.e, sl.f) - sl.c) - (inst.peiffer(sl.e, sl.f) - sl.fb)
                consistency = max(consistency, float(np.max(np.linalg.norm(d, axis=(-2, -1)))))
        l_run = integrate_sampled(np.stack(vol_r), 1.0 / N_r, scheme, cumulative=True)
        V.append(l_run[-1])
        psi.append(simpson(lg.inv(l_run) @ np.stack(w_r) @ l_run, r_nodes, axis=-3))
        logger.debug("stokes-4d: q-slice %d/%d done", iq, N_q)

    V = np.stack(V)
    rhs = integrate_sampled(np.stack(psi), 1.0 / N_q, scheme, cumulative=True)
    details = {"scheme": scheme, "l_q(1)": record_series(V, inst.L, inst.twisted_coords),
               "integrand_consistency": consistency}
    return Evaluation(lhs=lg.inv(V) @ V[0], rhs=rhs, group=inst.L, details=details)


def verify_stokes_4d(A: Form, B: Form, C: Form, T: ParamMap, g0000: Origin, resolutions: Resolutions,
                     inst: Instance, scheme: str = "midpoint",
                     multiplier: float = TUNING.tol_multiplier) -> VerificationReport:
    inst = _require_c2m(inst, "stokes-4d")
    ns = resolution_tuple(resolutions, 4)
    evaluate = lambda n: evaluate_stokes_4d(A, B, C, T, g0000, n, inst, scheme)  # noqa: E731
    return run_series_identity("stokes-4d", evaluate, ns, multiplier)


__all__ = [
    "Evaluation",
    "resolution_tuple",
    "checkpoint_indices",
    "record_series",
    "run_series_identity",
    "evaluate_stokes_2d",
    "verify_stokes_2d",
    "evaluate_stokes_3d",
    "require_central",
    "verify_stokes_3d",
    "verify_stokes_center_variant",
    "verify_stokes_3d_peiffer",
    "evaluate_volume_delta",
    "verify_volume_delta",
    "evaluate_stokes_4d",
    "verify_stokes_4d",
]
