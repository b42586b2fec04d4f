# holonomy/logic/fields/validation.py
from __future__ import annotations

import logging
from typing import Dict, Sequence

import numpy as np

from holonomy.logic.fields.calculus import jacobian
from holonomy.logic.fields.forms import CurvatureForm, Form, TwoCurvatureForm
from holonomy.logic.fields.param_maps import ParamMap
from holonomy.logic.higher.crossed import CrossedModuleInstance, Crossed2ModuleInstance
from holonomy.logic.lie import groups as lg
from holonomy.logic.stokes.report import VerificationReport
from holonomy.logic.tuning import TUNING

logger = logging.getLogger(__name__)


def parameter_grid(arity: int, points: int = TUNING.grid_points) -> np.ndarray:
    """(points^arity, arity) uniform grid on [0,1]^arity including the faces."""
    axis = np.linspace(0.0, 1.0, int(points))
    mesh = np.meshgrid(*([axis] * int(arity)), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _max_norm(x: np.ndarray) -> float:
    if x.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(x, axis=(-2, -1))))


# =========================================================
# Fake curvature conditions
# =========================================================

def check_fake_curvature(A: Form, B: Form, inst: CrossedModuleInstance, grid: np.ndarray,
                         tol: float = TUNING.field_tol) -> VerificationReport:
    """max over the grid of |dtau(B_ij) - (F_A)_ij|"""
    grid = np.asarray(grid, dtype=float)
    fa = CurvatureForm(A).components(grid)
    tb = inst.dtau(B.components(grid))
    res = _max_norm(tb - fa)
    return VerificationReport(identity="fake-curvature", residual=res, tolerance=float(tol),
                              details={"instance": inst.name, "grid_points": int(grid.shape[0])})


def check_fake_2curvature(A: Form, B: Form, C: Form, inst: Crossed2ModuleInstance, grid: np.ndarray,
                          tol: float = TUNING.field_tol) -> VerificationReport:
    """max over the grid of |ddelta(C_ijk) - (F_B)_ijk|"""
    grid = np.asarray(grid, dtype=float)
    fb = TwoCurvatureForm(A, B, inst.dact_H).components(grid)
    dc = inst.ddelta(C.components(grid))
    res = _max_norm(dc - fb)
    return VerificationReport(identity="fake-2curvature", residual=res, tolerance=float(tol),
                              details={"instance": inst.name, "grid_points": int(grid.shape[0])})


def central_residual(values: np.ndarray, basis: np.ndarray) -> float:
    """
    max_a |[v, e_a]| / max(1, |v|) over the values; zero iff every value
    commutes with the whole algebra.
    """
    values = np.asarray(values, dtype=complex)
    if values.size == 0 or basis.shape[0] == 0:
        return 0.0
    worst = 0.0
    scale = max(1.0, _max_norm(values))
    for e in basis:
        worst = max(worst, _max_norm(lg.commutator(values, e)))
    return worst / scale


# =========================================================
# Thinness and cube / tesseract structure
# =========================================================

def _rank_profile(j: np.ndarray, rank_tol: float) -> np.ndarray:
    """Singular values (..., min(d,k)) normalized by the largest singular value seen."""
    sv = np.linalg.svd(j, compute_uv=False)
    top = float(np.max(sv)) if sv.size else 0.0
    if top <= 0.0:
        return np.zeros_like(sv)
    return sv / top


def thinness_rank(pmap: ParamMap, grid: np.ndarray, rank_tol: float = TUNING.rank_tol,
                  cols: Sequence[int] = None) -> int:
    """Largest Jacobian rank over the grid, counting sigma > rank_tol * sigma_max."""
    j = jacobian(pmap, grid)
    if cols is not None:
        j = j[..., list(cols)]
    sv = _rank_profile(j, rank_tol)
    if sv.size == 0:
        return 0
    return int(np.max(np.sum(sv > rank_tol, axis=-1)))


def _face_excess(pmap: ParamMap, grid: np.ndarray, cols: Sequence[int], allowed: int,
                 rank_tol: float) -> tuple:
    j = jacobian(pmap, grid)[..., list(cols)]
    sv = _rank_profile(j, rank_tol)
    rank = int(np.max(np.sum(sv > rank_tol, axis=-1))) if sv.size else 0
    excess = float(np.max(sv[..., allowed])) if sv.shape[-1] > allowed else 0.0
    return rank, excess


def _face_grid(arity: int, fixed: Dict[int, float], points: int) -> np.ndarray:
    free = [a for a in range(arity) if a not in fixed]
    g = parameter_grid(len(free), points)
    out = np.zeros((g.shape[0], arity))
    for col, a in enumerate(free):
        out[:, a] = g[:, col]
    for a, v in fixed.items():
        out[:, a] = v
    return out


def validate_cube(theta: ParamMap, points: int = TUNING.grid_points,
                  rank_tol: float = TUNING.rank_tol) -> VerificationReport:
    """
    Faces Theta(r, s, i) and Theta(r, i, t), i in {0, 1}, must be thin (rank <= 1).

    residual = largest normalized second singular value on those faces divided by
    rank_tol, so the verdict passes at residual <= 1.
    """
    faces = {}
    worst = 0.0
    for axis, label in ((2, "t"), (1, "s")):
        for i in (0.0, 1.0):
            grid = _face_grid(3, {axis: i}, points)
            cols = [c for c in range(3) if c != axis]
            rank, excess = _face_excess(theta, grid, cols, 1, rank_tol)
            name = f"{label}={int(i)}"
            faces[name] = {"rank": rank, "excess": excess}
            worst = max(worst, excess / rank_tol)
    failed = [k for k, v in faces.items() if v["rank"] > 1]
    return VerificationReport(identity="cube-valid", residual=worst, tolerance=1.0,
                              details={"faces": faces, "failed": failed})


def validate_tesseract(T: ParamMap, points: int = TUNING.grid_points, rank_tol: float = TUNING.rank_tol,
                       eq_tol: float = TUNING.eq_tol) -> VerificationReport:
    """
    (a) T(q, r, s, i) and (b) T(q, r, i, t) independent of q within eq_tol;
    (c) T(q, i, s, t) thin as a homotopy of squares (rank <= 2).

    residual = max(displacement / eq_tol, excess singular value / rank_tol);
    the verdict passes at residual <= 1.
    """
    faces = {}
    worst = 0.0
    for axis, label in ((3, "t"), (2, "s")):
        for i in (0.0, 1.0):
            grid = _face_grid(4, {axis: i}, points)
            ref = grid.copy()
            ref[:, 0] = 0.0
            disp = float(np.max(np.linalg.norm(T.evaluate(grid) - T.evaluate(ref), axis=-1)))
            name = f"{label}={int(i)}"
            faces[name] = {"displacement": disp}
            worst = max(worst, disp / eq_tol)
    for i in (0.0, 1.0):
        grid = _face_grid(4, {1: i}, points)
        rank, excess = _face_excess(T, grid, [0, 2, 3], 2, rank_tol)
        name = f"r={int(i)}"
        faces[name] = {"rank": rank, "excess": excess}
        worst = max(worst, excess / rank_tol)
    failed = [k for k, v in faces.items()
              if v.get("displacement", 0.0) > eq_tol or v.get("rank", 0) > 2]
    return VerificationReport(identity="tesseract-valid", residual=worst, tolerance=1.0,
                              details={"faces": faces, "failed": failed})


def first_failure(report: VerificationReport) -> tuple:
    """(face, value) of the first failed face, for error messages."""
    for name in report.details.get("failed", []):
        f = report.details["faces"][name]
        return name, float(f.get("displacement", f.get("rank", 0)))
    return "", 0.0


def pinned_residual(pmap: ParamMap, axis: int, value: float, points: int = 33) -> float:
    """max distance of the line u_axis = value from its own first point."""
    u = np.zeros((points, pmap.arity))
    u[:, 1 - axis] = np.linspace(0.0, 1.0, points)
    u[:, axis] = value
    x = pmap.evaluate(u)
    return float(np.max(np.linalg.norm(x - x[0], axis=-1)))


__all__ = [
    "parameter_grid",
    "check_fake_curvature",
    "check_fake_2curvature",
    "central_residual",
    "thinness_rank",
    "validate_cube",
    "validate_tesseract",
    "first_failure",
    "pinned_residual",
]
