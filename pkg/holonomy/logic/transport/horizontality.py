# holonomy/logic/transport/horizontality.py
from __future__ import annotations

from typing import Dict, Optional

import numpy as np

from holonomy.logic.fields.forms import CurvatureForm, Form
from holonomy.logic.lie import groups as lg
from holonomy.logic.stokes.report import VerificationReport
from holonomy.logic.transport.lifts import LiftGrid
from holonomy.logic.transport.pullback import Frame, pull
from holonomy.logic.tuning import TUNING


def connection_values(A: Form, frame: Frame, fibers: np.ndarray, axis: int,
                      params: np.ndarray, pos: int) -> np.ndarray:
    """
    omega(d lift / d u_axis) = Ad_{g^-1}(A(d Sigma) + (dg) g^-1) on the grid,
    dg by second-order differences along grid position `pos`.
    """
    dg = np.gradient(fibers, params, axis=pos, edge_order=2)
    ginv = lg.inv(fibers)
    base = pull(A, frame, [axis])
    return ginv @ (base + dg @ ginv) @ fibers


def check_lift_horizontality(A: Form, lift: LiftGrid, direction: int, tol: float = TUNING.horizontality_tol,
                             family: Optional[Dict[int, int]] = None) -> VerificationReport:
    """
    Lines along `direction` must be horizontal; across every other free axis i
    the criterion d_dir omega(d_i) = -Ad_{g^-1} F_A(d_i, d_dir) must hold.

    family fixes some axes at node indices, e.g. {2: 0} for the s-lines at t = 0
    of a cube lift.
    """
    family = dict(family or {})
    if lift.source is None:
        raise ValueError("horizontality needs the lift's parameter map")
    index = tuple(family.get(a, slice(None)) for a in range(lift.arity))
    free = [a for a in range(lift.arity) if a not in family]
    if direction not in free:
        raise ValueError("direction must be a free axis")
    pos = {a: i for i, a in enumerate(free)}

    u = lift.param_grid()[index]
    fibers = lift.fibers[index]
    frame = Frame.at(lift.source, u)

    omega_dir = connection_values(A, frame, fibers, direction, lift.params[direction], pos[direction])
    horizontal = float(np.max(np.linalg.norm(omega_dir, axis=(-2, -1)))) if omega_dir.size else 0.0

    criterion: Dict[str, float] = {}
    if len(free) > 1:
        F = CurvatureForm(A)
        ginv = lg.inv(fibers)
        for i in free:
            if i == direction:
                continue
            omega_i = connection_values(A, frame, fibers, i, lift.params[i], pos[i])
            d_omega = np.gradient(omega_i, lift.params[direction], axis=pos[direction], edge_order=2)
            curv = ginv @ pull(F, frame, [i, direction]) @ fibers
            criterion[str(i)] = float(np.max(np.linalg.norm(d_omega + curv, axis=(-2, -1))))

    residual = max([horizontal] + list(criterion.values()))
    return VerificationReport(
        identity="horizontality",
        residual=residual,
        tolerance=float(tol),
        details={
            "provenance": lift.provenance,
            "direction": int(direction),
            "family": {str(k): int(v) for k, v in family.items()},
            "horizontal": horizontal,
            "criterion": criterion,
        },
    )


__all__ = ["check_lift_horizontality", "connection_values"]
