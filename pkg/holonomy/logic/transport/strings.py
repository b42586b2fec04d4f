# holonomy/logic/transport/strings.py
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from holonomy.errors import StartMismatch
from holonomy.logic.fields.forms import Form
from holonomy.logic.fields.param_maps import ParamMap
from holonomy.logic.higher.catalog import as_crossed_module
from holonomy.logic.higher.semidirect import SemidirectElement
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.elements import GroupElement
from holonomy.logic.transport.holonomy import Instance, require_fake_flat, surface_holonomy_from_lift
from holonomy.logic.transport.horizontality import check_lift_horizontality
from holonomy.logic.transport.lifts import LiftGrid, standard_lift_square
from holonomy.logic.tuning import TUNING

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StringFiberPoint:
    """A lifted path together with an element of H."""

    lift: LiftGrid
    h: GroupElement


def _require_start(A: Form, sigma: ParamMap, start: StringFiberPoint, N_t: int, check: bool) -> None:
    lift = start.lift
    if lift.arity != 1:
        raise StartMismatch("start lift must be a path", float(lift.arity))
    if lift.shape[0] != N_t + 1:
        raise StartMismatch("start lift resolution differs from N_t", float(abs(lift.shape[0] - N_t - 1)))

    u = np.stack([np.zeros_like(lift.params[0]), lift.params[0]], axis=-1)
    gap = float(np.max(np.linalg.norm(lift.points - sigma.evaluate(u), axis=-1)))
    if gap > TUNING.field_tol:
        raise StartMismatch("start lift does not project onto Sigma(0, .)", gap)

    if check and lift.source is not None:
        rep = check_lift_horizontality(A, lift, 0)
        if not rep.passed:
            raise StartMismatch("start lift is not horizontal", rep.residual)


def transport_string(A: Form, B: Form, sigma: ParamMap, start: StringFiberPoint, resolutions: Sequence[int],
                     inst: Instance, scheme: str = "midpoint", check: bool = True) -> StringFiberPoint:
    """
    Parallel transport of the string start.lift across sigma: the standard lift
    grown from start.lift's first fiber ends on the lifted path sigma(1, .), and
    h(1) = tra(sigma) h0.
    """
    N_s, N_t = (int(n) for n in resolutions)
    _require_start(A, sigma, start, N_t, check)
    if check:
        require_fake_flat(A, B, inst, sigma)

    lift = standard_lift_square(A, sigma, start.lift.fibers[0], N_s, N_t, scheme)
    tra = surface_holonomy_from_lift(B, lift, inst, scheme)
    H = as_crossed_module(inst).H
    return StringFiberPoint(lift=lift.restrict(0, lift.shape[0] - 1), h=GroupElement(tra @ start.h.matrix, H))


def act_string(point: StringFiberPoint, a: SemidirectElement, inst: Instance) -> StringFiberPoint:
    """Right action of (g, h) in G x_alpha H: (lift, h0) -> (lift g, alpha_{g^-1}(h0) h)."""
    cm = as_crossed_module(inst)
    g = a.g.matrix
    h = cm.alpha(lg.inv(g), point.h.matrix) @ a.h.matrix
    return StringFiberPoint(lift=point.lift.right_translate(g), h=GroupElement(h, cm.H))


def string_distance(a: StringFiberPoint, b: StringFiberPoint) -> float:
    """Worst fiber distance along the lifts, or the H distance, whichever is larger."""
    return max(a.lift.max_distance(b.lift), float(lg.distance(a.h.matrix, b.h.matrix)))


__all__ = ["StringFiberPoint", "transport_string", "act_string", "string_distance"]
