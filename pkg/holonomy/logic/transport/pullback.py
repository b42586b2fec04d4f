# holonomy/logic/transport/pullback.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.integrate

from holonomy.logic.fields.calculus import contract, jacobian
from holonomy.logic.fields.forms import Form
from holonomy.logic.fields.param_maps import ParamMap


@dataclass(frozen=True, eq=False)
class Frame:
    """Base points and Jacobians of a parameter map at a batch of parameter points."""

    u: np.ndarray  # (..., k)
    x: np.ndarray  # (..., d)
    jac: np.ndarray  # (..., d, k)

    @classmethod
    def at(cls, pmap: ParamMap, u) -> "Frame":
        u = np.asarray(u, dtype=float)
        return cls(u=u, x=pmap.evaluate(u), jac=jacobian(pmap, u))


def pull(form: Form, frame: Frame, cols: Sequence[int], ginv: Optional[np.ndarray] = None,
         act: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None) -> np.ndarray:
    """
    form(dSigma e_c1, ..., dSigma e_cp) at every frame point; with fibers, the
    equivariant reduction act(g^-1, .) gives the pullback along the lift.
    """
    vals = contract(form.components(frame.x), frame.jac, cols, form.dim)
    if ginv is not None:
        vals = act(ginv, vals)
    return vals


def pull_connection(A: Form, pmap: ParamMap, u, col: int) -> np.ndarray:
    """A(d Sigma / d u_col) at the parameter points u."""
    return pull(A, Frame.at(pmap, u), [col])


def simpson(values: np.ndarray, x: np.ndarray, axis: int) -> np.ndarray:
    """Composite Simpson of complex samples along one axis."""
    re = scipy.integrate.simpson(values.real, x=x, axis=axis)
    im = scipy.integrate.simpson(values.imag, x=x, axis=axis)
    return re + 1j * im


def t_integral(form: Form, frame: Frame, cols: Sequence[int], t_nodes: np.ndarray,
               ginv: Optional[np.ndarray] = None, act=None) -> np.ndarray:
    """Integral over the last parameter axis of the pulled-back form: (..., N_t+1, ...) -> (...)."""
    vals = pull(form, frame, cols, ginv, act)
    return simpson(vals, t_nodes, axis=-3)


__all__ = ["Frame", "pull", "pull_connection", "simpson", "t_integral"]
