# holonomy/logic/lie/ordered_exp.py
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from holonomy.errors import ConfigError, EvalError
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.elements import AlgebraElement, GroupElement
from holonomy.logic.lie.groups import MatrixGroup

SCHEMES = ("midpoint", "cf4")

# Gauss nodes / weights of the commutator-free order-4 scheme
_C1 = 0.5 - math.sqrt(3.0) / 6.0
_C2 = 0.5 + math.sqrt(3.0) / 6.0
_A1 = 0.25 - math.sqrt(3.0) / 6.0
_A2 = 0.25 + math.sqrt(3.0) / 6.0


@dataclass(frozen=True)
class OrderedExpConfig:
    steps: int
    scheme: str = "midpoint"

    def __post_init__(self):
        if int(self.steps) < 1:
            raise ConfigError("ordered_exp", "steps must be >= 1", key="steps")
        if self.scheme not in SCHEMES:
            raise ConfigError("ordered_exp", f"unknown scheme {self.scheme!r}", key="scheme")


Integrand = Callable[[float], np.ndarray]


def _call(f: Integrand, t: float) -> np.ndarray:
    try:
        v = f(t)
    except EvalError:
        raise
    except Exception as e:
        raise EvalError("integrand", f"{type(e).__name__}: {e}", point=t)
    v = v.matrix if isinstance(v, AlgebraElement) else np.asarray(v, dtype=complex)
    if not np.all(np.isfinite(v)):
        raise EvalError("integrand", "non-finite value", point=t)
    return v


def integrate_callable(f: Integrand, steps: int, scheme: str = "midpoint",
                       t0: float = 0.0, t1: float = 1.0, cumulative: bool = False) -> np.ndarray:
    """
    Solve g' = f(t) g, g(t0) = e on a uniform grid.

    f may return a batch (..., n, n); every batch member is integrated
    independently. With cumulative=True the node values (steps+1, ..., n, n)
    are returned, otherwise g(t1).
    """
    h = (t1 - t0) / steps
    g = None
    out = []
    for k in range(steps):
        t = t0 + k * h
        if scheme == "midpoint":
            step = lg.expm(h * _call(f, t + 0.5 * h))
        else:
            a1 = _call(f, t + _C1 * h)
            a2 = _call(f, t + _C2 * h)
            step = lg.expm(h * (_A1 * a1 + _A2 * a2)) @ lg.expm(h * (_A2 * a1 + _A1 * a2))
        if g is None:
            if cumulative:
                out.append(np.broadcast_to(np.eye(step.shape[-1]), step.shape).astype(complex))
            g = step
        else:
            g = step @ g
        if cumulative:
            out.append(g)
    if cumulative:
        return np.stack(out)
    return g


def _gauss_half_step(f0: np.ndarray, fm: np.ndarray, f1: np.ndarray, h: float) -> np.ndarray:
    """Magnus exponent over the first of two steps from samples at 0, h, 2h."""

    def interp(x):
        return 0.5 * (x - 1) * (x - 2) * f0 - x * (x - 2) * fm + 0.5 * x * (x - 1) * f1

    a1 = interp(_C1)
    a2 = interp(_C2)
    return 0.5 * h * (a1 + a2) - math.sqrt(3.0) / 12.0 * h * h * lg.commutator(a1, a2)


def integrate_sampled(values: np.ndarray, h: float, scheme: str = "midpoint",
                      cumulative: bool = False) -> np.ndarray:
    """
    Ordered exponential of an integrand known only at grid nodes.

    values: (N+1, ..., n, n) along axis 0 with spacing h.
    midpoint: exp(h (f_k + f_{k+1}) / 2) per step.
    cf4: two-step Magnus update H/6 (f_0 + 4 f_1 + f_2) - H^2/12 [f_0, f_2], H = 2h;
    needs even N. Cumulative odd nodes come from a two-point Gauss-Magnus half
    step on the quadratic through the surrounding three samples.
    """
    values = np.asarray(values, dtype=complex)
    steps = values.shape[0] - 1
    n = values.shape[-1]
    eye = np.broadcast_to(np.eye(n), values.shape[1:]).astype(complex)
    if steps == 0:
        return eye[None] if cumulative else eye

    if scheme == "cf4":
        if steps % 2:
            raise ConfigError("ordered_exp", "cf4 on sampled data needs an even number of steps", key="steps")
        big = 2.0 * h
        f0 = values[0:-1:2]
        fm = values[1::2]
        f1 = values[2::2]
        omega = big / 6.0 * (f0 + 4.0 * fm + f1) - big * big / 12.0 * lg.commutator(f0, f1)
        factors = lg.expm(omega)
        if cumulative:
            halves = lg.expm(_gauss_half_step(f0, fm, f1, h))
        g = eye
        out = [eye] if cumulative else None
        for k in range(factors.shape[0]):
            if cumulative:
                out.append(halves[k] @ g)
            g = factors[k] @ g
            if cumulative:
                out.append(g)
        return np.stack(out) if cumulative else g

    factors = lg.expm(0.5 * h * (values[:-1] + values[1:]))
    g = eye
    out = [eye] if cumulative else None
    for k in range(steps):
        g = factors[k] @ g
        if cumulative:
            out.append(g)
    return np.stack(out) if cumulative else g


def path_ordered_exp(f: Integrand, cfg: OrderedExpConfig, group: MatrixGroup) -> GroupElement:
    """
    g(1) for g' = f(t) g, g(0) = e (right-invariant convention dR_g f = g').
    """
    g = integrate_callable(f, int(cfg.steps), cfg.scheme)
    return GroupElement(g, group)

