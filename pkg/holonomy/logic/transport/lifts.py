# holonomy/logic/transport/lifts.py
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from holonomy.errors import CubeInvalid, TesseractInvalid
from holonomy.logic.fields.forms import Form
from holonomy.logic.fields.param_maps import Affine, Compose, ParamMap
from holonomy.logic.fields.validation import first_failure, validate_cube, validate_tesseract
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.elements import GroupElement
from holonomy.logic.lie.groups import MatrixGroup
from holonomy.logic.lie.ordered_exp import integrate_callable
from holonomy.logic.transport.pullback import pull_connection

logger = logging.getLogger(__name__)

Origin = Union[GroupElement, np.ndarray]


def _matrix(g: Origin) -> np.ndarray:
    return g.matrix if isinstance(g, GroupElement) else np.asarray(g, dtype=complex)


@dataclass(frozen=True, eq=False)
class LiftGrid:
    """
    Sampled lift of a parameter map into the trivial bundle R^d x G.

    params[j]  node values along parameter axis j
    points     (*shape, d) base points, equal to source evaluated on the grid
    fibers     (*shape, n, n) fiber elements
    """

    arity: int
    params: Tuple[np.ndarray, ...]
    points: np.ndarray
    fibers: np.ndarray
    group: MatrixGroup
    provenance: str
    source: Optional[ParamMap] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(len(p) for p in self.params)

    def param_grid(self) -> np.ndarray:
        mesh = np.meshgrid(*self.params, indexing="ij")
        return np.stack(mesh, axis=-1)

    def fiber(self, *index: int) -> GroupElement:
        return GroupElement(self.fibers[tuple(index)], self.group)

    @property
    def origin(self) -> GroupElement:
        return self.fiber(*([0] * self.arity))

    @property
    def end(self) -> GroupElement:
        return self.fiber(*([-1] * self.arity))

    def right_translate(self, g: Origin) -> "LiftGrid":
        return replace(self, fibers=self.fibers @ _matrix(g), provenance=self.provenance + "*g")

    def restrict(self, axis: int, index: int) -> "LiftGrid":
        """The sub-lift with parameter `axis` frozen at node `index`."""
        sl = [slice(None)] * self.arity
        sl[axis] = index
        sl = tuple(sl)
        source = None if self.source is None else slice_map(self.source, axis, float(self.params[axis][index]))
        return LiftGrid(
            arity=self.arity - 1,
            params=tuple(p for a, p in enumerate(self.params) if a != axis),
            points=self.points[sl],
            fibers=self.fibers[sl],
            group=self.group,
            provenance=f"{self.provenance}|{axis}={index}",
            source=source,
        )

    def max_distance(self, other: "LiftGrid") -> float:
        return float(np.max(lg.distance(self.fibers, other.fibers)))


# =========================================================
# Nested horizontal families
# =========================================================

def nested_fibers(A: Form, pmap: ParamMap, steps: Sequence[int], g0: Origin,
                  scheme: str = "midpoint") -> Tuple[Tuple[np.ndarray, ...], np.ndarray]:
    """
    Outermost-first construction: the line along axis 0 from the origin, then
    lines along axis 1 from every node of the previous level, and so on.
    Every level is solved from the identity and right-multiplied onto the
    previous level, so whole curves are translated as one.
    """
    k = pmap.arity
    params = tuple(np.linspace(0.0, 1.0, int(n) + 1) for n in steps)
    fibers = _matrix(g0)
    for j in range(k):
        prev = np.meshgrid(*params[:j], indexing="ij") if j else []
        prev_shape = tuple(len(p) for p in params[:j])

        def f(t, j=j, prev=prev, prev_shape=prev_shape):
            u = np.zeros(prev_shape + (k,))
            for a in range(j):
                u[..., a] = prev[a]
            u[..., j] = t
            return -pull_connection(A, pmap, u, j)

        step = integrate_callable(f, int(steps[j]), scheme, cumulative=True)
        fibers = np.moveaxis(step @ fibers, 0, j)
    return params, fibers


def _grid(params: Tuple[np.ndarray, ...]) -> np.ndarray:
    return np.stack(np.meshgrid(*params, indexing="ij"), axis=-1)


def _build(A: Form, pmap: ParamMap, steps: Sequence[int], g0: Origin, scheme: str, provenance: str) -> LiftGrid:
    params, fibers = nested_fibers(A, pmap, steps, g0, scheme)
    return LiftGrid(
        arity=pmap.arity,
        params=params,
        points=pmap.evaluate(_grid(params)),
        fibers=fibers,
        group=A.group,
        provenance=provenance,
        source=pmap,
    )


def horizontal_lift_path(A: Form, gamma: ParamMap, g0: Origin, N: int,
                         scheme: str = "midpoint") -> Tuple[LiftGrid, GroupElement]:
    """
    Horizontal lift t -> (gamma(t), g(t) g0) with g' = -A(gamma') g, g(0) = e.
    Returns the lift and the transport g(1).
    """
    lift = _build(A, gamma, [N], g0, scheme, "path")
    g = lift.fibers[-1] @ lg.inv(_matrix(g0))
    return lift, GroupElement(g, A.group)


def standard_lift_square(A: Form, sigma: ParamMap, g00: Origin, N_s: int, N_t: int,
                         scheme: str = "midpoint") -> LiftGrid:
    """Bottom edge t = 0 lifted along s from the origin, then every t-line."""
    return _build(A, sigma, [N_s, N_t], g00, scheme, "square")


def section_lift_square(A: Form, sigma: ParamMap, N_s: int, N_t: int, scheme: str = "midpoint") -> LiftGrid:
    """t-lines lifted from (Sigma(s, 0), e) for every s; no transport along the bottom edge."""
    params = (np.linspace(0.0, 1.0, N_s + 1), np.linspace(0.0, 1.0, N_t + 1))
    k = 2
    prev = params[0]

    def f(t):
        u = np.zeros((len(prev), k))
        u[:, 0] = prev
        u[:, 1] = t
        return -pull_connection(A, sigma, u, 1)

    step = integrate_callable(f, N_t, scheme, cumulative=True)  # (N_t+1, N_s+1, n, n)
    return LiftGrid(
        arity=2,
        params=params,
        points=sigma.evaluate(_grid(params)),
        fibers=np.moveaxis(step, 0, 1),
        group=A.group,
        provenance="section",
        source=sigma,
    )


def standard_lift_cube(A: Form, theta: ParamMap, g000: Origin, N_r: int, N_s: int, N_t: int,
                       scheme: str = "midpoint", validate: bool = True) -> LiftGrid:
    """
    (c) the r-line at s = t = 0, (b) s-lines at t = 0, (a) every t-line.
    Raises CubeInvalid when a side face is not thin.
    """
    if validate:
        check_cube(theta)
    return _build(A, theta, [N_r, N_s, N_t], g000, scheme, "cube")


def standard_lift_tesseract(A: Form, T: ParamMap, g0000: Origin, steps: Sequence[int],
                            scheme: str = "midpoint", validate: bool = True) -> LiftGrid:
    """Four nested horizontal families q, r, s, t. Raises TesseractInvalid on a bad face."""
    if validate:
        check_tesseract(T)
    return _build(A, T, list(steps), g0000, scheme, "tesseract")


def check_tesseract(T: ParamMap) -> None:
    rep = validate_tesseract(T)
    if not rep.passed:
        face, value = first_failure(rep)
        reason = "face moves with q" if face.startswith(("s", "t")) else "face is not thin"
        raise TesseractInvalid(face or "side", reason, value or rep.residual)


def check_cube(theta: ParamMap) -> None:
    rep = validate_cube(theta)
    if not rep.passed:
        face, value = first_failure(rep)
        raise CubeInvalid(face or "side", "face is not thin", value or rep.residual)


def slice_map(T: ParamMap, axis: int, value: float) -> ParamMap:
    """T with parameter `axis` frozen at `value`, as a map of one arity lower."""
    k = T.arity
    m = np.zeros((k, k - 1))
    free = [a for a in range(k) if a != axis]
    for col, a in enumerate(free):
        m[a, col] = 1.0
    off = np.zeros(k)
    off[axis] = float(value)
    return Compose(T, Affine(m, off))


__all__ = [
    "LiftGrid",
    "nested_fibers",
    "horizontal_lift_path",
    "standard_lift_square",
    "section_lift_square",
    "standard_lift_cube",
    "standard_lift_tesseract",
    "check_cube",
    "check_tesseract",
    "slice_map",
]
