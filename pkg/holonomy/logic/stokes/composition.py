# holonomy/logic/stokes/composition.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from holonomy.errors import JunctionMismatch
from holonomy.logic.fields.param_maps import Concat, ParamMap, Reparam, Sub, path_of
from holonomy.logic.fields.scenes import Scene
from holonomy.logic.fields.validation import parameter_grid, pinned_residual, thinness_rank
from holonomy.logic.higher.semidirect import SemidirectElement
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.elements import GroupElement
from holonomy.logic.lie.groups import MatrixGroup
from holonomy.logic.seeds import named_rng, uniform_coords
from holonomy.logic.stokes.identities import Resolutions, resolution_tuple
from holonomy.logic.stokes.report import VerificationReport, policy_tolerance
from holonomy.logic.transport.holonomy import (
    cube_transport,
    require_bigon,
    require_fake_flat,
    surface_holonomy_from_lift,
    surface_holonomy_local,
)
from holonomy.logic.transport.lifts import horizontal_lift_path, section_lift_square, slice_map, standard_lift_square
from holonomy.logic.transport.strings import StringFiberPoint, act_string, string_distance, transport_string
from holonomy.logic.tuning import TUNING

logger = logging.getLogger(__name__)


# =========================================================
# Route comparison
# =========================================================

@dataclass
class Routes:
    """Independent computations of one element; the first route is the reference."""

    values: Dict[str, np.ndarray]
    group: MatrixGroup
    details: Dict[str, Any] = field(default_factory=dict)


def run_routes(identity: str, evaluate: Callable[[Tuple[int, ...]], Routes], ns: Tuple[int, ...],
               multiplier: float = TUNING.tol_multiplier) -> VerificationReport:
    """
    Residual: worst distance of any route from the reference at ns.
    Measured error: worst change of any route between ns/2 and ns.
    """
    full = evaluate(ns)
    half = evaluate(tuple(n // 2 for n in ns))
    names = list(full.values)
    ref = full.values[names[0]]
    per_route = {k: float(lg.distance(full.values[k], ref)) for k in names[1:]}
    residual = max(per_route.values()) if per_route else 0.0
    measured = max(float(lg.distance(full.values[k], half.values[k])) for k in names)
    details = {"routes": per_route}
    details.update(full.details)
    return VerificationReport(
        identity=identity,
        residual=residual,
        tolerance=policy_tolerance(measured, multiplier),
        measured_error=measured,
        resolutions=list(ns),
        sides=dict(full.values),
        details=details,
    )


def scene_resolution(scene: Scene, override: Optional[int] = None) -> int:
    if override is not None:
        return int(override)
    if scene.resolution is not None:
        return int(scene.resolution)
    return {2: TUNING.n_2d, 3: TUNING.n_3d, 4: TUNING.n_4d}.get(scene.arity, TUNING.n_2d)


# =========================================================
# Pieces and gluing
# =========================================================

def split_map(pmap: ParamMap, axis: int, at: float = 0.5) -> Tuple[ParamMap, ParamMap]:
    lo = np.zeros(pmap.arity)
    hi = np.ones(pmap.arity)
    mid_hi = hi.copy()
    mid_hi[axis] = at
    mid_lo = lo.copy()
    mid_lo[axis] = at
    return Sub(pmap, lo, mid_hi), Sub(pmap, mid_lo, hi)


def split_scene(scene: Scene, axis: int) -> Tuple[Scene, Scene]:
    first, second = split_map(scene.pmap, axis)
    return scene.with_map(first, f"/{axis}a"), scene.with_map(second, f"/{axis}b")


def junction_gap(first: ParamMap, second: ParamMap, axis: int, points: int = 9) -> float:
    """max distance between first at u_axis = 1 and second at u_axis = 0."""
    u = parameter_grid(first.arity, points)
    u1 = u.copy()
    u1[:, axis] = 1.0
    u2 = u.copy()
    u2[:, axis] = 0.0
    return float(np.max(np.linalg.norm(first.evaluate(u1) - second.evaluate(u2), axis=-1)))


def glue(first: ParamMap, second: ParamMap, axis: int, kind: str) -> ParamMap:
    gap = junction_gap(first, second, axis)
    if gap > TUNING.eq_tol:
        raise JunctionMismatch(kind, gap)
    return Concat(first, second, axis)


def random_element(group: MatrixGroup, seed: int, name: str) -> np.ndarray:
    c = uniform_coords(named_rng(seed, name), 1, group.dim)[0]
    return lg.expm(group.from_coords(c))


def _tra(scene: Scene, pmap: ParamMap, origin: np.ndarray, ns: Sequence[int]):
    """(surface holonomy, standard lift) from origin."""
    lift = standard_lift_square(scene.fields.A, pmap, origin, ns[0], ns[1], scene.scheme)
    return surface_holonomy_from_lift(scene.fields.B, lift, scene.instance, scene.scheme), lift


def _cube(scene: Scene, pmap: ParamMap, origin: np.ndarray, ns: Sequence[int]):
    f = scene.fields
    return cube_transport(f.A, f.B, f.C, pmap, origin, ns, scene.instance, scene.scheme, check=False)


def surface_of(scene: Scene) -> ParamMap:
    return scene.pmap if scene.arity == 2 else slice_map(scene.pmap, 0, 1.0)


# =========================================================
# Lift change
# =========================================================

def check_lift_change_equivariance(kind: str, scene: Scene, g: Optional[np.ndarray] = None,
                                   resolutions: Optional[int] = None,
                                   multiplier: float = TUNING.tol_multiplier) -> VerificationReport:
    """
    Moving the origin from g00 to g00 g turns tra into alpha_{g^-1}(tra) for
    surfaces and g^-1 acting on tra for volumes.
    """
    inst = scene.instance
    G = scene.crossed_module.G
    if g is None:
        g = random_element(G, scene.seed, f"composition/lift-change/{scene.id}")
    g = np.asarray(g, dtype=complex)
    ginv = lg.inv(g)
    N = scene_resolution(scene, resolutions)

    if kind == "surface":
        sigma = surface_of(scene)
        require_fake_flat(scene.fields.A, scene.fields.B, inst, sigma)

        def evaluate(ns):
            t1, _ = _tra(scene, sigma, scene.origin, ns)
            t2, _ = _tra(scene, sigma, scene.origin @ g, ns)
            return Routes({"moved": t2, "acted": scene.crossed_module.alpha(ginv, t1)}, scene.crossed_module.H)

        return run_routes("lift-change-surface", evaluate, resolution_tuple(N, 2), multiplier)

    if kind == "volume":

        def evaluate(ns):
            v1 = _cube(scene, scene.pmap, scene.origin, ns).volume.matrix
            v2 = _cube(scene, scene.pmap, scene.origin @ g, ns).volume.matrix
            return Routes({"moved": v2, "acted": inst.act_L(ginv, v1)}, inst.L)

        return run_routes("lift-change-volume", evaluate, resolution_tuple(N, 3), multiplier)
    raise ValueError(f"unknown kind {kind!r}")


# =========================================================
# Vertical composition (along s for squares, along r for cubes)
# =========================================================

def check_vertical_composition(kind: str, first: Scene, second: Scene, resolutions: Optional[int] = None,
                               multiplier: float = TUNING.tol_multiplier) -> VerificationReport:
    """
    tra(second . first) = tra(second) tra(first), the second piece lifted from
    the point where the first piece's lift ends on the junction.
    """
    N = scene_resolution(first, resolutions)
    if kind == "surface":
        composite = glue(first.pmap, second.pmap, 0, "vertical-surface")

        def evaluate(ns):
            tc, _ = _tra(first, composite, first.origin, ns)
            half = (ns[0] // 2, ns[1])
            t1, lift1 = _tra(first, first.pmap, first.origin, half)
            t2, _ = _tra(second, second.pmap, lift1.fibers[-1, 0], half)
            return Routes({"composite": tc, "product": t2 @ t1}, first.crossed_module.H)

        return run_routes("vertical-surface", evaluate, resolution_tuple(N, 2), multiplier)

    if kind == "volume":
        composite = glue(first.pmap, second.pmap, 0, "vertical-volume")

        def evaluate(ns):
            vc = _cube(first, composite, first.origin, ns).volume.matrix
            half = (ns[0] // 2, ns[1], ns[2])
            c1 = _cube(first, first.pmap, first.origin, half)
            c2 = _cube(second, second.pmap, c1.lift.fibers[-1, 0, 0], half)
            return Routes({"composite": vc, "product": c2.volume.matrix @ c1.volume.matrix}, first.instance.L)

        return run_routes("vertical-volume", evaluate, resolution_tuple(N, 3), multiplier)
    raise ValueError(f"unknown kind {kind!r}")


# =========================================================
# Horizontal composition (along t for squares, along s for cubes)
# =========================================================

def _classical(first: Scene, second: Scene, ns) -> np.ndarray:
    """tra_loc(first) alpha_{a^-1}(tra_loc(second)), a the transport up the s = 0 edge of first."""
    f, cm = first.fields, first.crossed_module
    loc1 = surface_holonomy_local(f.A, f.B, first.pmap, ns[0], ns[1], first.instance, first.scheme, check=False)
    loc2 = surface_holonomy_local(f.A, f.B, second.pmap, ns[0], ns[1], first.instance, first.scheme, check=False)
    a = section_lift_square(f.A, first.pmap, ns[0], ns[1], first.scheme).fibers[0, -1]
    return loc1.matrix @ cm.alpha(lg.inv(a), loc2.matrix)


def check_horizontal_composition(kind: str, first: Scene, second: Scene, resolutions: Optional[int] = None,
                                 multiplier: float = TUNING.tol_multiplier,
                                 classical: bool = False) -> VerificationReport:
    """
    Surfaces: tra(second o first) = tra(first) tra(second) with the second
    piece lifted from the composite lift at (0, 1/2); needs a constant junction.
    On pinned bigons the section-based formula is a third route.

    Cubes: tra(second o_s first) = tra(first) (tra(Sigma)^-1 acting on tra(second)),
    Sigma the r = 0 face of first, second lifted from first's lift at (0, 1, 0).
    """
    N = scene_resolution(first, resolutions)
    if kind == "surface":
        composite = glue(first.pmap, second.pmap, 1, "horizontal-surface")
        junction = pinned_residual(first.pmap, 1, 1.0)
        if junction > TUNING.eq_tol:
            raise JunctionMismatch("horizontal-surface", junction)
        if classical:
            require_bigon(composite)
        cm = first.crossed_module

        def evaluate(ns):
            tc, _ = _tra(first, composite, first.origin, ns)
            half = (ns[0], ns[1] // 2)
            t1, lift1 = _tra(first, first.pmap, first.origin, half)
            t2, _ = _tra(second, second.pmap, lift1.fibers[0, -1], half)
            values = {"composite": tc, "formula": t1 @ t2}
            if classical:
                values["classical"] = cm.alpha(lg.inv(first.origin), _classical(first, second, half))
            return Routes(values, cm.H)

        ident = "horizontal-classical" if classical else "horizontal-surface"
        return run_routes(ident, evaluate, resolution_tuple(N, 2), multiplier)

    if kind == "volume":
        composite = glue(first.pmap, second.pmap, 1, "horizontal-volume")
        inst = first.instance

        def evaluate(ns):
            vc = _cube(first, composite, first.origin, ns).volume.matrix
            half = (ns[0], ns[1] // 2, ns[2])
            c1 = _cube(first, first.pmap, first.origin, half)
            c2 = _cube(second, second.pmap, c1.lift.fibers[0, -1, 0], half)
            acted = inst.prime_grp(lg.inv(c1.bottom.matrix), c2.volume.matrix)
            return Routes({"composite": vc, "formula": c1.volume.matrix @ acted}, inst.L)

        return run_routes("horizontal-volume", evaluate, resolution_tuple(N, 3), multiplier)
    raise ValueError(f"unknown kind {kind!r}")


# =========================================================
# Thin homotopies and reparametrization
# =========================================================

def check_thin_invariance(kind: str, scene: Scene, eps: Sequence[float] = (0.4, -0.3),
                          resolutions: Optional[int] = None,
                          multiplier: float = TUNING.tol_multiplier) -> VerificationReport:
    """
    Holonomy under a monotone endpoint-fixing reparametrization equals the
    original. Thin objects are also compared against the identity.
    path: the edge s = 1 of the scene's square.
    """
    N = scene_resolution(scene, resolutions)
    A = scene.fields.A
    sigma = surface_of(scene)

    if kind == "path":
        gamma = path_of(sigma, 0, 1.0)
        warped = Reparam(gamma, [eps[0]])
        thin = thinness_rank(gamma, parameter_grid(1, 33)) == 0
        group = A.group

        def evaluate(ns):
            _, g1 = horizontal_lift_path(A, gamma, scene.origin, ns[0], scene.scheme)
            _, g2 = horizontal_lift_path(A, warped, scene.origin, ns[0], scene.scheme)
            values = {"original": g1.matrix, "reparametrized": g2.matrix}
            if thin:
                values["identity"] = group.identity()
            return Routes(values, group, {"thin": thin})

        return run_routes("thin-path", evaluate, resolution_tuple(N, 1), multiplier)

    if kind == "surface":
        require_fake_flat(A, scene.fields.B, scene.instance, sigma)
        warped = Reparam(sigma, list(eps[:2]))
        thin = thinness_rank(sigma, parameter_grid(2, 17)) <= 1
        H = scene.crossed_module.H

        def evaluate(ns):
            t1, _ = _tra(scene, sigma, scene.origin, ns)
            t2, _ = _tra(scene, warped, scene.origin, ns)
            values = {"original": t1, "reparametrized": t2}
            if thin:
                values["identity"] = H.identity()
            return Routes(values, H, {"thin": thin})

        return run_routes("thin-surface", evaluate, resolution_tuple(N, 2), multiplier)
    raise ValueError(f"unknown kind {kind!r}")


# =========================================================
# Section-based surface holonomy
# =========================================================

def check_surface_local(scene: Scene, resolutions: Optional[int] = None,
                        multiplier: float = TUNING.tol_multiplier) -> VerificationReport:
    """Global route from the scene origin against alpha_{g00^-1} of the section route."""
    N = scene_resolution(scene, resolutions)
    f, cm = scene.fields, scene.crossed_module
    require_bigon(scene.pmap)
    require_fake_flat(f.A, f.B, scene.instance, scene.pmap)

    def evaluate(ns):
        tg, _ = _tra(scene, scene.pmap, scene.origin, ns)
        loc = surface_holonomy_local(f.A, f.B, scene.pmap, ns[0], ns[1], scene.instance, scene.scheme, check=False)
        return Routes({"global": tg, "local": cm.alpha(lg.inv(scene.origin), loc.matrix)}, cm.H)

    return run_routes("surface-local", evaluate, resolution_tuple(N, 2), multiplier)


# =========================================================
# String transport
# =========================================================

def string_start(scene: Scene, N_t: int, h0: Optional[np.ndarray] = None) -> StringFiberPoint:
    """The horizontal lift of Sigma(0, .) from the scene origin, paired with h0."""
    sigma = surface_of(scene)
    lift, _ = horizontal_lift_path(scene.fields.A, path_of(sigma, 0, 0.0), scene.origin, N_t, scene.scheme)
    H = scene.crossed_module.H
    return StringFiberPoint(lift, GroupElement(H.identity() if h0 is None else h0, H))


def check_string_equivariance(scene: Scene, samples: int = 100, resolutions: Optional[int] = None,
                              multiplier: float = TUNING.tol_multiplier) -> VerificationReport:
    """
    Transporting then acting by (g, h) equals acting then transporting, over
    `samples` seeded elements of G x_alpha H. details["h_consistency"] compares
    the transported H part from e with the surface holonomy; the residual is the
    larger of the two.
    """
    N = scene_resolution(scene, resolutions)
    ns = resolution_tuple(N, 2)
    sigma = surface_of(scene)
    cm = scene.crossed_module
    f = scene.fields
    rng = named_rng(scene.seed, f"strings/{scene.id}")
    gs = lg.expm(cm.G.from_coords(uniform_coords(rng, samples, cm.G.dim)))
    hs = lg.expm(cm.H.from_coords(uniform_coords(rng, samples, cm.H.dim)))
    h0 = lg.expm(cm.H.from_coords(uniform_coords(rng, 1, cm.H.dim)[0]))

    def transport(point, n):
        return transport_string(f.A, f.B, sigma, point, n, scene.instance, scene.scheme, check=False)

    def run(n):
        start = string_start(scene, n[1], h0)
        end = transport(start, n)
        worst = 0.0
        for g, h in zip(gs, hs):
            a = SemidirectElement(GroupElement(g, cm.G), GroupElement(h, cm.H))
            moved = transport(act_string(start, a, scene.instance), n)
            worst = max(worst, string_distance(moved, act_string(end, a, scene.instance)))
        return end, worst

    require_fake_flat(f.A, f.B, scene.instance, sigma)
    end, residual = run(ns)
    end_half, _ = run(tuple(n // 2 for n in ns))
    measured = float(lg.distance(end.h.matrix, end_half.h.matrix))

    plain = transport(string_start(scene, ns[1]), ns)
    tra, _ = _tra(scene, sigma, scene.origin, ns)
    h_consistency = float(lg.distance(plain.h.matrix, tra))
    return VerificationReport(
        identity="string-equivariance",
        residual=max(residual, h_consistency),
        tolerance=policy_tolerance(measured, multiplier),
        measured_error=measured,
        resolutions=list(ns),
        sides={"h_end": end.h.matrix},
        details={"samples": int(samples), "equivariance": residual, "h_consistency": h_consistency},
    )


__all__ = [
    "Routes",
    "run_routes",
    "scene_resolution",
    "surface_of",
    "split_map",
    "split_scene",
    "junction_gap",
    "glue",
    "random_element",
    "check_lift_change_equivariance",
    "check_vertical_composition",
    "check_horizontal_composition",
    "check_thin_invariance",
    "check_surface_local",
    "string_start",
    "check_string_equivariance",
]
