# holonomy/logic/higher/catalog.py
from __future__ import annotations

from functools import lru_cache
from typing import Callable, Dict, Union

import numpy as np

from holonomy.errors import ConfigError
from holonomy.logic.higher.crossed import CrossedModuleInstance, Crossed2ModuleInstance
from holonomy.logic.lie import groups as lg

Instance = Union[CrossedModuleInstance, Crossed2ModuleInstance]


def _lead(*arrays: np.ndarray) -> tuple:
    return np.broadcast_shapes(*(np.shape(a)[:-2] for a in arrays))


def _keep(h: np.ndarray, *others: np.ndarray) -> np.ndarray:
    # trivial action: h, broadcast against the acting batch
    h = np.asarray(h, dtype=complex)
    shape = _lead(h, *others) + h.shape[-2:]
    return np.broadcast_to(h, shape).copy()


def _eye_like(n: int, *arrays: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.eye(n, dtype=complex), _lead(*arrays) + (n, n)).copy()


def _zeros_like(n: int, *arrays: np.ndarray) -> np.ndarray:
    return np.zeros(_lead(*arrays) + (n, n), dtype=complex)


def _iota(h: np.ndarray, size: int) -> np.ndarray:
    """block(h, 1, ...): H sits in the leading block of L."""
    h = np.asarray(h, dtype=complex)
    m = h.shape[-1]
    out = np.broadcast_to(np.eye(size, dtype=complex), h.shape[:-2] + (size, size)).copy()
    out[..., :m, :m] = h
    return out


# =========================================================
# Crossed modules
# =========================================================

def cm_inner(factory: Callable[..., lg.MatrixGroup], name: str) -> CrossedModuleInstance:
    G = factory("G")
    H = factory("H")
    n = G.size
    return CrossedModuleInstance(
        name=name,
        G=G,
        H=H,
        tau=lambda h: np.asarray(h, dtype=complex),
        dtau=lambda y: np.asarray(y, dtype=complex),
        alpha=lg.conj,
        alpha_alg=lg.conj,
        dalpha=lg.commutator,
        tau_section=lambda x: np.asarray(x, dtype=complex),
        kernel_basis=np.zeros((0, n, n), dtype=complex),
        description=f"{G.name} acting on itself by conjugation, tau = id",
    )


def cm_abelian() -> CrossedModuleInstance:
    G = lg.so3("G")
    H = lg.u1("H")
    return CrossedModuleInstance(
        name="cm-abelian",
        G=G,
        H=H,
        tau=lambda h: _eye_like(3, h),
        dtau=lambda y: _zeros_like(3, y),
        alpha=_keep_action,
        alpha_alg=_keep_action,
        dalpha=lambda x, y: _zeros_like(1, x, y),
        tau_section=lambda x: _zeros_like(1, x),
        kernel_basis=H.basis.copy(),
        description="SO(3) with trivial tau and trivial action on U(1); flat connections only",
    )


def _keep_action(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    return _keep(h, g)


def cm_cover_central() -> CrossedModuleInstance:
    G = lg.so3("G")
    H = lg.product(lg.su2(), lg.u1(), tag="H")

    def tau(h):
        return lg.covering(np.asarray(h, dtype=complex)[..., :2, :2])

    def dtau(y):
        c = lg.su2_coords(np.asarray(y, dtype=complex)[..., :2, :2])
        return G.from_coords(c)

    def alpha(g, h):
        out = _keep(h, g)
        out[..., :2, :2] = lg.rotate_su2_group(g, np.asarray(h, dtype=complex)[..., :2, :2])
        return out

    def alpha_alg(g, y):
        out = _keep(y, g)
        out[..., :2, :2] = lg.rotate_su2(g, np.asarray(y, dtype=complex)[..., :2, :2])
        return out

    def dalpha(x, y):
        c = lg.su2_coords(np.asarray(y, dtype=complex)[..., :2, :2])
        xc = np.einsum("...kj,...j->...k", np.asarray(x).real, c)
        out = _zeros_like(3, x, y)
        out[..., :2, :2] = np.einsum("...k,kab->...ab", xc, lg.SU2_BASIS)
        return out

    def section(x):
        c = G.coords(x)
        return lg.embed_block(np.einsum("...k,kab->...ab", c, lg.SU2_BASIS), 3)

    kernel = np.zeros((1, 3, 3), dtype=complex)
    kernel[0, 2, 2] = 1j
    return CrossedModuleInstance(
        name="cm-cover-central",
        G=G,
        H=H,
        tau=tau,
        dtau=dtau,
        alpha=alpha,
        alpha_alg=alpha_alg,
        dalpha=dalpha,
        tau_section=section,
        kernel_basis=kernel,
        description="SU(2)xU(1) over SO(3) through the double cover; U(1) is central",
    )


def cm_broken_alpha() -> CrossedModuleInstance:
    # negative control: alpha replaced by left multiplication
    G = lg.su2("G")
    H = lg.su2("H")
    return CrossedModuleInstance(
        name="broken-alpha",
        G=G,
        H=H,
        tau=lambda h: np.asarray(h, dtype=complex),
        dtau=lambda y: np.asarray(y, dtype=complex),
        alpha=lambda g, h: np.asarray(g) @ np.asarray(h),
        alpha_alg=lambda g, y: np.asarray(g) @ np.asarray(y),
        dalpha=lambda x, y: np.asarray(x) + np.asarray(y),
        tau_section=lambda x: np.asarray(x, dtype=complex),
        kernel_basis=np.zeros((0, 2, 2), dtype=complex),
        description="left multiplication instead of an action (fails the axioms)",
    )


# =========================================================
# Crossed 2-modules
# =========================================================

def c2m_ce(twist: float = 1.0, name: str = "c2m-ce", rotating: bool = False) -> Crossed2ModuleInstance:
    H = lg.su2("H")
    L = lg.product(lg.su2(), lg.reals(), tag="L")
    if rotating:
        G = lg.su2("G")
        ng = 2
    else:
        G = lg.trivial("G")
        ng = 1

    def lift(v, w):
        return lg.embed_block(lg.commutator(np.asarray(v, dtype=complex), np.asarray(w, dtype=complex)), 3)

    def prime(h, x):
        return lg.conj(_iota(h, 3), np.asarray(x, dtype=complex))

    if rotating:
        act_H = lg.conj
        dact_H = lg.commutator

        def act_L(g, l):
            return lg.conj(_iota(g, 3), np.asarray(l, dtype=complex))

        def dact_L(x, y):
            return lg.commutator(lg.embed_block(x, 3), np.asarray(y, dtype=complex))
    else:
        act_H = _keep_action
        act_L = _keep_action

        def dact_H(x, v):
            return _zeros_like(2, x, v)

        def dact_L(x, y):
            return _zeros_like(3, x, y)

    central = np.zeros((1, 3, 3), dtype=complex)
    central[0, 2, 2] = 1.0
    desc = "su(2) extended by a central R slot; Peiffer lifting is the bracket"
    if rotating:
        desc += "; SU(2) acts by conjugation"
    return Crossed2ModuleInstance(
        name=name,
        G=G,
        H=H,
        L=L,
        partial=lambda h: _eye_like(ng, h),
        dpartial=lambda v: _zeros_like(ng, v),
        delta=lambda l: np.asarray(l, dtype=complex)[..., :2, :2].copy(),
        ddelta=lambda x: np.asarray(x, dtype=complex)[..., :2, :2].copy(),
        act_H=act_H,
        act_H_alg=act_H,
        dact_H=dact_H,
        act_L=act_L,
        act_L_alg=act_L,
        dact_L=dact_L,
        lift=lift,
        prime_alg=prime,
        prime_grp=prime,
        partial_section=lambda x: _zeros_like(2, x),
        delta_section=lambda v: lg.embed_block(v, 3),
        kernel_basis=H.basis.copy(),
        central_basis=central,
        twist=float(twist),
        twist_axis=None if rotating else lg.SU2_BASIS[2].copy(),
        description=desc,
    )


def c2m_ce_abelian() -> Crossed2ModuleInstance:
    G = lg.trivial("G")
    H = lg.u1("H")
    L = lg.product(lg.u1(), lg.reals(), tag="L")
    central = np.zeros((1, 2, 2), dtype=complex)
    central[0, 1, 1] = 1.0
    return Crossed2ModuleInstance(
        name="c2m-ce-abelian",
        G=G,
        H=H,
        L=L,
        partial=lambda h: _eye_like(1, h),
        dpartial=lambda v: _zeros_like(1, v),
        delta=lambda l: np.asarray(l, dtype=complex)[..., :1, :1].copy(),
        ddelta=lambda x: np.asarray(x, dtype=complex)[..., :1, :1].copy(),
        act_H=_keep_action,
        act_H_alg=_keep_action,
        dact_H=lambda x, v: _zeros_like(1, x, v),
        act_L=_keep_action,
        act_L_alg=_keep_action,
        dact_L=lambda x, y: _zeros_like(2, x, y),
        lift=lambda v, w: _zeros_like(2, v, w),
        prime_alg=_keep_action,
        prime_grp=_keep_action,
        partial_section=lambda x: _zeros_like(1, x),
        delta_section=lambda v: lg.embed_block(v, 2),
        kernel_basis=H.basis.copy(),
        central_basis=central,
        description="U(1) with a central R slot and zero Peiffer lifting",
    )


# =========================================================
# Registry
# =========================================================

_BUILDERS: Dict[str, Callable[[], Instance]] = {
    "cm-inner-su2": lambda: cm_inner(lg.su2, "cm-inner-su2"),
    "cm-inner-so3": lambda: cm_inner(lg.so3, "cm-inner-so3"),
    "cm-inner-u1": lambda: cm_inner(lg.u1, "cm-inner-u1"),
    "cm-abelian": cm_abelian,
    "cm-cover-central": cm_cover_central,
    "broken-alpha": cm_broken_alpha,
    "c2m-ce": lambda: c2m_ce(1.0, "c2m-ce"),
    "c2m-ce-flat": lambda: c2m_ce(0.0, "c2m-ce-flat"),
    "c2m-ce-rot": lambda: c2m_ce(0.0, "c2m-ce-rot", rotating=True),
    "c2m-ce-abelian": c2m_ce_abelian,
}

INSTANCE_IDS = tuple(_BUILDERS)


@lru_cache(maxsize=None)
def get_instance(name: str) -> Instance:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ConfigError("instance", f"unknown instance id {name!r}; known: {', '.join(INSTANCE_IDS)}",
                          key="instance")
    return builder()


def as_crossed_module(inst: Instance) -> CrossedModuleInstance:
    """The (G, H) layer of either kind of instance."""
    if isinstance(inst, Crossed2ModuleInstance):
        return inst.lower
    return inst
