# holonomy/logic/higher/semidirect.py
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from holonomy.errors import TagMismatch
from holonomy.logic.higher.crossed import CrossedModuleInstance
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.elements import GroupElement
from holonomy.logic.seeds import named_rng, uniform_coords
from holonomy.logic.stokes.report import VerificationReport
from holonomy.logic.tuning import TUNING


@dataclass(frozen=True, eq=False)
class SemidirectElement:
    """(g, h) in G x_alpha H."""

    g: GroupElement
    h: GroupElement

    @classmethod
    def identity(cls, inst: CrossedModuleInstance) -> "SemidirectElement":
        return cls(GroupElement.identity(inst.G), GroupElement.identity(inst.H))


def _check(a: SemidirectElement, inst: CrossedModuleInstance) -> None:
    if a.g.tag != inst.G.tag:
        raise TagMismatch("semidirect", a.g.tag, inst.G.tag)
    if a.h.tag != inst.H.tag:
        raise TagMismatch("semidirect", a.h.tag, inst.H.tag)


# raw kernels, batched over leading axes

def mul_raw(g1, h1, g2, h2, inst: CrossedModuleInstance):
    return g1 @ g2, inst.alpha(lg.inv(g2), h1) @ h2


def inv_raw(g, h, inst: CrossedModuleInstance):
    return lg.inv(g), inst.alpha(g, lg.inv(h))


def semidirect_mul(a: SemidirectElement, b: SemidirectElement, inst: CrossedModuleInstance) -> SemidirectElement:
    """(g1 g2, alpha_{g2^-1}(h1) h2)"""
    _check(a, inst)
    _check(b, inst)
    g, h = mul_raw(a.g.matrix, a.h.matrix, b.g.matrix, b.h.matrix, inst)
    return SemidirectElement(GroupElement(g, inst.G), GroupElement(h, inst.H))


def semidirect_inv(a: SemidirectElement, inst: CrossedModuleInstance) -> SemidirectElement:
    """(g^-1, alpha_g(h^-1))"""
    _check(a, inst)
    g, h = inv_raw(a.g.matrix, a.h.matrix, inst)
    return SemidirectElement(GroupElement(g, inst.G), GroupElement(h, inst.H))


def semidirect_distance(a: SemidirectElement, b: SemidirectElement) -> float:
    return float(lg.distance(a.g.matrix, b.g.matrix) + lg.distance(a.h.matrix, b.h.matrix))


def check_semidirect_laws(inst: CrossedModuleInstance, samples: int = TUNING.axiom_samples,
                          seed: int = 0, tol: float = TUNING.axiom_tol) -> VerificationReport:
    """Identity, inverse and associativity of G x_alpha H on random triples."""
    rng = named_rng(seed, f"semidirect/{inst.name}")
    n = int(samples)

    def draw():
        g = lg.expm(inst.G.from_coords(uniform_coords(rng, n, inst.G.dim)))
        h = lg.expm(inst.H.from_coords(uniform_coords(rng, n, inst.H.dim)))
        return g, h

    (ga, ha), (gb, hb), (gc, hc) = draw(), draw(), draw()
    eg = inst.G.identity((n,))
    eh = inst.H.identity((n,))

    def dist(p, q):
        return float(np.max(lg.distance(p[0], q[0]) + lg.distance(p[1], q[1])))

    ab = mul_raw(ga, ha, gb, hb, inst)
    bc = mul_raw(gb, hb, gc, hc, inst)
    ia = inv_raw(ga, ha, inst)
    rows = {
        "left-identity": dist(mul_raw(eg, eh, ga, ha, inst), (ga, ha)),
        "right-identity": dist(mul_raw(ga, ha, eg, eh, inst), (ga, ha)),
        "inverse": dist(mul_raw(ga, ha, *ia, inst), (eg, eh)),
        "double-inverse": dist(inv_raw(*ia, inst), (ga, ha)),
        "associativity": dist(mul_raw(*ab, gc, hc, inst), mul_raw(ga, ha, *bc, inst)),
    }
    failed = [k for k, v in rows.items() if not v <= tol]
    return VerificationReport(
        identity="semidirect-laws",
        residual=max(rows.values()),
        tolerance=float(tol),
        seed=int(seed),
        details={"instance": inst.name, "samples": n, "axioms": rows, "failed": failed},
    )
