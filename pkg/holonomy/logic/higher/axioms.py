# holonomy/logic/higher/axioms.py
from __future__ import annotations

import logging
from typing import Dict

import numpy as np
import scipy.linalg

from holonomy.logic.higher.crossed import CrossedModuleInstance, Crossed2ModuleInstance
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.groups import MatrixGroup
from holonomy.logic.seeds import named_rng, uniform_coords
from holonomy.logic.stokes.report import VerificationReport
from holonomy.logic.tuning import TUNING

logger = logging.getLogger(__name__)


def _alg(group: MatrixGroup, rng: np.random.Generator, n: int) -> np.ndarray:
    return group.from_coords(uniform_coords(rng, n, group.dim)).astype(complex)


def _grp(group: MatrixGroup, rng: np.random.Generator, n: int) -> np.ndarray:
    return lg.expm(_alg(group, rng, n))


def _worst(diff: np.ndarray) -> float:
    diff = np.asarray(diff, dtype=complex)
    if diff.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(diff, axis=(-2, -1))))


def _report(identity: str, rows: Dict[str, float], inst_name: str, samples: int, seed: int,
            tol: float, **extra) -> VerificationReport:
    failed = [k for k, v in rows.items() if not v <= tol]
    worst = max(rows.values()) if rows else 0.0
    if failed:
        logger.info("%s %s: failed rows %s", identity, inst_name, ", ".join(failed))
    details = {"instance": inst_name, "samples": int(samples), "axioms": rows, "failed": failed}
    details.update(extra)
    return VerificationReport(identity=identity, residual=worst, tolerance=float(tol), seed=int(seed),
                              details=details)


# =========================================================
# Crossed modules
# =========================================================

def check_crossed_module_axioms(inst: CrossedModuleInstance, samples: int = TUNING.axiom_samples,
                                seed: int = 0, tol: float = TUNING.axiom_tol) -> VerificationReport:
    """
    Sampled residuals of the crossed-module laws at group and algebra level,
    plus the exp-compatibility of tau and alpha with their differentials.
    """
    rng = named_rng(seed, f"axioms/{inst.name}")
    n = int(samples)
    G, H = inst.G, inst.H
    x = _alg(G, rng, n)
    y = _alg(H, rng, n)
    y2 = _alg(H, rng, n)
    g = lg.expm(x)
    h = lg.expm(y)
    h2 = lg.expm(y2)

    rows = {
        "equivariance": _worst(inst.tau(inst.alpha(g, h)) - lg.conj(g, inst.tau(h))),
        "peiffer": _worst(inst.alpha(inst.tau(h), h2) - lg.conj(h, h2)),
        "equivariance-alg": _worst(inst.dtau(inst.dalpha(x, y)) - lg.commutator(x, inst.dtau(y))),
        "peiffer-alg": _worst(inst.dalpha(inst.dtau(y), y2) - lg.commutator(y, y2)),
        "tau-exp": _worst(inst.tau(h) - lg.expm(inst.dtau(y))),
        "alpha-exp": _worst(inst.alpha(g, h2) - lg.expm(inst.alpha_alg(g, y2))),
    }
    return _report("crossed-module-axioms", rows, inst.name, n, seed, tol)


# =========================================================
# Crossed 2-modules
# =========================================================

def _prime_by_derivation(inst: Crossed2ModuleInstance, v: np.ndarray, x: np.ndarray) -> np.ndarray:
    """exp of the derivation of v applied to x, batched over samples."""
    basis = inst.L.basis
    if basis.shape[0] == 0:
        return x
    imgs = inst.dprime(v[:, None], basis[None])  # (n, k, m, m)
    d = np.swapaxes(inst.L.coords(imgs), -1, -2)  # (n, k, k)
    c = np.einsum("nij,nj->ni", scipy.linalg.expm(d), inst.L.coords(x))
    return inst.L.from_coords(c)


def check_crossed2_axioms(inst: Crossed2ModuleInstance, samples: int = TUNING.axiom_samples,
                          seed: int = 0, tol: float = TUNING.axiom_tol) -> VerificationReport:
    """
    Differential crossed 2-module laws with the antisymmetric specialization,
    the derived crossed module (H, L, delta, derived action) and the group-level
    equivariance of partial and delta.

    Antisymmetry of the lifting is a precheck: when it fails the report fails
    and names it, whatever the other rows say.
    """
    rng = named_rng(seed, f"axioms/{inst.name}")
    n = int(samples)
    G, H, L = inst.G, inst.H, inst.L
    X = _alg(G, rng, n)
    v1, v2, v3 = (_alg(H, rng, n) for _ in range(3))
    x1, x2 = _alg(L, rng, n), _alg(L, rng, n)
    g = lg.expm(X)
    h1 = lg.expm(v1)
    h2 = lg.expm(v2)
    l1 = lg.expm(x1)

    br = lg.commutator
    lift = inst.lift
    dp = inst.dpartial
    dd = inst.ddelta
    dH = inst.dact_H
    dL = inst.dact_L

    rows: Dict[str, float] = {}
    rows["antisymmetry"] = _worst(lift(v1, v2) + lift(v2, v1))
    precheck_ok = rows["antisymmetry"] <= tol

    rows["a-delta"] = _worst(dd(dL(X, x1)) - dH(X, dd(x1)))
    rows["a-partial"] = _worst(dp(dH(X, v1)) - br(X, dp(v1)))
    rows["b"] = _worst(dL(X, lift(v1, v2)) - lift(dH(X, v1), v2) - lift(v1, dH(X, v2)))
    rows["c"] = _worst(dd(lift(v1, v2)) - inst.peiffer(v1, v2))
    rows["d"] = _worst(br(x1, x2) - lift(dd(x1), dd(x2)))
    rows["e-first"] = _worst(
        lift(br(v1, v2), v3)
        - (dL(dp(v1), lift(v2, v3)) + lift(v1, br(v2, v3)) - dL(dp(v2), lift(v1, v3)) - lift(v2, br(v1, v3)))
    )
    rows["e-second"] = _worst(
        lift(v1, br(v2, v3)) - (lift(inst.peiffer(v1, v2), v3) - lift(inst.peiffer(v1, v3), v2))
    )
    rows["e-antisymmetric"] = _worst(lift(br(v1, v2), v3) - lift(v1, br(v2, v3)) + lift(v2, br(v1, v3)))
    rows["f"] = _worst(lift(dd(x1), v1) + lift(v1, dd(x1)) + dL(dp(v1), x1))
    rows["f-antisymmetric"] = _worst(dL(dp(v1), x1))

    # (H, L, delta, derived action) is a differential crossed module
    rows["derived-equivariance"] = _worst(dd(inst.dprime(v1, x1)) - br(v1, dd(x1)))
    rows["derived-peiffer"] = _worst(inst.dprime(dd(x1), x2) - br(x1, x2))

    if inst.twist_axis is not None:
        tw = inst.to_twisted
        rows["twisted-roundtrip"] = _worst(inst.from_twisted(tw(x1)) - x1)
        rows["twisted-bracket"] = _worst(tw(br(x1, x2)) - inst.beta_bracket(tw(x1), tw(x2)))
        rows["twisted-lift"] = _worst(
            tw(lift(v1, v2)) - inst.beta_bracket(inst.delta_section(v1), inst.delta_section(v2))
        )

    # group level
    rows["partial-equivariance"] = _worst(inst.partial(inst.act_H(g, h1)) - lg.conj(g, inst.partial(h1)))
    rows["delta-equivariance"] = _worst(inst.delta(inst.act_L(g, l1)) - inst.act_H(g, inst.delta(l1)))
    rows["derived-exp"] = _worst(inst.prime_alg(h1, x2) - _prime_by_derivation(inst, v1, x2))
    rows["derived-group"] = _worst(inst.prime_grp(h1, l1) - lg.expm(inst.prime_alg(h1, x1)))
    rows["derived-action"] = _worst(inst.prime_alg(h1 @ h2, x2) - inst.prime_alg(h1, inst.prime_alg(h2, x2)))

    return _report("crossed2-axioms", rows, inst.name, n, seed, tol,
                   precheck="pass" if precheck_ok else "antisymmetry")


def check_lifting_equivariance(inst: Crossed2ModuleInstance, samples: int = TUNING.axiom_samples,
                               seed: int = 0, tol: float = TUNING.axiom_tol) -> VerificationReport:
    """G-equivariance of the lifting and compatibility of the G- and H-actions on L."""
    rng = named_rng(seed, f"equivariance/{inst.name}")
    n = int(samples)
    g = _grp(inst.G, rng, n)
    v1, v2 = _alg(inst.H, rng, n), _alg(inst.H, rng, n)
    h = _grp(inst.H, rng, n)
    x = _alg(inst.L, rng, n)

    aH = inst.act_H_alg
    aL = inst.act_L_alg
    rows = {
        "lifting": _worst(inst.lift(aH(g, v1), aH(g, v2)) - aL(g, inst.lift(v1, v2))),
        "derived-action": _worst(inst.prime_alg(inst.act_H(g, h), aL(g, x)) - aL(g, inst.prime_alg(h, x))),
    }
    return _report("lifting-equivariance", rows, inst.name, n, seed, tol)
