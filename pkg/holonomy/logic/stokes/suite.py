# holonomy/logic/stokes/suite.py
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from holonomy.errors import ConfigError, HolonomyError
from holonomy.logging_util import LabLogger
from holonomy.logic.fields.scenes import Scene, resolve_scene
from holonomy.logic.fields.validation import (
    check_fake_2curvature,
    check_fake_curvature,
    parameter_grid,
    validate_cube,
    validate_tesseract,
)
from holonomy.logic.higher.axioms import (
    check_crossed2_axioms,
    check_crossed_module_axioms,
    check_lifting_equivariance,
)
from holonomy.logic.higher.catalog import get_instance
from holonomy.logic.higher.crossed import Crossed2ModuleInstance
from holonomy.logic.higher.semidirect import check_semidirect_laws
from holonomy.logic.stokes import identities as ids
from holonomy.logic.stokes.composition import (
    check_horizontal_composition,
    check_lift_change_equivariance,
    check_string_equivariance,
    check_surface_local,
    check_thin_invariance,
    check_vertical_composition,
    scene_resolution,
    split_scene,
)
from holonomy.logic.stokes.convergence import ConvergenceStudy, convergence_study
from holonomy.logic.stokes.report import VerificationReport
from holonomy.logic.transport.horizontality import check_lift_horizontality
from holonomy.logic.transport.lifts import standard_lift_square, standard_lift_cube, standard_lift_tesseract
from holonomy.logic.tuning import TUNING

logger = logging.getLogger(__name__)

Runner = Callable[[Scene, Optional[int], float], VerificationReport]


# =========================================================
# Scene requirements
# =========================================================

def _need_arity(scene: Scene, identity: str, *arities: int) -> None:
    if scene.arity not in arities:
        raise ConfigError(scene.source or scene.id, f"{identity} needs a map of arity {' or '.join(map(str, arities))}",
                          key="map")


def _need_B(scene: Scene, identity: str):
    if scene.fields.B is None:
        raise ConfigError(scene.source or scene.id, f"{identity} needs a 2-field B", key="fields.B")
    return scene.fields.B


def _need_C(scene: Scene, identity: str):
    _need_B(scene, identity)
    if scene.fields.C is None or not isinstance(scene.instance, Crossed2ModuleInstance):
        raise ConfigError(scene.source or scene.id, f"{identity} needs a 3-field C on a crossed 2-module",
                          key="fields.C")
    return scene.fields.C


def _ns(scene: Scene, resolution: Optional[int]) -> Tuple[int, ...]:
    return ids.resolution_tuple(scene_resolution(scene, resolution), scene.arity)


# =========================================================
# Runners
# =========================================================

def _stokes_2d(scene, resolution, mult):
    _need_arity(scene, "stokes-2d", 2)
    return ids.verify_stokes_2d(scene.fields.A, scene.pmap, scene.origin, _ns(scene, resolution),
                                scene.scheme, mult)


def _stokes_3d_like(verify: Callable, identity: str) -> Runner:
    def run(scene, resolution, mult):
        _need_arity(scene, identity, 3)
        B = _need_B(scene, identity)
        return verify(scene.fields.A, B, scene.pmap, scene.origin, _ns(scene, resolution), scene.instance,
                      scene.scheme, mult)
    return run


def _volume_delta(scene, resolution, mult):
    _need_arity(scene, "volume-delta", 3)
    C = _need_C(scene, "volume-delta")
    f = scene.fields
    return ids.verify_volume_delta(f.A, f.B, C, scene.pmap, scene.origin, _ns(scene, resolution), scene.instance,
                                   scene.scheme, mult)


def _stokes_4d(scene, resolution, mult):
    _need_arity(scene, "stokes-4d", 4)
    C = _need_C(scene, "stokes-4d")
    f = scene.fields
    return ids.verify_stokes_4d(f.A, f.B, C, scene.pmap, scene.origin, _ns(scene, resolution), scene.instance,
                                scene.scheme, mult)


def _lift_change(kind: str) -> Runner:
    def run(scene, resolution, mult):
        identity = f"lift-change-{kind}"
        _need_arity(scene, identity, *((2, 3) if kind == "surface" else (3,)))
        if kind == "volume":
            _need_C(scene, identity)
        else:
            _need_B(scene, identity)
        return check_lift_change_equivariance(kind, scene, resolutions=resolution, multiplier=mult)
    return run


def _composition(identity: str, kind: str, axis: int, check: Callable, **kw) -> Runner:
    def run(scene, resolution, mult):
        _need_arity(scene, identity, 2 if kind == "surface" else 3)
        if kind == "volume":
            _need_C(scene, identity)
        else:
            _need_B(scene, identity)
        first, second = split_scene(scene, axis)
        return check(kind, first, second, resolutions=resolution, multiplier=mult, **kw)
    return run


def _thin(kind: str) -> Runner:
    def run(scene, resolution, mult):
        if kind == "surface":
            _need_B(scene, "thin-surface")
        return check_thin_invariance(kind, scene, resolutions=resolution, multiplier=mult)
    return run


def _surface_local(scene, resolution, mult):
    _need_arity(scene, "surface-local", 2)
    _need_B(scene, "surface-local")
    return check_surface_local(scene, resolutions=resolution, multiplier=mult)


def _strings(scene, resolution, mult):
    _need_B(scene, "string-equivariance")
    return check_string_equivariance(scene, resolutions=resolution, multiplier=mult)


def _horizontality(scene, resolution, mult):
    """Every nested family of the standard lift, innermost first."""
    A, k = scene.fields.A, scene.arity
    ns = _ns(scene, resolution)
    if k == 2:
        lift = standard_lift_square(A, scene.pmap, scene.origin, *ns, scene.scheme)
    elif k == 3:
        lift = standard_lift_cube(A, scene.pmap, scene.origin, *ns, scene.scheme, validate=False)
    else:
        lift = standard_lift_tesseract(A, scene.pmap, scene.origin, ns, scene.scheme, validate=False)
    per_family = {}
    for j in range(k - 1, -1, -1):
        rep = check_lift_horizontality(A, lift, j, family={a: 0 for a in range(j + 1, k)})
        per_family[str(j)] = rep.residual
    return VerificationReport(identity="horizontality", residual=max(per_family.values()),
                              tolerance=TUNING.horizontality_tol, resolutions=list(ns),
                              details={"families": per_family})


def _fake_curvature(scene, resolution, mult):
    B = _need_B(scene, "fake-curvature")
    pts = scene.pmap.evaluate(parameter_grid(scene.arity))
    return check_fake_curvature(scene.fields.A, B, scene.crossed_module, pts)


def _fake_2curvature(scene, resolution, mult):
    C = _need_C(scene, "fake-2curvature")
    pts = scene.pmap.evaluate(parameter_grid(scene.arity))
    return check_fake_2curvature(scene.fields.A, scene.fields.B, C, scene.instance, pts)


def _cube_valid(scene, resolution, mult):
    _need_arity(scene, "cube-valid", 3)
    return validate_cube(scene.pmap)


def _tesseract_valid(scene, resolution, mult):
    _need_arity(scene, "tesseract-valid", 4)
    return validate_tesseract(scene.pmap)


IDENTITIES: Dict[str, Runner] = {
    "stokes-2d": _stokes_2d,
    "stokes-3d": _stokes_3d_like(ids.verify_stokes_3d, "stokes-3d"),
    "stokes-3d-center": _stokes_3d_like(ids.verify_stokes_center_variant, "stokes-3d-center"),
    "stokes-3d-peiffer": _stokes_3d_like(ids.verify_stokes_3d_peiffer, "stokes-3d-peiffer"),
    "volume-delta": _volume_delta,
    "stokes-4d": _stokes_4d,
    "lift-change-surface": _lift_change("surface"),
    "lift-change-volume": _lift_change("volume"),
    "vertical-surface": _composition("vertical-surface", "surface", 0, check_vertical_composition),
    "vertical-volume": _composition("vertical-volume", "volume", 0, check_vertical_composition),
    "horizontal-surface": _composition("horizontal-surface", "surface", 1, check_horizontal_composition),
    "horizontal-classical": _composition("horizontal-classical", "surface", 1, check_horizontal_composition,
                                         classical=True),
    "horizontal-volume": _composition("horizontal-volume", "volume", 1, check_horizontal_composition),
    "thin-path": _thin("path"),
    "thin-surface": _thin("surface"),
    "surface-local": _surface_local,
    "string-equivariance": _strings,
    "horizontality": _horizontality,
    "fake-curvature": _fake_curvature,
    "fake-2curvature": _fake_2curvature,
    "cube-valid": _cube_valid,
    "tesseract-valid": _tesseract_valid,
}

IDENTITY_IDS = tuple(IDENTITIES)


def require_known(identity_ids: Sequence[str]) -> None:
    unknown = [i for i in identity_ids if i not in IDENTITIES]
    if unknown:
        raise ConfigError("ids", f"unknown identity id(s): {', '.join(unknown)}", key="ids")


def run_identity(scene: Scene, identity: str, resolution: Optional[int] = None,
                 multiplier: float = TUNING.tol_multiplier, record_timing: bool = False) -> VerificationReport:
    """
    One oracle on one scene. Precondition failures of the scene (pinning,
    fake flatness, thin faces, junctions) come back as failing reports.
    """
    require_known([identity])
    t0 = time.perf_counter()
    try:
        rep = IDENTITIES[identity](scene, resolution, multiplier)
    except ConfigError:
        raise
    except HolonomyError as e:
        rep = VerificationReport(identity=identity, residual=math.inf, tolerance=0.0,
                                 details={"error": type(e).__name__, "message": str(e)})
    wall = (time.perf_counter() - t0) * 1000.0
    rep.identity = identity
    rep.scene = scene.id
    rep.seed = scene.seed
    rep.wall_ms = wall if record_timing else None
    rep.details.setdefault("scheme", scene.scheme)
    logger.debug("%s/%s done in %.0f ms", scene.id, identity, wall)
    return rep


# =========================================================
# Suites
# =========================================================

@dataclass(frozen=True)
class SceneTask:
    ref: str
    identities: Tuple[str, ...]
    resolution: Optional[int] = None
    multiplier: float = TUNING.tol_multiplier
    seed: Optional[int] = None
    record_timing: bool = False


@dataclass
class SceneOutcome:
    scene: str
    reports: List[VerificationReport] = field(default_factory=list)
    error: Optional[Tuple[str, str]] = None  # (kind, message), kind in {"config", "runtime"}


def run_scene_task(task: SceneTask) -> SceneOutcome:
    """Worker entry point: loads the scene itself, since instances hold closures."""
    outcome = SceneOutcome(scene=task.ref)
    try:
        scene = resolve_scene(task.ref, seed=task.seed)
        outcome.scene = scene.id
        for identity in task.identities:
            outcome.reports.append(run_identity(scene, identity, task.resolution, task.multiplier,
                                                task.record_timing))
    except ConfigError as e:
        outcome.error = ("config", str(e))
    except Exception as e:
        logger.exception("scene %s failed", task.ref)
        outcome.error = ("runtime", f"{type(e).__name__}: {e}")
    return outcome


def plan_tasks(scene_refs: Sequence[str], identity_ids: Sequence[str] = (), resolution: Optional[int] = None,
               multiplier: float = TUNING.tol_multiplier, seed: Optional[int] = None,
               record_timing: bool = False) -> List[SceneTask]:
    """
    Validate every scene up front. With no explicit ids each scene runs the
    identities it names; explicit ids are intersected with them.
    """
    require_known(identity_ids)
    tasks = []
    for ref in scene_refs:
        scene = resolve_scene(ref, seed=seed)
        require_known(scene.identities)
        chosen = tuple(i for i in identity_ids if i in scene.identities) if identity_ids else scene.identities
        if chosen:
            tasks.append(SceneTask(ref, chosen, resolution, multiplier, seed, record_timing))
    if not tasks:
        raise ConfigError("ids", "no selected identity is supported by the selected scenes", key="ids")
    return tasks


def summary_frame(reports: Sequence[VerificationReport]) -> pd.DataFrame:
    return pd.DataFrame(
        [{"scene": r.scene, "identity": r.identity, "verdict": r.verdict,
          "residual": r.residual, "tolerance": r.tolerance} for r in reports],
        columns=["scene", "identity", "verdict", "residual", "tolerance"],
    )


def run_suite(tasks: Sequence[SceneTask], threads: int = 1,
              lab_log: Optional[LabLogger] = None) -> List[VerificationReport]:
    """
    Scenes run in parallel up to `threads`; reports come back ordered by scene
    id, then by the scene's identity order, whatever the parallelism.
    """
    lab_log = lab_log or LabLogger(to_file=False)
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(tasks))) as pool:
            outcomes = list(pool.map(run_scene_task, tasks))
    else:
        outcomes = [run_scene_task(t) for t in tasks]

    for o in outcomes:
        if o.error is None:
            continue
        kind, msg = o.error
        lab_log.error(f"{o.scene}: {msg}")
        if kind == "config":
            raise ConfigError(o.scene, msg)
        raise RuntimeError(f"{o.scene}: {msg}")

    reports: List[VerificationReport] = []
    for o in sorted(outcomes, key=lambda o: o.scene):
        for r in o.reports:
            lab_log.verdict(r)
            reports.append(r)
    if reports:
        logger.info("suite summary\n%s", summary_frame(reports).to_string(index=False))
    return reports


# =========================================================
# Axioms and convergence
# =========================================================

def run_axioms(instance_id: str, samples: int = TUNING.axiom_samples, seed: int = 0) -> List[VerificationReport]:
    """
    Crossed-module laws and semidirect group laws; for crossed 2-modules the
    2-module laws replace the crossed-module ones, since (G, H) alone need not
    satisfy the Peiffer identity.
    """
    inst = get_instance(instance_id)
    reports = []
    if isinstance(inst, Crossed2ModuleInstance):
        reports.append(check_semidirect_laws(inst.lower, samples, seed))
        reports.append(check_crossed2_axioms(inst, samples, seed))
        reports.append(check_lifting_equivariance(inst, samples, seed))
    else:
        reports.append(check_crossed_module_axioms(inst, samples, seed))
        reports.append(check_semidirect_laws(inst, samples, seed))
    for r in reports:
        r.scene = instance_id
        logger.info("%s %s: %s (worst %.3e)", instance_id, r.identity, r.verdict, r.residual)
    return reports


def run_convergence(scene_ref: str, identity: str, resolutions: Sequence[int],
                    multiplier: float = TUNING.tol_multiplier, seed: Optional[int] = None,
                    record_timing: bool = False) -> ConvergenceStudy:
    require_known([identity])
    scene = resolve_scene(scene_ref, seed=seed)
    return convergence_study(identity, scene.id, resolutions,
                             lambda n: run_identity(scene, identity, n, multiplier, record_timing))


__all__ = [
    "IDENTITIES",
    "IDENTITY_IDS",
    "require_known",
    "run_identity",
    "SceneTask",
    "SceneOutcome",
    "run_scene_task",
    "plan_tasks",
    "summary_frame",
    "run_suite",
    "run_axioms",
    "run_convergence",
]
