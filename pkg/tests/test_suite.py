import math

import numpy as np
import pytest

from holonomy.errors import ConfigError
from holonomy.logic.fields.scenes import builtin_scene_ids, resolve_scene
from holonomy.logic.stokes.suite import (
    IDENTITY_IDS,
    plan_tasks,
    require_known,
    run_axioms,
    run_identity,
    run_suite,
    summary_frame,
)

# per-axis resolution by map arity; horizontality is judged against a fixed tolerance
SWEEP_N = {2: 16, 3: 8, 4: 8}
HORIZONTALITY_N = {2: 64, 3: 32}
SLOW = {("ce-tesseract", "stokes-4d")}


def sweep_cases():
    cases = []
    for ref in builtin_scene_ids():
        for identity in resolve_scene(ref).identities:
            marks = [pytest.mark.slow] if (ref, identity) in SLOW else []
            cases.append(pytest.param(ref, identity, id=f"{ref}:{identity}", marks=marks))
    return cases


@pytest.mark.parametrize("ref,identity", sweep_cases())
def test_builtin_scenes_pass_their_identities(ref, identity):
    sc = resolve_scene(ref)
    table = HORIZONTALITY_N if identity == "horizontality" else SWEEP_N
    rep = run_identity(sc, identity, table[sc.arity])
    assert rep.passed, (rep.residual, rep.tolerance, rep.details)
    assert rep.scene == ref and rep.seed == sc.seed
    assert rep.wall_ms is None


def test_identity_ids_are_known():
    require_known(IDENTITY_IDS)
    with pytest.raises(ConfigError):
        require_known(["stokes-5d"])


def test_run_identity_records_timing_on_request(scene):
    rep = run_identity(scene("flat-su2-square"), "fake-curvature", record_timing=True)
    assert rep.wall_ms is not None and rep.wall_ms >= 0.0
    assert rep.details["scheme"] == "midpoint"


def test_scene_preconditions_become_failing_reports(scene):
    # a square is not pinned at t = 1, so the section route has nothing to stand on
    rep = run_identity(scene("su2-poly-square"), "surface-local", 8)
    assert not rep.passed
    assert math.isinf(rep.residual)
    assert rep.details["error"] == "NotABigon"


def test_missing_fields_are_config_errors(scene):
    with pytest.raises(ConfigError):
        run_identity(scene("su2-poly-square"), "volume-delta", 8)
    with pytest.raises(ConfigError):
        run_identity(scene("su2-poly-square"), "stokes-3d", 8)


# =========================================================
# Planning and running suites
# =========================================================

def test_explicit_ids_are_intersected_with_scene_identities():
    tasks = plan_tasks(["flat-su2-square", "inner-bianchi-cube"], ["fake-curvature", "cube-valid"])
    chosen = {t.ref: t.identities for t in tasks}
    assert chosen == {"flat-su2-square": ("fake-curvature",),
                      "inner-bianchi-cube": ("fake-curvature", "cube-valid")}


def test_planning_rejects_empty_selections():
    with pytest.raises(ConfigError):
        plan_tasks(["flat-su2-square"], ["stokes-4d"])
    with pytest.raises(ConfigError):
        plan_tasks(["flat-su2-square"], ["no-such-identity"])
    with pytest.raises(ConfigError):
        plan_tasks(["no-such-scene"])


def test_suite_reports_are_ordered_by_scene():
    tasks = plan_tasks(["u1-square", "flat-su2-square"], ["stokes-2d", "fake-curvature"], resolution=8)
    reports = run_suite(tasks)
    assert [(r.scene, r.identity) for r in reports] == [
        ("flat-su2-square", "stokes-2d"),
        ("flat-su2-square", "fake-curvature"),
        ("u1-square", "stokes-2d"),
        ("u1-square", "fake-curvature"),
    ]
    frame = summary_frame(reports)
    assert list(frame.columns) == ["scene", "identity", "verdict", "residual", "tolerance"]
    assert (frame["verdict"] == "pass").all()


def test_parallel_suite_matches_serial():
    tasks = plan_tasks(["u1-square", "flat-su2-square"], ["stokes-2d"], resolution=8)
    serial = [r.to_dict() for r in run_suite(tasks, threads=1)]
    parallel = [r.to_dict() for r in run_suite(tasks, threads=2)]
    assert serial == parallel


def test_seed_override_reaches_the_reports():
    tasks = plan_tasks(["su2-poly-square"], ["stokes-2d"], resolution=8, seed=99)
    assert tasks[0].seed == 99
    rep = run_suite(tasks)[0]
    assert rep.seed == 99


# =========================================================
# Axioms
# =========================================================

def test_axioms_of_a_crossed_module():
    reports = run_axioms("cm-inner-su2", samples=100, seed=1)
    assert [r.identity for r in reports] == ["crossed-module-axioms", "semidirect-laws"]
    assert all(r.passed for r in reports)
    assert {r.scene for r in reports} == {"cm-inner-su2"}


def test_axioms_of_a_crossed_2_module():
    reports = run_axioms("c2m-ce", samples=100, seed=1)
    assert [r.identity for r in reports] == ["semidirect-laws", "crossed2-axioms", "lifting-equivariance"]
    assert all(r.passed for r in reports)


def test_broken_instance_fails_its_axioms():
    reports = run_axioms("broken-alpha", samples=100, seed=1)
    assert not reports[0].passed
    assert np.isfinite(reports[0].residual)
