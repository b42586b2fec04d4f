import json

import numpy as np
import pytest

from holonomy.errors import ConfigError, EvalError
from holonomy.logic.fields import param_maps as pm
from holonomy.logic.fields.calculus import contract, fd_exterior_derivative, fd_jacobian, jacobian
from holonomy.logic.fields.forms import CurvatureForm, PolynomialForm, TwoCurvatureForm, ZeroForm
from holonomy.logic.fields.scenes import build_scene, builtin_scene_ids, load_scene, resolve_scene
from holonomy.logic.fields.validation import (
    check_fake_curvature,
    parameter_grid,
    pinned_residual,
    thinness_rank,
    validate_cube,
    validate_tesseract,
)
from holonomy.logic.higher.catalog import get_instance
from holonomy.logic.lie import groups as lg
from holonomy.logic.stokes.suite import IDENTITY_IDS

SQUARE = pm.Affine(np.eye(2), [0.0, 0.0])


def interior(arity, n=7, seed=0):
    return np.random.default_rng(seed).uniform(0.1, 0.9, size=(n, arity))


# =========================================================
# Parameter maps
# =========================================================

MAPS = {
    "fan": pm.Fan([0.0, 0.0], [1.0, 0.0], [0.2, 1.0]),
    "bigon": pm.Bigon([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], lobes=2, bulge=0.2, e3=[0.0, 0.0, 1.0]),
    "warp": pm.Warp(pm.Fan([0.0, 0.0], [1.0, 0.0], [0.0, 1.0]), "trig", 0.15, np.random.default_rng(1)),
    "warp-poly": pm.Warp(SQUARE, "poly", 0.1, np.random.default_rng(2)),
    "reparam": pm.Reparam(SQUARE, [0.4, -0.3]),
    "bump-cube": pm.BumpCube(pm.Affine(np.eye(3)[:, :2], [0.0, 0.0, 0.0]), [0.0, 0.0, 1.0], amp=0.3, ms=2),
    "bump-tesseract": pm.BumpTesseract(pm.Affine(np.eye(4)[:, :2], np.zeros(4)), [0, 0, 1, 0], [0, 0, 0, 1]),
    "extrude": pm.Extrude(pm.Affine([[1.0], [0.5]], [0.0, 0.0]), 2, [0]),
}


@pytest.mark.parametrize("name", sorted(MAPS))
def test_analytic_jacobian_matches_finite_differences(name):
    pmap = MAPS[name]
    u = interior(pmap.arity)
    j = pmap.analytic_jac(u)
    assert j is not None
    assert j.shape == (len(u), pmap.dim, pmap.arity)
    assert np.allclose(j, fd_jacobian(pmap, u), atol=1e-6)


def test_fd_jacobian_is_one_sided_at_the_faces():
    pmap = MAPS["warp"]
    u = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    assert np.allclose(fd_jacobian(pmap, u), pmap.analytic_jac(u), atol=1e-6)


def test_derivative_mode_fd_skips_the_analytic_form():
    f = pm.FunctionMap(lambda u: np.stack([u[..., 0] ** 2, u[..., 1]], axis=-1), 2, 2)
    u = np.array([[0.5, 0.5]])
    assert np.allclose(jacobian(f, u), [[[1.0, 0.0], [0.0, 1.0]]], atol=1e-7)


def test_map_errors_are_eval_errors():
    bad = pm.FunctionMap(lambda u: np.full(u.shape[:-1] + (2,), np.nan), 2, 2)
    with pytest.raises(EvalError):
        bad.evaluate([0.5, 0.5])
    with pytest.raises(EvalError):
        SQUARE.evaluate([0.5, 0.5, 0.5])


def test_reparam_strength_is_bounded():
    with pytest.raises(ValueError):
        pm.Reparam(SQUARE, [1.0, 0.0])
    with pytest.raises(ValueError):
        pm.Reparam(SQUARE, [0.1])


def test_pinned_edges():
    assert pinned_residual(MAPS["fan"], 1, 0.0) == 0.0
    assert pinned_residual(MAPS["fan"], 1, 1.0) > 0.1
    bigon = pm.Bigon([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], lobes=2)
    assert pinned_residual(bigon, 1, 0.0) < 1e-12
    assert pinned_residual(bigon, 1, 1.0) < 1e-12
    assert pinned_residual(bigon, 1, 0.5) < 1e-12  # two lobes meet at t = 1/2


def test_path_of_and_concat_follow_the_square():
    square = MAPS["warp"]
    top = pm.path_of(square, 1, 1.0)
    s = np.linspace(0.0, 1.0, 5)
    assert np.allclose(top.evaluate(s[:, None]), square.evaluate(np.stack([s, np.ones(5)], axis=-1)))

    lower = pm.Sub(square, [0.0, 0.0], [1.0, 0.5])
    upper = pm.Sub(square, [0.0, 0.5], [1.0, 1.0])
    glued = pm.Concat(lower, upper, axis=1)
    u = interior(2, 11, seed=4)
    assert np.allclose(glued.evaluate(u), square.evaluate(u), atol=1e-14)


# =========================================================
# Forms
# =========================================================

def test_components_are_antisymmetric():
    A = PolynomialForm.seeded(2, 3, lg.su2(), np.random.default_rng(0))
    vals = A.components(interior(3))
    assert np.allclose(A.component(vals, (2, 0)), -A.component(vals, (0, 2)))
    assert np.allclose(A.component(vals, (1, 1)), 0.0)


def test_polynomial_derivatives_match_finite_differences():
    A = PolynomialForm.seeded(1, 3, lg.su2(), np.random.default_rng(1), amplitude=0.5)
    x = interior(3)
    assert np.allclose(A.derivative(x), A.fd_derivative(x), atol=1e-7)
    F = CurvatureForm(A)
    assert np.allclose(F.derivative(x), F.fd_derivative(x), atol=1e-6)


def test_abelian_curvature_is_exterior_derivative():
    A = PolynomialForm.seeded(1, 2, lg.u1(), np.random.default_rng(2), amplitude=0.5)
    x = interior(2)
    assert np.allclose(CurvatureForm(A).components(x), fd_exterior_derivative(A, x), atol=1e-7)


def test_bianchi_identity_for_inner_curvature():
    # F_B with B = F_A and the adjoint action vanishes identically
    A = PolynomialForm.seeded(1, 3, lg.su2(), np.random.default_rng(3), amplitude=0.5)
    F = CurvatureForm(A)
    FB = TwoCurvatureForm(A, F, lg.commutator)
    assert np.max(np.abs(FB.components(interior(3)))) < 1e-10


def test_non_finite_field_values_raise_eval_error():
    A = PolynomialForm.seeded(1, 2, lg.su2(), np.random.default_rng(4))
    with pytest.raises(EvalError):
        A.components(np.array([[np.inf, 0.0]]))


def test_contract_uses_jacobian_minors():
    B = PolynomialForm.constant(2, 2, lg.u1(), [[1.0]])
    jac = np.array([[2.0, 1.0], [0.0, 3.0]])
    out = contract(B.components(np.zeros(2)), jac, [0, 1], 2)
    assert np.allclose(out, 6.0 * lg.u1().basis[0])


def test_fake_curvature_of_lifted_curvature(scene):
    sc = scene("su2-poly-square")
    pts = sc.pmap.evaluate(parameter_grid(2))
    rep = check_fake_curvature(sc.fields.A, sc.fields.B, sc.crossed_module, pts)
    assert rep.passed
    wrong = check_fake_curvature(sc.fields.A, ZeroForm(2, 2, sc.crossed_module.H), sc.crossed_module, pts)
    assert not wrong.passed


# =========================================================
# Thinness and cube / tesseract validation
# =========================================================

def test_extruded_path_is_thin():
    assert thinness_rank(MAPS["extrude"], parameter_grid(2)) == 1
    assert thinness_rank(SQUARE, parameter_grid(2)) == 2


def test_bump_cube_is_valid_and_identity_cube_is_not():
    assert validate_cube(MAPS["bump-cube"]).passed
    rep = validate_cube(pm.Affine(np.eye(3), np.zeros(3)))
    assert not rep.passed
    assert rep.details["failed"]


def test_bump_tesseract_is_valid_and_identity_tesseract_is_not():
    assert validate_tesseract(MAPS["bump-tesseract"]).passed
    assert not validate_tesseract(pm.Affine(np.eye(4), np.zeros(4))).passed


# =========================================================
# Scenes
# =========================================================

def minimal_scene(**over):
    data = {
        "schema": 1,
        "id": "tiny",
        "instance": "cm-inner-su2",
        "dim": 2,
        "map": {"kind": "fan", "v0": [1.0, 0.0], "v1": [0.0, 1.0]},
        "fields": {"A": "polynomial", "B": "curvature"},
        "identities": ["stokes-2d"],
    }
    data.update(over)
    return data


def test_builtin_scenes_load_and_name_known_identities():
    ids = builtin_scene_ids()
    assert "flat-su2-square" in ids and "ce-tesseract" in ids
    for ref in ids:
        sc = resolve_scene(ref)
        assert sc.id == ref
        assert set(sc.identities) <= set(IDENTITY_IDS)


def test_scene_fields_depend_only_on_the_seed():
    a = build_scene(minimal_scene(seed=5))
    b = build_scene(minimal_scene(seed=5))
    c = build_scene(minimal_scene(seed=6))
    x = interior(2)
    assert np.array_equal(a.fields.A.components(x), b.fields.A.components(x))
    assert not np.allclose(a.fields.A.components(x), c.fields.A.components(x))
    assert np.array_equal(a.with_seed(6).fields.A.components(x), c.fields.A.components(x))


@pytest.mark.parametrize("over,key", [
    ({"schema": 2}, "schema"),
    ({"colour": "red"}, "colour"),
    ({"instance": "nope"}, "instance"),
    ({"dim": 5}, "dim"),
    ({"resolution": 30}, "resolution"),
    ({"scheme": "rk4"}, "scheme"),
    ({"map": {"kind": "sphere"}}, "map.kind"),
    ({"fields": {"A": "cubic"}}, "fields.A.kind"),
    ({"fields": {"C": "zero"}}, "fields.C"),
])
def test_malformed_scenes_are_config_errors(over, key):
    with pytest.raises(ConfigError) as exc:
        build_scene(minimal_scene(**over))
    assert exc.value.key == key


def test_free_two_form_needs_a_kernel():
    with pytest.raises(ConfigError):
        build_scene(minimal_scene(fields={"A": "zero", "B": "free"}))


def test_load_scene_reports_missing_and_broken_files(tmp_path):
    with pytest.raises(ConfigError):
        load_scene(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_scene(broken)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(minimal_scene()), encoding="utf-8")
    assert load_scene(good).id == "tiny"
    with pytest.raises(ConfigError):
        resolve_scene("no-such-scene")


def test_origin_is_an_exponential_of_algebra_coordinates():
    sc = build_scene(minimal_scene(origin=[0.1, 0.2, 0.3]))
    assert np.allclose(sc.origin, lg.expm(lg.su2().from_coords([0.1, 0.2, 0.3])))
    assert get_instance("cm-inner-su2").G.constraint_residual(sc.origin) < 1e-12
