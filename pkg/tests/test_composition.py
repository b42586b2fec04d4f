import numpy as np
import pytest

from holonomy.errors import JunctionMismatch
from holonomy.logic.lie import groups as lg
from holonomy.logic.stokes import composition
from holonomy.logic.stokes.composition import (
    check_horizontal_composition,
    check_lift_change_equivariance,
    check_string_equivariance,
    check_surface_local,
    check_thin_invariance,
    check_vertical_composition,
    glue,
    junction_gap,
    random_element,
    split_scene,
)
from holonomy.logic.stokes.suite import run_identity


def test_split_pieces_meet_and_reglue(scene):
    sc = scene("su2-poly-square")
    first, second = split_scene(sc, 0)
    assert (first.id, second.id) == ("su2-poly-square/0a", "su2-poly-square/0b")
    assert junction_gap(first.pmap, second.pmap, 0) < 1e-14
    glued = glue(first.pmap, second.pmap, 0, "vertical-surface")
    u = np.random.default_rng(0).uniform(0.0, 1.0, size=(11, 2))
    assert np.allclose(glued.evaluate(u), sc.pmap.evaluate(u), atol=1e-14)


def test_gluing_pieces_that_do_not_meet_fails(scene):
    sc = scene("su2-poly-square")
    first, second = split_scene(sc, 0)
    with pytest.raises(JunctionMismatch):
        glue(second.pmap, first.pmap, 0, "vertical-surface")


def test_random_elements_are_seeded():
    G = lg.su2()
    a = random_element(G, 3, "x")
    assert np.array_equal(a, random_element(G, 3, "x"))
    assert not np.allclose(a, random_element(G, 3, "y"))
    assert float(G.constraint_residual(a)) < 1e-12


# =========================================================
# Lift change
# =========================================================

def test_moving_the_surface_origin_acts_by_alpha(scene):
    sc = scene("su2-poly-square")
    g = lg.expm(lg.su2().from_coords([0.9, -0.3, 0.4]))
    rep = check_lift_change_equivariance("surface", sc, g, resolutions=16)
    assert rep.passed
    assert rep.residual < 1e-11
    assert set(rep.sides) == {"moved", "acted"}


def test_moving_the_volume_origin_acts_on_l(scene):
    sc = scene("ce-rot-cube")
    rep = check_lift_change_equivariance("volume", sc, resolutions=8)
    assert rep.passed
    assert rep.residual < 1e-11


def test_abelian_surface_holonomy_ignores_the_origin(scene):
    sc = scene("abelian-u1-plane")
    rep = check_lift_change_equivariance("surface", sc, resolutions=16)
    assert rep.passed
    assert float(lg.distance(rep.sides["moved"], rep.sides["acted"])) < 1e-12


# =========================================================
# Vertical and horizontal composition
# =========================================================

def test_vertical_surface_composition(scene):
    sc = scene("su2-poly-square")
    first, second = split_scene(sc, 0)
    rep = check_vertical_composition("surface", first, second, resolutions=16)
    assert rep.passed
    assert set(rep.details["routes"]) == {"product"}


def test_horizontal_surface_composition_on_a_bigon(scene):
    sc = scene("su2-poly-bigon")
    first, second = split_scene(sc, 1)
    rep = check_horizontal_composition("surface", first, second, resolutions=16, classical=True)
    assert rep.passed
    assert set(rep.details["routes"]) == {"formula", "classical"}


def test_horizontal_composition_needs_a_constant_junction(scene):
    sc = scene("su2-poly-square")
    first, second = split_scene(sc, 1)
    with pytest.raises(JunctionMismatch):
        check_horizontal_composition("surface", first, second, resolutions=16)
    rep = run_identity(sc, "horizontal-surface", 16)
    assert not rep.passed
    assert rep.details["error"] == "JunctionMismatch"


def test_vertical_volume_composition(scene):
    sc = scene("ce-cube")
    first, second = split_scene(sc, 0)
    assert check_vertical_composition("volume", first, second, resolutions=8).passed


def test_horizontal_volume_composition(scene):
    sc = scene("ce-cube")
    first, second = split_scene(sc, 1)
    assert check_horizontal_composition("volume", first, second, resolutions=8).passed


def test_unknown_kind_is_rejected(scene):
    sc = scene("su2-poly-square")
    first, second = split_scene(sc, 0)
    with pytest.raises(ValueError):
        check_vertical_composition("hypercube", first, second, resolutions=8)


# =========================================================
# Thin homotopies, local formula, strings
# =========================================================

def test_reparametrized_path_has_the_same_holonomy(scene):
    rep = check_thin_invariance("path", scene("su2-poly-square"), resolutions=32)
    assert rep.passed
    assert not rep.details["thin"]


def test_thin_square_matches_the_identity(scene):
    rep = check_thin_invariance("surface", scene("thin-square"), resolutions=16)
    assert rep.passed
    assert rep.details["thin"]
    assert "identity" in rep.details["routes"]


def test_section_route_matches_the_global_route(scene):
    rep = check_surface_local(scene("cover-central-bigon"), resolutions=16)
    assert rep.passed


def test_string_transport_is_equivariant(scene):
    rep = check_string_equivariance(scene("u1-square"), samples=10, resolutions=16)
    assert rep.passed
    assert rep.details["samples"] == 10
    assert rep.details["h_consistency"] < 1e-12


def test_string_check_fails_when_the_h_part_drifts_from_the_surface_holonomy(scene, monkeypatch):
    sc = scene("u1-square")
    shift = lg.expm(sc.crossed_module.H.from_coords(np.full(sc.crossed_module.H.dim, 0.3)))
    surface = composition._tra

    def skewed(*args, **kwargs):
        tra, lift = surface(*args, **kwargs)
        return tra @ shift, lift

    monkeypatch.setattr(composition, "_tra", skewed)
    rep = check_string_equivariance(sc, samples=4, resolutions=16)
    assert rep.details["equivariance"] <= rep.tolerance
    assert rep.details["h_consistency"] > 0.1
    assert rep.residual == rep.details["h_consistency"]
    assert not rep.passed


def test_nonabelian_string_transport_is_equivariant(scene):
    rep = check_string_equivariance(scene("cover-central-bigon"), samples=10, resolutions=16)
    assert rep.passed
