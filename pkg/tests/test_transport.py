import dataclasses
import math

import numpy as np
import pytest

from holonomy.errors import ConstraintError, CubeInvalid, InvariantViolated, NotABigon, StartMismatch
from holonomy.logic.fields import param_maps as pm
from holonomy.logic.fields.forms import PolynomialForm, ZeroForm
from holonomy.logic.fields.scenes import build_scene
from holonomy.logic.higher.catalog import get_instance
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.elements import GroupElement
from holonomy.logic.stokes.composition import string_start
from holonomy.logic.transport.holonomy import (
    require_bigon,
    surface_holonomy,
    surface_holonomy_local,
    volume_holonomy,
)
from holonomy.logic.transport.horizontality import check_lift_horizontality
from holonomy.logic.transport.lifts import (
    horizontal_lift_path,
    standard_lift_cube,
    standard_lift_square,
)
from holonomy.logic.transport.strings import StringFiberPoint, transport_string
from holonomy.logic.transport.tangent import (
    TangentSample,
    decompose_tangent,
    fundamental_sample,
    invariant_residual,
    sample_from_base,
    vertical_generator,
)

N = 32


def su2_element(coords):
    return lg.expm(lg.su2().from_coords(coords))


# =========================================================
# Lifts
# =========================================================

def test_zero_connection_lifts_are_constant():
    A = ZeroForm(1, 2, lg.su2())
    g0 = su2_element([0.3, 0.1, -0.2])
    lift, g = horizontal_lift_path(A, pm.Affine([[1.0], [0.3]], [0.0, 0.0]), g0, 8)
    assert np.allclose(lift.fibers, g0)
    assert float(lg.distance(g.matrix, np.eye(2))) < 1e-14


def test_constant_abelian_connection_transports_by_exponential():
    # A = c dx on a unit segment along x: g(1) = exp(-c)
    u1 = lg.u1()
    A = PolynomialForm.constant(1, 2, u1, [[0.7], [0.0]])
    _, g = horizontal_lift_path(A, pm.Affine([[1.0], [0.0]], [0.0, 0.0]), u1.identity(), 8, "cf4")
    assert np.allclose(g.matrix, np.exp(-0.7j))


def test_standard_square_lift_is_horizontal(scene):
    sc = scene("su2-poly-square")
    lift = standard_lift_square(sc.fields.A, sc.pmap, sc.origin, 2 * N, 2 * N, "cf4")
    assert lift.shape == (2 * N + 1, 2 * N + 1)
    assert np.allclose(lift.fibers[0, 0], sc.origin)
    assert check_lift_horizontality(sc.fields.A, lift, 1).passed
    assert check_lift_horizontality(sc.fields.A, lift, 0, family={1: 0}).passed


def test_lift_of_translated_origin_is_translated_lift(scene):
    sc = scene("su2-poly-square")
    g = su2_element([0.5, -0.4, 0.2])
    a = standard_lift_square(sc.fields.A, sc.pmap, sc.origin @ g, 16, 16)
    b = standard_lift_square(sc.fields.A, sc.pmap, sc.origin, 16, 16).right_translate(g)
    assert a.max_distance(b) < 1e-12


def test_restrict_freezes_one_axis(scene):
    sc = scene("su2-poly-square")
    lift = standard_lift_square(sc.fields.A, sc.pmap, sc.origin, 8, 8)
    edge = lift.restrict(0, 8)
    assert edge.arity == 1 and edge.shape == (9,)
    assert np.array_equal(edge.fibers, lift.fibers[8])
    assert np.allclose(edge.points, sc.pmap.evaluate(np.stack([np.ones(9), lift.params[1]], axis=-1)))


def test_corrupted_fibers_fail_horizontality(scene):
    sc = scene("su2-poly-square")
    lift = standard_lift_square(sc.fields.A, sc.pmap, sc.origin, 2 * N, 2 * N, "cf4")
    fibers = lift.fibers.copy()
    fibers[N, N] = fibers[N, N] @ su2_element([0.3, -0.2, 0.1])
    bad = dataclasses.replace(lift, fibers=fibers)
    rep = check_lift_horizontality(sc.fields.A, bad, 1)
    assert not rep.passed
    assert rep.details["horizontal"] > 100 * rep.tolerance


def test_cube_lift_rejects_a_cube_with_thick_faces(scene):
    sc = scene("inner-bianchi-cube")
    thick = pm.Affine(np.eye(3), np.zeros(3))
    with pytest.raises(CubeInvalid):
        standard_lift_cube(sc.fields.A, thick, sc.origin, 4, 4, 4)


# =========================================================
# Surface holonomy
# =========================================================

def test_flat_scene_has_trivial_surface_holonomy(scene):
    sc = scene("flat-su2-square")
    tra = surface_holonomy(sc.fields.A, sc.fields.B, sc.pmap, sc.origin, N, N, sc.instance)
    assert isinstance(tra, GroupElement)
    assert float(lg.distance(tra.matrix, np.eye(2))) < 1e-14


def test_thin_square_has_trivial_surface_holonomy(scene):
    sc = scene("thin-square")
    tra = surface_holonomy(sc.fields.A, sc.fields.B, sc.pmap, sc.origin, N, N, sc.instance)
    assert float(lg.distance(tra.matrix, np.eye(3))) < 1e-12


def test_abelian_surface_holonomy_is_the_exponentiated_flux():
    # B = b dx^dy with b = 0.4 + 0.3 x + 0.2 y^2 on the unit square
    inst = get_instance("cm-abelian")
    A = ZeroForm(1, 2, inst.G)
    lin = np.zeros((1, 2, 1))
    lin[0, 0, 0] = 0.3
    quad = np.zeros((1, 2, 2, 1))
    quad[0, 1, 1, 0] = 0.2
    B = PolynomialForm(2, 2, inst.H, [[0.4]], lin, quad)
    square = pm.Affine(np.eye(2), np.zeros(2))
    tra = surface_holonomy(A, B, square, inst.G.identity(), 16, 16, inst)
    flux = 0.4 + 0.15 + 0.2 / 3.0
    assert tra.matrix[0, 0] == pytest.approx(np.exp(1j * flux), abs=1e-12)


def test_surface_holonomy_needs_fake_flat_fields(scene):
    sc = scene("su2-poly-square")
    B = ZeroForm(2, 2, sc.crossed_module.H)
    with pytest.raises(ConstraintError):
        surface_holonomy(sc.fields.A, B, sc.pmap, sc.origin, N, N, sc.instance)


def test_local_formula_needs_a_bigon(scene):
    sc = scene("su2-poly-square")
    with pytest.raises(NotABigon):
        require_bigon(sc.pmap)
    with pytest.raises(NotABigon):
        surface_holonomy_local(sc.fields.A, sc.fields.B, sc.pmap, N, N, sc.instance)


def test_local_formula_agrees_on_a_bigon(scene):
    sc = scene("su2-poly-bigon")
    e = sc.crossed_module.G.identity()
    loc = surface_holonomy_local(sc.fields.A, sc.fields.B, sc.pmap, 64, 64, sc.instance)
    tra = surface_holonomy(sc.fields.A, sc.fields.B, sc.pmap, e, 64, 64, sc.instance)
    # the bottom edge is a point, so both routes lift from e
    assert float(lg.distance(loc.matrix, tra.matrix)) < 1e-8


# =========================================================
# Volume holonomy
# =========================================================

def _unit_volume_cube():
    # (s, t, r k sin(pi s) sin(pi t)) with k = pi^2 / 4 sweeps unit volume; all side faces thin
    base = pm.Affine([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]], np.zeros(3))
    return pm.BumpCube(base, [0.0, 0.0, 1.0], amp=math.pi ** 2 / 4.0)


def test_abelian_volume_holonomy_is_the_exponentiated_negative_flux():
    inst = get_instance("c2m-ce-abelian")
    A = ZeroForm(1, 3, inst.G)
    B = ZeroForm(2, 3, inst.H)
    C = PolynomialForm.constant(3, 3, inst.L, [[0.0, 0.5]])
    V = volume_holonomy(A, B, C, _unit_volume_cube(), inst.G.identity(), (8, 32, 32), inst, "cf4")
    assert V.matrix[1, 1].real == pytest.approx(0.6065306597, abs=1e-5)
    assert V.matrix[1, 1] == pytest.approx(np.exp(-0.5), abs=1e-5)
    assert V.matrix[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_zero_fields_have_trivial_volume_holonomy(scene):
    sc = scene("ce-cube")
    inst = sc.instance
    A = ZeroForm(1, 3, inst.G)
    B = ZeroForm(2, 3, inst.H)
    C = ZeroForm(3, 3, inst.L)
    V = volume_holonomy(A, B, C, sc.pmap, sc.origin, (8, 8, 8), inst)
    assert float(lg.distance(V.matrix, inst.L.identity())) < 1e-14


def test_twisted_extension_moves_only_the_central_slot_of_the_volume(scene):
    tw = scene("ce-cube")
    flat = build_scene(dict(tw.raw, instance="c2m-ce-flat"), tw.source)

    def vol(sc):
        f = sc.fields
        return volume_holonomy(f.A, f.B, f.C, sc.pmap, sc.origin, (8, 16, 16), sc.instance).matrix

    a, b = vol(tw), vol(flat)
    assert np.allclose(a[:2, :2], b[:2, :2], atol=1e-12)
    assert abs(a[2, 2] - b[2, 2]) > 1e-6


# =========================================================
# Strings
# =========================================================

def test_string_transport_multiplies_h_by_surface_holonomy(scene):
    sc = scene("su2-poly-square")
    start = string_start(sc, N)
    end = transport_string(sc.fields.A, sc.fields.B, sc.pmap, start, (N, N), sc.instance)
    tra = surface_holonomy(sc.fields.A, sc.fields.B, sc.pmap, start.lift.fibers[0], N, N, sc.instance)
    assert float(lg.distance(end.h.matrix, tra.matrix @ start.h.matrix)) < 1e-12
    assert end.lift.arity == 1 and end.lift.shape == (N + 1,)


def test_string_start_must_match_the_left_edge(scene):
    sc = scene("su2-poly-square")
    start = string_start(sc, N)
    with pytest.raises(StartMismatch):
        transport_string(sc.fields.A, sc.fields.B, sc.pmap, start, (N, 2 * N), sc.instance)
    other, _ = horizontal_lift_path(sc.fields.A, pm.path_of(sc.pmap, 0, 1.0), sc.origin, N)
    with pytest.raises(StartMismatch):
        transport_string(sc.fields.A, sc.fields.B, sc.pmap, StringFiberPoint(other, start.h), (N, N), sc.instance)


# =========================================================
# Tangent vectors
# =========================================================

@pytest.fixture
def path_lift(scene):
    sc = scene("su2-poly-square")
    lift, _ = horizontal_lift_path(sc.fields.A, pm.path_of(sc.pmap, 0, 0.0), sc.origin, 64)
    h = GroupElement(su2_element([0.2, -0.1, 0.4]), sc.crossed_module.H)
    return sc, lift, h


def test_fundamental_sample_is_vertical(path_lift):
    sc, lift, h = path_lift
    X1 = lg.su2().from_coords([0.3, 0.2, -0.5])
    X2 = lg.su2().from_coords([-0.1, 0.4, 0.2])
    sample = fundamental_sample(lift, h, X1, X2, sc.instance)
    assert invariant_residual(sc.fields.A, sample) < 1e-10

    vertical, horizontal = decompose_tangent(sc.fields.A, sc.fields.B, sample, sc.instance)
    assert vertical.distance(sample) < 1e-12
    assert np.max(np.abs(horizontal.fiber)) < 1e-12
    Y1, Y2 = vertical_generator(vertical, sc.fields.A, sc.instance)
    assert np.allclose(Y1, X1, atol=1e-12)
    assert np.allclose(Y2, X2, atol=1e-8)


def test_sample_from_base_satisfies_the_invariant_and_decomposes(path_lift):
    sc, lift, h = path_lift
    t = lift.params[0]
    base = np.stack([0.2 * np.sin(np.pi * t), 0.1 * t * (1 - t)], axis=-1)
    omega0 = lg.su2().from_coords([0.1, 0.0, -0.2])
    eta = lg.su2().from_coords([0.0, 0.3, 0.1])
    sample = sample_from_base(sc.fields.A, lift, h, base, omega0, eta)
    assert invariant_residual(sc.fields.A, sample) < 1e-3

    vertical, horizontal = decompose_tangent(sc.fields.A, sc.fields.B, sample, sc.instance)
    assert (vertical + horizontal).distance(sample) < 1e-12
    assert np.allclose(vertical.base, 0.0)


def test_decomposition_rejects_samples_off_the_tangent_space(path_lift):
    sc, lift, h = path_lift
    Z = lg.su2().from_coords([2.0, 1.0, 0.0])
    fiber = np.broadcast_to(Z, lift.fibers.shape).copy()
    bad = TangentSample(lift, np.zeros((lift.shape[0], 2)), fiber, h, np.zeros((2, 2), dtype=complex))
    with pytest.raises(InvariantViolated):
        decompose_tangent(sc.fields.A, sc.fields.B, bad, sc.instance)
