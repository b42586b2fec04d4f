import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from holonomy.errors import BranchError, ConfigError, MembershipError, TagMismatch
from holonomy.logic.lie import groups as lg
from holonomy.logic.lie.elements import (
    AlgebraElement,
    GroupElement,
    adjoint,
    bracket,
    exp_map,
    group_distance,
    log_map,
)
from holonomy.logic.lie.ordered_exp import (
    OrderedExpConfig,
    integrate_callable,
    integrate_sampled,
    path_ordered_exp,
)

SU2 = lg.su2()
coords3 = st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=3, max_size=3)


def alg(c):
    return AlgebraElement.from_coords(c, SU2)


# =========================================================
# Groups and elements
# =========================================================

def test_basis_brackets_close():
    e1, e2, e3 = SU2.basis
    assert np.allclose(lg.commutator(e1, e2), e3)
    L1, L2, L3 = lg.so3().basis
    assert np.allclose(lg.commutator(L1, L2), L3)


def test_group_element_rejects_non_members():
    with pytest.raises(MembershipError):
        GroupElement(2.0 * np.eye(2), SU2)
    with pytest.raises(MembershipError):
        GroupElement(np.eye(3), SU2)


def test_algebra_element_rejects_hermitian_matrix():
    with pytest.raises(MembershipError):
        AlgebraElement(np.array([[1.0, 0.0], [0.0, -1.0]]), SU2)


def test_mixing_groups_is_a_tag_mismatch():
    g = GroupElement.identity(SU2)
    r = GroupElement.identity(lg.so3())
    with pytest.raises(TagMismatch):
        g @ r
    with pytest.raises(TagMismatch):
        bracket(alg([1, 0, 0]), AlgebraElement.zero(lg.so3()))


def test_coords_recover_from_coords():
    x = alg([0.3, -0.2, 0.7])
    assert np.allclose(x.coords(), [0.3, -0.2, 0.7])


def test_log_map_refuses_far_elements():
    minus_one = GroupElement(-np.eye(2), SU2)
    with pytest.raises(BranchError) as exc:
        log_map(minus_one)
    assert exc.value.distance > exc.value.radius


def test_product_group_embeds_factors():
    H = lg.product(lg.su2(), lg.u1(), tag="H")
    assert H.size == 3 and H.dim == 4
    g = lg.expm(H.from_coords([0.1, 0.2, 0.3, 0.4]))
    assert float(H.constraint_residual(g)) < 1e-12


def test_trivial_group_has_an_empty_algebra():
    G = lg.trivial()
    assert G.dim == 0 and G.size == 1
    assert G.coords(G.identity()).shape == (0,)
    assert G.coords(G.identity((4,))).shape == (4, 0)
    assert np.allclose(G.from_coords(np.zeros(0)), 0.0)
    assert float(G.constraint_residual(G.identity())) == 0.0
    assert float(G.algebra_residual(np.zeros((1, 1)))) == 0.0


@settings(max_examples=50, deadline=None)
@given(coords3)
def test_exp_lands_in_group_and_log_inverts(c):
    x = alg(c)
    g = exp_map(x)
    assert float(SU2.constraint_residual(g.matrix)) < 1e-12
    assert np.allclose(log_map(g).matrix, x.matrix, atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(coords3, coords3)
def test_bracket_is_antisymmetric(a, b):
    x, y = alg(a), alg(b)
    assert np.allclose(bracket(x, y).matrix, -bracket(y, x).matrix, atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(coords3, coords3, coords3)
def test_jacobi_identity(a, b, c):
    x, y, z = alg(a), alg(b), alg(c)
    total = (bracket(x, bracket(y, z)).matrix
             + bracket(y, bracket(z, x)).matrix
             + bracket(z, bracket(x, y)).matrix)
    assert np.allclose(total, 0.0, atol=1e-13)


@settings(max_examples=50, deadline=None)
@given(coords3, coords3, coords3)
def test_adjoint_preserves_brackets(a, b, c):
    g = exp_map(alg(a))
    x, y = alg(b), alg(c)
    lhs = adjoint(g, bracket(x, y)).matrix
    rhs = bracket(adjoint(g, x), adjoint(g, y)).matrix
    assert np.allclose(lhs, rhs, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(coords3, coords3)
def test_exp_intertwines_adjoint_and_conjugation(a, b):
    g = exp_map(alg(a))
    x = alg(b)
    lhs = exp_map(adjoint(g, x))
    rhs = g @ exp_map(x) @ g.inverse()
    assert group_distance(lhs, rhs) < 1e-12


# =========================================================
# Ordered exponentials
# =========================================================

X = SU2.basis[0] * 1.3
Y = SU2.basis[1] * 0.9


def f_nc(t):
    return np.cos(3.0 * t) * X + t * Y


def oracle(f, t_eval=None):
    def rhs(t, y):
        return (f(t) @ y.reshape(2, 2)).ravel()

    sol = solve_ivp(rhs, (0.0, 1.0), np.eye(2, dtype=complex).ravel(), method="DOP853",
                    rtol=1e-12, atol=1e-13, t_eval=t_eval)
    if t_eval is None:
        return sol.y[:, -1].reshape(2, 2)
    return np.moveaxis(sol.y.reshape(2, 2, -1), -1, 0)


def err(g, ref):
    return float(lg.distance(g, ref))


def test_constant_integrand_is_plain_exponential():
    for scheme in ("midpoint", "cf4"):
        g = integrate_callable(lambda t: X, 7, scheme)
        assert err(g, lg.expm(X)) < 1e-13


def test_commuting_linear_integrand_is_exact():
    # f(t) = t X: every step commutes, midpoint integrates linear terms exactly
    g = integrate_callable(lambda t: t * X, 5, "midpoint")
    assert err(g, lg.expm(0.5 * X)) < 1e-13


@pytest.mark.parametrize("scheme,n,tol,min_ratio", [
    ("midpoint", 32, 1e-3, 3.0),
    ("cf4", 16, 1e-6, 10.0),
])
def test_callable_schemes_converge_to_ode_oracle(scheme, n, tol, min_ratio):
    ref = oracle(f_nc)
    e_coarse = err(integrate_callable(f_nc, n // 2, scheme), ref)
    e_fine = err(integrate_callable(f_nc, n, scheme), ref)
    assert e_fine < tol
    assert e_coarse / e_fine > min_ratio


def test_sampled_cf4_is_fourth_order():
    ref = oracle(f_nc)
    errs = []
    for n in (8, 16, 32):
        t = np.linspace(0.0, 1.0, n + 1)
        vals = np.stack([f_nc(x) for x in t])
        errs.append(err(integrate_sampled(vals, 1.0 / n, "cf4"), ref))
    assert errs[-1] < 1e-6
    assert errs[0] / errs[1] > 10.0 and errs[1] / errs[2] > 10.0


def test_sampled_cumulative_tracks_the_solution():
    n = 32
    t = np.linspace(0.0, 1.0, n + 1)
    vals = np.stack([f_nc(x) for x in t])
    ref = oracle(f_nc, t_eval=t)
    for scheme, tol in (("midpoint", 1e-3), ("cf4", 1e-5)):
        cum = integrate_sampled(vals, 1.0 / n, scheme, cumulative=True)
        assert cum.shape == (n + 1, 2, 2)
        assert np.allclose(cum[0], np.eye(2))
        assert float(np.max(lg.distance(cum, ref))) < tol


def test_sampled_cf4_rejects_odd_step_counts():
    vals = np.zeros((4, 2, 2), dtype=complex)
    with pytest.raises(ConfigError):
        integrate_sampled(vals, 1.0 / 3, "cf4")


def test_batched_integrands_integrate_independently():
    def f(t):
        return np.stack([X, t * Y])

    g = integrate_callable(f, 8, "midpoint")
    assert g.shape == (2, 2, 2)
    assert err(g[0], lg.expm(X)) < 1e-13
    assert err(g[1], lg.expm(0.5 * Y)) < 1e-13


def test_ordered_exp_config_validates():
    with pytest.raises(ConfigError):
        OrderedExpConfig(steps=0)
    with pytest.raises(ConfigError):
        OrderedExpConfig(steps=4, scheme="euler")


def test_path_ordered_exp_returns_group_element():
    g = path_ordered_exp(f_nc, OrderedExpConfig(steps=64, scheme="cf4"), SU2)
    assert isinstance(g, GroupElement)
    assert err(g.matrix, oracle(f_nc)) < 1e-7
