from fractions import Fraction

import pytest

from coneforms.ambient import AmbientContext, eps_x, ext_d, iota_x, mul_q, wedge
from coneforms.cone import (GClass, cone_pullback, decompose_G, default_scales,
                            expected_splitting_constant, fside_normalize,
                            lift, make_Y, restrict, scale_rf,
                            splitting_constant, tilde_d, tilde_delta,
                            validate_constant_curvature, _random_slice_form)
from coneforms.conealg import reduce_form_mod_cone
from coneforms.errors import DegenerateScale
from coneforms.sliceops import SliceForm, slice_codiff, slice_d
from coneforms.trials import child_rng, random_form, random_weighted_form


@pytest.fixture(scope="module")
def ctx():
    c = AmbientContext(4, 4, 0)
    default_scales(c)
    return c


def test_flat_y_tractor(ctx):
    Y = make_Y(ctx, ctx.scales["flat"])
    t_inv = ctx.rf(1).divide_by_factor("t")
    assert Y == ctx.one_form({ctx.T: t_inv})


def test_sphere_y_invariants(ctx):
    # make_Y validates X.Y = 1 and Y.Y = 0 along the cone internally
    make_Y(ctx, ctx.scales["sphere"])


def test_scale_curvature_is_constant(ctx):
    lam, J = validate_constant_curvature(ctx, ctx.scales["sphere"])
    assert lam == Fraction(1, 2) and J == Fraction(2)
    lam0, J0 = validate_constant_curvature(ctx, ctx.scales["flat"])
    assert lam0 == 0 and J0 == 0


def test_lift_properties(ctx):
    rng = child_rng(3, "lift")
    for (k, w) in [(0, 0), (1, 1), (2, -1)]:
        u = _random_slice_form(ctx, rng, k, max_deg=3)
        U = lift(u, w)
        assert iota_x(U).is_zero()
        assert (restrict(U) - u).is_zero()
        if not U.is_zero():
            assert U.weight() == w - k


def test_lift_of_constant_is_constant(ctx):
    one = SliceForm(ctx, 0, {(): ctx.rf(1)})
    assert lift(one, 0) == ctx.scalar(ctx.rf(1))


def test_lift_of_coordinate_one_form(ctx):
    # dx1 at weight 1 lifts to dx1 - (x1/t) dt
    u = SliceForm(ctx, 1, {(1,): ctx.rf(1)})
    U = lift(u, 1)
    t_inv = ctx.rf(1).divide_by_factor("t")
    expected = ctx.one_form({1: ctx.rf(1),
                             ctx.T: -ctx.rf_var(1) * t_inv}).scale(
        ctx.rf_var(ctx.T)) .map_coeffs(lambda c: c * t_inv)
    assert (U - expected).is_zero()


def test_restrict_kills_ideal(ctx):
    rng = child_rng(5, "ideal")
    F = random_form(ctx, rng, 1, max_deg=2)
    assert restrict(mul_q(F)).is_zero()
    assert restrict(eps_x(F)).is_zero()


def test_gclass_well_defined_and_square_zero(ctx):
    rng = child_rng(7, "gclass")
    V = random_weighted_form(ctx, rng, 1, -1, min_num_deg=2, sparse=3)
    H = random_weighted_form(ctx, rng, 1, -3, min_num_deg=2, sparse=2)
    G2 = random_weighted_form(ctx, rng, 0, -2, min_num_deg=2)
    other = V + mul_q(H) + eps_x(G2)
    assert GClass(V) == GClass(other)
    assert tilde_d(GClass(V)) == tilde_d(GClass(other))
    assert tilde_d(tilde_d(GClass(V))).is_zero()


def test_tilde_delta_squares_to_zero(ctx):
    rng = child_rng(9, "tds")
    W = random_weighted_form(ctx, rng, 3, -2, min_num_deg=3, sparse=3)
    F = iota_x(W)  # exactly annihilated by i(X)
    out = tilde_delta(ctx, tilde_delta(ctx, F))
    assert reduce_form_mod_cone(ctx, out).is_zero()


def test_commutation_with_descended_differential(ctx):
    rng = child_rng(11, "dq")
    for k in (0, 1):
        u = _random_slice_form(ctx, rng, k, max_deg=3)
        lhs = GClass(ext_d(lift(u, 0)))
        rhs = GClass(lift(slice_d(u), 0))
        assert lhs == rhs
    for k in (0, 1):
        W = random_weighted_form(ctx, rng, k + 2, k - 4, min_num_deg=3,
                                 sparse=3)
        F = iota_x(W)
        assert (restrict(tilde_delta(ctx, F)) -
                slice_codiff(restrict(F))).is_zero()


def test_decomposition_reproduces_component_law(ctx):
    rng = child_rng(13, "tdform")
    Y = make_Y(ctx, ctx.scales["flat"])
    for (k, w) in [(1, 0), (1, 2), (2, -1)]:
        V = random_weighted_form(ctx, rng, k, w - k, min_num_deg=3, sparse=3)
        alpha, mu = decompose_G(V, Y, w)
        alpha2, mu2 = decompose_G(ext_d(V), Y, w)
        assert (mu2 - slice_d(mu)).is_zero()
        assert (alpha2 - (mu.scale(w) - slice_d(alpha))).is_zero()


def test_decomposition_examples(ctx):
    rng = child_rng(15, "dex")
    Y = make_Y(ctx, ctx.scales["flat"])
    u = _random_slice_form(ctx, rng, 1, max_deg=2)
    alpha, mu = decompose_G(lift(u, 1), Y, 1)
    assert alpha.is_zero() and (mu - u).is_zero()
    v = _random_slice_form(ctx, rng, 0, max_deg=2)
    U = wedge(Y, lift(v, 1))
    alpha, mu = decompose_G(U, Y, 1)
    assert (alpha - v).is_zero() and mu.is_zero()


def test_codifferential_component_law(ctx):
    rng = child_rng(17, "dtform")
    Y = make_Y(ctx, ctx.scales["flat"])
    n = ctx.n
    for (k, w) in [(1, 0), (1, 2), (2, -1)]:
        mu = _random_slice_form(ctx, rng, k + 1, max_deg=3)
        rho = _random_slice_form(ctx, rng, k, max_deg=3)
        M = lift(mu, -w + 2 * (k + 1) - n)
        R = lift(rho, -w + 2 * k - n)
        F = fside_normalize(ctx, M + eps_x(R))
        assert iota_x(F).is_zero()
        dF = tilde_delta(ctx, F)
        mu2 = restrict(dF)
        from coneforms.ambient import iota_form
        rho2 = restrict(iota_form(Y, dF))
        assert (mu2 - (rho.scale(w) + slice_codiff(mu))).is_zero()
        assert (rho2 + slice_codiff(rho)).is_zero()


def test_first_order_euler_identity(ctx):
    # i(X) d lift = w * lift for w != 0
    rng = child_rng(19, "euler")
    for (k, w) in [(1, 2), (0, 3)]:
        u = _random_slice_form(ctx, rng, k, max_deg=3)
        U = lift(u, w)
        assert (iota_x(ext_d(U)) - U.scale(w)).is_zero()


def test_splitting_constants(ctx):
    assert splitting_constant(ctx, 1, 1) == 8
    assert splitting_constant(ctx, 1, 1) == expected_splitting_constant(4, 1, 1)
    assert splitting_constant(ctx, 3, 1) == 0  # k = l + n/2
    assert splitting_constant(ctx, 1, 0) == 2
    assert splitting_constant(ctx, 0, 0) == 4


def test_differential_splitting_of_the_surjection(ctx):
    # for w != 0 the Z-part of d lift recovers w * u
    rng = child_rng(21, "split")
    Y = make_Y(ctx, ctx.scales["flat"])
    u = _random_slice_form(ctx, rng, 1, max_deg=3)
    w = 2
    dU = ext_d(lift(u, w))
    alpha, mu = decompose_G(dU, Y, w)
    assert (alpha - u.scale(w)).is_zero()


def test_scale_registry_file(tmp_path, ctx):
    from coneforms.cone import load_scale_registry
    reg = tmp_path / "scales.cfg"
    reg.write_text("curve2 = -2\n# comment line\n", encoding="utf-8")
    scales = load_scale_registry(reg, ctx)
    assert len(scales) == 1 and scales[0].c == Fraction(-2)
    lam, J = validate_constant_curvature(ctx, scales[0])
    assert lam == 2  # lambda = -c for this family
    bad = tmp_path / "bad.cfg"
    bad.write_text("x = not-a-number\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_scale_registry(bad, ctx)


def test_descended_differentials_are_mutual_adjoints(ctx):
    # block components of the descended differential on (alpha, mu) are
    # (w*mu - d alpha, d mu); of the codifferential on (nu, rho) are
    # (w*rho + delta nu, -delta rho).  Under the pairing mu.nu + alpha.rho
    # the blocks are exact formal adjoints of one another.
    from coneforms.factory import codiff_operator, d_operator
    from coneforms.sliceops import SliceOperator
    w = 2
    k = 1
    n = ctx.n
    # transpose-adjoint relations, entry by entry
    d_alpha = d_operator(ctx, k - 1).scale(-1)          # alpha' | alpha
    rho_rho = codiff_operator(ctx, k).scale(-1)         # rho'   | rho
    assert (d_alpha.formal_adjoint() - rho_rho).is_zero()
    d_mu = d_operator(ctx, k)                            # mu' | mu
    nu_nu = codiff_operator(ctx, k + 1)                  # nu' | nu
    assert (d_mu.formal_adjoint() - nu_nu).is_zero()
    w_mu = SliceOperator.identity(ctx, k).scale(w)       # alpha' | mu
    nu_rho = SliceOperator.identity(ctx, k).scale(w)     # nu' | rho
    assert (w_mu.formal_adjoint() - nu_rho).is_zero()
