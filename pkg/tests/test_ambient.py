from fractions import Fraction

import pytest

from coneforms.ambient import (AmbientContext, AmbientForm, OpExpr, bochner,
                               certify_bochner, codiff, eps_dir, eps_x, ext_d,
                               euler_op, form_lap, iota_dir, iota_form,
                               iota_x, lie_x, lie_x_star, mul_q, wedge)
from coneforms.errors import Inhomogeneous
from coneforms.identities import bochner_equals_form_lap
from coneforms.trials import child_rng, random_form, random_weighted_form

CTX = AmbientContext(4, 4, 0)


def test_quadric_differential_and_laplacian():
    Q = CTX.scalar(CTX.Q_rf)
    dQ = ext_d(Q)
    two_x = CTX.X_one_form.scale(2)
    assert (dQ - two_x).is_zero()
    lap = form_lap(Q)
    assert lap.component(()) == CTX.rf(-2 * (CTX.n + 2))


def test_interior_product_on_dt():
    dt = CTX.one_form({CTX.T: CTX.rf(1)})
    assert iota_x(dt).component(()) == CTX.rf_var(CTX.T)


def test_euler_identity_on_powers():
    t3 = CTX.scalar(CTX.rf_var(CTX.T) * CTX.rf_var(CTX.T) * CTX.rf_var(CTX.T))
    lie = iota_x(ext_d(t3)) + ext_d(iota_x(t3))
    assert (lie - t3.scale(3)).is_zero()


def test_lap_q_commutator_value():
    t2 = CTX.scalar(CTX.rf_var(CTX.T) * CTX.rf_var(CTX.T))
    comm = form_lap(mul_q(t2)) - mul_q(form_lap(t2))
    assert (comm - t2.scale(-20)).is_zero()  # -2(2w + n + 2) at w=2, n=4


def test_differential_squares_to_zero():
    rng = child_rng(3, "dd")
    for k in (0, 1, 2):
        F = random_form(CTX, rng, k, max_deg=3)
        assert ext_d(ext_d(F)).is_zero()
        assert codiff(codiff(F)).is_zero()


def test_wedge_contraction_duality():
    rng = child_rng(5, "pair")
    omega = random_form(CTX, rng, 1, max_deg=1)
    F = random_form(CTX, rng, 2, max_deg=2)
    # {e(w), i(w)} = |w|^2 as multiplication operators
    lhs = iota_form(omega, wedge(omega, F)) + wedge(omega, iota_form(omega, F))
    norm2 = iota_form(omega, omega).component(())
    assert (lhs - F.scale(norm2)).is_zero()


def test_weight_bookkeeping_of_dirac_pair():
    rng = child_rng(9, "wshift")
    F = random_weighted_form(CTX, rng, 2, 1, min_num_deg=3)
    up = eps_dir(F)
    dn = iota_dir(F)
    assert up.degree == 3 and up.weight() == 0
    assert dn.degree == 1 and dn.weight() == 0


def test_weight_raises_on_mixed_input():
    mixed = CTX.scalar(CTX.rf_var(CTX.T) + CTX.rf(1))
    with pytest.raises(Inhomogeneous):
        mixed.weight()


def test_bochner_certificate_and_random_agreement():
    certify_bochner(CTX, 2)
    rng = child_rng(11, "boch")
    for k in (0, 1, 3):
        F = random_form(CTX, rng, k, max_deg=3)
        assert bochner_equals_form_lap(F)


def test_indefinite_signature_tables_still_close():
    ctx = AmbientContext(4, 3, 1)
    rng = child_rng(13, "sig")
    F = random_form(ctx, rng, 1, max_deg=3)
    anti = iota_x(eps_x(F)) + eps_x(iota_x(F))
    assert (anti - mul_q(F)).is_zero()
    lap_q = form_lap(mul_q(F)) - mul_q(form_lap(F))
    kx = lie_x(F) - lie_x_star(F)
    assert (lap_q + kx.scale(2)).is_zero()


def test_opexpr_bookkeeping_and_checked_apply():
    expr = OpExpr.of("IotaX", "FormLap", "EpsX")
    assert expr.degree_shift() == 0
    assert expr.weight_shift() == 0
    assert expr.order_bound() == 2
    rng = child_rng(15, "expr")
    F = random_weighted_form(CTX, rng, 1, -2, min_num_deg=3)
    out = expr.checked_apply(F)
    assert out.degree == 1
