from fractions import Fraction

import pytest

from coneforms.ambient import AmbientContext
from coneforms.cone import default_scales
from coneforms.errors import ChartViolation, Inhomogeneous
from coneforms.poly import MultiPoly
from coneforms.ratfunc import RationalFunction, T_FACTOR


@pytest.fixture()
def ctx():
    c = AmbientContext(4, 4, 0)
    default_scales(c)
    return c


def test_reduction_cancels_registered_factors(ctx):
    t = ctx.rf_var(ctx.T)
    x1 = ctx.rf_var(1)
    f = (t * x1).divide_by_factor(T_FACTOR)
    assert f == x1
    g = (t * t * x1).divide_by_factor(T_FACTOR, 2)
    assert g == x1


def test_add_with_mixed_denominators(ctx):
    t_inv = ctx.rf(1).divide_by_factor(T_FACTOR)
    one = ctx.rf(1)
    s = t_inv + one
    # (1 + t)/t
    num = MultiPoly.const(ctx.nvars, 1) + MultiPoly.var(ctx.nvars, ctx.T)
    assert s == RationalFunction(ctx.table, num, {T_FACTOR: 1})
    assert (s - t_inv) == one


def test_derivative_quotient_rule(ctx):
    t_inv = ctx.rf(1).divide_by_factor(T_FACTOR)
    d = t_inv.deriv(ctx.T)
    assert d == ctx.rf(-1).divide_by_factor(T_FACTOR, 2)
    x1 = ctx.rf_var(1)
    f = x1 * t_inv
    # d/dt (x1/t) = -x1/t^2
    assert f.deriv(ctx.T) == (-x1).divide_by_factor(T_FACTOR, 2)
    assert f.deriv(1) == t_inv


def test_division_by_registered_scale(ctx):
    from coneforms.cone import scale_rf
    sigma = scale_rf(ctx, ctx.scales["sphere"])
    f = sigma * ctx.rf_var(1)
    assert f / sigma == ctx.rf_var(1)
    with pytest.raises(ChartViolation):
        _ = ctx.rf(1) / (ctx.rf_var(1) + ctx.rf(1))


def test_homogeneous_degree(ctx):
    t = ctx.rf_var(ctx.T)
    assert (t * t).homogeneous_degree() == 2
    assert ctx.Q_rf.homogeneous_degree() == 2
    assert (ctx.rf_var(1) / t).homogeneous_degree() == 0
    with pytest.raises(Inhomogeneous):
        (t + ctx.rf(1)).homogeneous_degree()
    # Euler cross-check: E f = w f
    f = ctx.rf_var(1) / t
    assert (f.euler_applied() - f * 0).is_zero()
    g = ctx.Q_rf
    assert (g.euler_applied() - g * 2).is_zero()


def test_cross_equality_independent_of_form(ctx):
    t = ctx.rf_var(ctx.T)
    a = ctx.rf_var(1) / t
    b = (ctx.rf_var(1) * t).divide_by_factor(T_FACTOR, 2)
    assert a == b
    assert a.cross_equal(b)
