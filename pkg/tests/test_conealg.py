from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coneforms.ambient import AmbientContext
from coneforms.conealg import (divide_exact_by_Q, reduce_mod_cone,
                               subs_slice)
from coneforms.errors import NotDivisible
from coneforms.poly import MultiPoly
from coneforms.ratfunc import RationalFunction

N = 4
CTX = AmbientContext(N, N, 0)


def rf(p: MultiPoly) -> RationalFunction:
    return RationalFunction.from_poly(CTX.table, p)


@st.composite
def small_polys(draw):
    nterms = draw(st.integers(1, 4))
    terms = {}
    for _ in range(nterms):
        e = tuple(draw(st.integers(0, 2)) for _ in range(CTX.nvars))
        c = draw(st.integers(-5, 5))
        if c:
            terms[e] = Fraction(c)
    return MultiPoly(CTX.nvars, terms)


def test_defining_relation_reduces_to_zero():
    assert reduce_mod_cone(CTX, CTX.Q_rf).is_zero()


def test_rho_reduces_to_solved_form():
    rho = CTX.rf_var(CTX.RHO)
    expected = rf(-CTX.S_poly) * CTX.rf(1).divide_by_factor("t") * \
        Fraction(1, 2)
    assert reduce_mod_cone(CTX, rho) == expected


def test_hand_reduction_of_combined_term():
    # t*rho + Q reduces to +S/2 - S = -S/2
    t_rho = CTX.rf_var(CTX.T) * CTX.rf_var(CTX.RHO)
    out = reduce_mod_cone(CTX, t_rho + CTX.Q_rf)
    assert out == rf(CTX.S_poly).__mul__(Fraction(-1, 2))


def test_divide_exact_by_Q_examples():
    assert divide_exact_by_Q(CTX, CTX.Q_poly * CTX.Q_poly) == CTX.Q_poly
    x1 = MultiPoly.var(CTX.nvars, 1)
    assert divide_exact_by_Q(CTX, CTX.Q_poly * x1) == x1
    with pytest.raises(NotDivisible):
        divide_exact_by_Q(CTX, x1)


@settings(max_examples=40, deadline=None)
@given(small_polys(), small_polys())
def test_reduction_is_an_algebra_morphism(p, q):
    a = reduce_mod_cone(CTX, rf(p) * rf(q))
    b = reduce_mod_cone(CTX, rf(p)) * reduce_mod_cone(CTX, rf(q))
    assert reduce_mod_cone(CTX, a - b).is_zero()
    assert a.cross_equal(b) or (a - b).is_zero()


@settings(max_examples=40, deadline=None)
@given(small_polys())
def test_quotient_roundtrip(p):
    assert divide_exact_by_Q(CTX, CTX.Q_poly * p) == p


@settings(max_examples=30, deadline=None)
@given(small_polys(), small_polys())
def test_degree_additivity(p, q):
    hp = p.homogeneous_degree()
    hq = q.homogeneous_degree()
    if hp is None or hq is None or p.is_zero() or q.is_zero():
        return
    assert rf(p * q).homogeneous_degree() == hp + hq


def test_slice_substitution():
    # t -> 1, rho -> -S/2
    t = CTX.rf_var(CTX.T)
    rho = CTX.rf_var(CTX.RHO)
    assert subs_slice(CTX, t) == CTX.rf(1)
    assert subs_slice(CTX, rho) == rf(CTX.S_poly) * Fraction(-1, 2)
    assert subs_slice(CTX, CTX.Q_rf).is_zero()
