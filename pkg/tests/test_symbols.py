from fractions import Fraction

import pytest

from coneforms.factory import (OperatorSpec, build_G, build_L, build_Q,
                               d_operator, get_context)
from coneforms.suites import built, _injective_witness, _surjective_witness
from coneforms.symbols import (block_decompose, certifying_covectors,
                               classify, eps_xi_matrix, expected_class,
                               iota_xi_matrix, mat_add, mat_mul, mat_rank,
                               mat_scale, principal_symbol, xi_norm2)
from coneforms.sliceops import slice_keys

CTX = get_context(4, 4, 0)


def test_symbol_of_differential_is_exterior_multiplication():
    d1 = d_operator(CTX, 1)
    for xi in certifying_covectors(4, 7)[:6]:
        assert principal_symbol(d1, xi).mat == eps_xi_matrix(4, 1, xi)


def test_projections_are_complementary():
    for xi in certifying_covectors(4, 7)[:6]:
        n2 = xi_norm2(xi)
        for k in (0, 1, 2, 3, 4):
            p1 = mat_scale(mat_mul(iota_xi_matrix(4, k + 1, xi),
                                   eps_xi_matrix(4, k, xi)), 1 / n2)
            p2 = mat_scale(mat_mul(eps_xi_matrix(4, k - 1, xi),
                                   iota_xi_matrix(4, k, xi)), 1 / n2)
            ident = {(key, key): Fraction(1) for key in slice_keys(4, k)}
            assert mat_add(p1, p2) == ident
            assert mat_mul(p1, p1) == p1 and mat_mul(p2, p2) == p2
            assert not mat_mul(p1, p2) and not mat_mul(p2, p1)


def test_classification_examples(cfg4):
    # middle-weight member on 1-forms at n=4 degenerates
    L11 = built(cfg4, "L", OperatorSpec(4, 1, 1), lambda s: build_L(s))
    assert classify(L11).tag == "NonElliptic"
    # the function member is positively elliptic
    L02 = built(cfg4, "L", OperatorSpec(4, 0, 2), lambda s: build_L(s))
    assert classify(L02).tag == "PositivelyElliptic"


def test_expected_grid_values():
    assert expected_class(4, 1, 1) == "NonElliptic"
    assert expected_class(6, 1, 1) == "PositivelyElliptic"
    assert expected_class(6, 3, 1) == "Elliptic"  # w = 1, k inside the band
    assert expected_class(6, 2, 1) == "NonElliptic"  # w = 0
    # end-degree refinement: single-block symbols are definite
    assert expected_class(4, 0, 2) == "PositivelyElliptic"
    assert expected_class(4, 4, 2) == "PositivelyElliptic"


def test_block_ratio_matches_grid():
    n = 6
    # ratio of block eigenvalues is (n-2k+2l) : (n-2k-2l)
    ctx6 = get_context(6, 6, 0)
    L11 = build_L(OperatorSpec(6, 1, 1))
    xi = certifying_covectors(6, 7)[0]
    be = block_decompose(principal_symbol(L11, xi))
    assert be.lam1 * Fraction(n - 2 - 2) == be.lam2 * Fraction(n - 2 + 2)


def test_rank_computation():
    xi = certifying_covectors(4, 7)[0]
    e = eps_xi_matrix(4, 0, xi)
    assert mat_rank(e, slice_keys(4, 1), slice_keys(4, 0)) == 1
    i1 = iota_xi_matrix(4, 1, xi)
    assert mat_rank(i1, slice_keys(4, 0), slice_keys(4, 1)) == 1


def test_witnesses_at_n4(cfg4):
    covs = certifying_covectors(4, 7)[:5]
    for k in (0, 1):
        ell = 2 - k
        Lk = built(cfg4, "L", OperatorSpec(4, k, ell), lambda s: build_L(s))
        Gk = built(cfg4, "G", OperatorSpec(4, k, ell), lambda s: build_G(s))
        Qk = built(cfg4, "Q", OperatorSpec(4, k, ell), lambda s: build_Q(s))
        ap, bp = _injective_witness(4, k, ell, Lk, Gk, covs)
        assert Lk.is_zero() or (ap, bp) != (0, 0)
        alpha = _surjective_witness(4, k, ell, Qk, covs, CTX)
        assert alpha is not None
