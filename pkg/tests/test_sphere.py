from fractions import Fraction

import pytest

from coneforms.errors import EigenvalueConventionMismatch
from coneforms.sphere import (curvature_invariants, hp_audit,
                              q_omega_eigenvalue, u_eigenvalue_closed_form,
                              U_eigenvalue)


def test_block_curvature_small_dimensions():
    g4 = curvature_invariants(4)
    assert (g4.p, g4.q) == (1, 3)
    assert g4.scalar == 6 and g4.J == 1
    g6 = curvature_invariants(6)
    assert g6.scalar == 14 and g6.J == Fraction(7, 5)


def test_closed_form_cross_check():
    # J = (n^2 - 2n + 4) / (4(n-1)) is validated inside the constructor
    assert curvature_invariants(4).J == Fraction(16 - 8 + 4, 12)


def test_u_eigenvalues():
    assert U_eigenvalue(4, 1, 0) == 8
    assert U_eigenvalue(4, 0, 1) == 0
    assert U_eigenvalue(6, 1, 1) == Fraction(16, 5)
    assert U_eigenvalue(8, 0, 3) == Fraction(-8, 7)


def test_u_rejects_bad_bidegree():
    with pytest.raises(ValueError):
        U_eigenvalue(4, 0, 0)


def test_parallel_form_eigenvalue():
    assert q_omega_eigenvalue(4) == 2
    assert q_omega_eigenvalue(6) == Fraction(9, 5)


def test_audit_range():
    for n in (4, 6, 8, 10, 12):
        recs = hp_audit(n)
        assert recs and all(r.passed for r in recs)
        mins = [r for r in recs if "min4u" in r.check_id]
        assert mins and mins[0].constants["min4U"] > -2


def test_closed_form_matches_engine_everywhere():
    for n in (4, 6, 8, 10, 12):
        p = n // 2 - 1
        for r in range(0, p + 1):
            assert U_eigenvalue(n, r, p - r) == u_eigenvalue_closed_form(n, r)
