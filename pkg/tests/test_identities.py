import pytest

from coneforms.ambient import AmbientContext, OpExpr
from coneforms.conealg import reduce_form_mod_cone
from coneforms.identities import (check_dd0, check_domino,
                                  check_lap_power_commutator,
                                  check_superalgebra, check_tangential,
                                  lap_power_commutator_scalar)
from coneforms.trials import child_rng, random_weighted_form


def test_superalgebra_all_entries_n4():
    recs = check_superalgebra(4, 4, 0, seed=7, trials=2)
    assert len(recs) == 48
    assert all(r.passed for r in recs)


def test_superalgebra_indefinite_signature():
    recs = check_superalgebra(4, 3, 1, seed=11, trials=1)
    assert all(r.passed for r in recs)


@pytest.fixture(scope="module")
def ctx():
    return AmbientContext(4, 4, 0)


def test_dirac_pair_identities(ctx):
    for (k, w) in [(0, 0), (2, 1)]:
        recs = check_dd0(ctx, k, w, seed=3, trials=3)
        assert all(r.passed for r in recs)


def test_ladder_identities(ctx):
    for ell in (0, 1, 2):
        recs = check_domino(ctx, ell, 1, seed=5, trials=2)
        assert all(r.passed for r in recs)


def test_power_commutator_scalar(ctx):
    r = check_lap_power_commutator(ctx, 1, 2, seed=3, trials=2)
    assert r.passed and r.constants["c"] == -20
    assert lap_power_commutator_scalar(4, 2, -2) == 0


def test_tangentiality_weights(ctx):
    lap = OpExpr.of("FormLap")
    ok, _, _ = check_tangential(ctx, lap, 1, -3, seed=11, trials=2)
    assert ok
    ok, _, _ = check_tangential(ctx, lap, 1, 0, seed=11, trials=2)
    assert not ok
    for tag in ("EpsDir", "IotaDir"):
        ok, _, _ = check_tangential(ctx, OpExpr.of(tag), 1, 1, seed=11,
                                    trials=2)
        assert ok


def test_off_weight_residue_matches_commutator_scalar(ctx):
    # Lap(Q F) reduces to the commutator scalar times F along the cone
    from coneforms.ambient import form_lap, mul_q
    rng = child_rng(13, "resid")
    w = 1
    c = lap_power_commutator_scalar(4, 1, w)
    F = random_weighted_form(ctx, rng, 1, w, min_num_deg=3, sparse=2)
    resid = reduce_form_mod_cone(ctx, form_lap(mul_q(F)) - F.scale(c))
    assert resid.is_zero()


def test_tangential_composition_property(ctx):
    # a robust tangential operator composed onto a fragile one at its
    # critical weight stays tangential
    w = 1 - 2 - 2  # Lap tangential at this cofactor weight
    inner_ok, _, _ = check_tangential(ctx, OpExpr.of("FormLap"), 1, w, 3, 2)
    assert inner_ok
    for outer in ("EpsDir", "IotaDir"):
        comp = OpExpr.of(outer, "FormLap")
        ok, _, _ = check_tangential(ctx, comp, 1, w, seed=3, trials=2)
        assert ok
