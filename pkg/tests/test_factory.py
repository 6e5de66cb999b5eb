from fractions import Fraction

import pytest

from coneforms.cache import OperatorCache
from coneforms.factory import (OperatorSpec, apply_Q_direct, build_G, build_K,
                               build_L, build_M, build_Q, build_star_conjugate,
                               codiff_operator, d_operator,
                               form_laplacian_operator, get_context,
                               q_curvature_value, star_operator)
from coneforms.sliceops import SliceOperator
from coneforms.suites import built

CTX = get_context(4, 4, 0)


def L(cfg, k, ell):
    return built(cfg, "L", OperatorSpec(4, k, ell), lambda s: build_L(s))


def test_maxwell_instance(cfg4):
    dd = codiff_operator(CTX, 2).compose(d_operator(CTX, 1))
    c = L(cfg4, 1, 1).proportionality(dd)
    assert c == 8  # exact multiple; in particular zero lower-order part


def test_critical_power_instance(cfg4):
    lap2 = form_laplacian_operator(CTX, 0, 2)
    assert L(cfg4, 0, 2).proportionality(lap2) == 24  # (l+1)(n+2l)


def test_middle_degree_vanishes(cfg4):
    assert L(cfg4, 2, 0).is_zero()


def test_order_zero_instances(cfg4):
    assert L(cfg4, 1, 0).proportionality(
        SliceOperator.identity(CTX, 1)) == 2
    assert L(cfg4, 0, 0).proportionality(
        SliceOperator.identity(CTX, 0)) == 4


def test_negative_ell_family_vanishes(cfg4):
    assert build_L(OperatorSpec(4, 1, -1)).is_zero()
    assert build_K(-2).scalar == 0


def test_gauge_companion_relations(cfg4):
    G0 = built(cfg4, "G", OperatorSpec(4, 0, 2), lambda s: build_G(s))
    assert G0.is_zero()
    G2 = built(cfg4, "G", OperatorSpec(4, 2, 0), lambda s: build_G(s))
    assert G2.proportionality(codiff_operator(CTX, 2)) == 2
    G1 = built(cfg4, "G", OperatorSpec(4, 1, 1), lambda s: build_G(s))
    assert G1.order() == 3  # n - 2k + 1


def test_interlock_constants(cfg4):
    for k in (1, 2):
        Gk = built(cfg4, "G", OperatorSpec(4, k, 2 - k), lambda s: build_G(s))
        Gd = Gk.compose(d_operator(CTX, k - 1))
        Lkm1 = L(cfg4, k - 1, 3 - k)
        assert Lkm1.proportionality(Gd) == 8 - 2 * k  # n - 2k + 4


def test_q_operator_relations(cfg4):
    for k in (0, 1, 2):
        Qk = built(cfg4, "Q", OperatorSpec(4, k, 2 - k), lambda s: build_Q(s))
        Gk = built(cfg4, "G", OperatorSpec(4, k, 2 - k), lambda s: build_G(s))
        assert (codiff_operator(CTX, k).compose(Qk) - Gk).is_zero()
        assert (Qk.formal_adjoint() - Qk).is_zero()
    Q2 = built(cfg4, "Q", OperatorSpec(4, 2, 0), lambda s: build_Q(s))
    assert Q2.proportionality(SliceOperator.identity(CTX, 2)) == 2


def test_factorisation(cfg4):
    for k in (0, 1):
        Lk = L(cfg4, k, 2 - k)
        Mk = built(cfg4, "M", OperatorSpec(4, k, 2 - k), lambda s: build_M(s))
        dMd = codiff_operator(CTX, k + 1).compose(Mk).compose(
            d_operator(CTX, k))
        assert (Lk - dMd).is_zero()


def test_detour_complex_property(cfg4):
    for k in (0, 1):
        Lk = L(cfg4, k, 2 - k)
        if k >= 1:
            assert Lk.compose(d_operator(CTX, k - 1)).is_zero()
        assert codiff_operator(CTX, k).compose(Lk).is_zero()


def test_flat_q_curvature_vanishes(cfg4):
    assert q_curvature_value(CTX, CTX.scales["flat"]).is_zero()


def test_star_conjugate_annihilations(cfg4):
    Ls = built(cfg4, "Lstar", OperatorSpec(4, 3, 1),
               lambda s: build_star_conjugate(s))
    assert d_operator(CTX, 3).compose(Ls).is_zero()
    assert Ls.compose(codiff_operator(CTX, 4)).is_zero()


def test_cache_roundtrip(tmp_path):
    cache = OperatorCache(tmp_path)
    op = form_laplacian_operator(CTX, 1, 1)
    cache.store("lap11", op)
    loaded = cache.load("lap11", CTX)
    assert loaded is not None and (loaded - op).is_zero()
    # survives a second store byte-identically
    p1 = cache.path("lap11").read_bytes()
    cache.store("lap11", op)
    assert cache.path("lap11").read_bytes() == p1


def test_cache_detects_corruption(tmp_path):
    from coneforms.errors import CacheCorruption
    cache = OperatorCache(tmp_path)
    op = form_laplacian_operator(CTX, 0, 1)
    target = cache.store("lap01", op)
    text = target.read_text().replace("\"k_in\": 0", "\"k_in\": 1")
    target.write_text(text)
    with pytest.raises(CacheCorruption):
        cache.load("lap01", CTX)
    # the shared loader rebuilds transparently
    rebuilt = cache.load_or_build("lap01", CTX, lambda: op)
    assert (rebuilt - op).is_zero()
