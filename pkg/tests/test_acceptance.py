"""Acceptance gate: every criterion runs at tolerance zero.

Each test prints one PASS/FAIL line (visible under ``pytest -s``); the
assertions carry the failing check ids.  Built operators are shared
through the repository-local cache, so a warm second run is fast.
"""

import json
import time

import pytest

from coneforms.cli import main as cli_main
from coneforms.suites import (SuiteConfig, suite_detour, suite_order_n,
                              suite_q_operators, suite_sphere, suite_star,
                              suite_superalgebra, suite_symbols,
                              suite_tangential)

CACHE = ".coneforms-cache"


def _report(name: str, records, budget: float | None, elapsed: float):
    bad = [r.check_id for r in records if not r.passed]
    status = "PASS" if not bad else "FAIL"
    extra = f" ({elapsed:.0f}s" + (f" / budget {budget:.0f}s)" if budget
                                   else ")")
    print(f"ACCEPTANCE {status}: {name}{extra}")
    assert not bad, f"{name}: failing checks {bad[:10]}"
    if budget is not None:
        assert elapsed < budget, f"{name}: {elapsed:.0f}s over budget"
    return records


def test_criterion_1_superalgebra():
    t0 = time.time()
    records = []
    for (n, p, q) in [(4, 4, 0), (4, 3, 1), (6, 6, 0)]:
        cfg = SuiteConfig(n=n, p=p, q=q, seed=7, trials=8, cache_dir=CACHE)
        records.extend(suite_superalgebra(cfg))
    _report("1 operator-algebra tables, three signatures, degrees 0..n+2",
            records, 60, time.time() - t0)


def test_criterion_2_tangential():
    t0 = time.time()
    records = []
    for n in (4, 6):
        cfg = SuiteConfig(n=n, seed=7, trials=8, cache_dir=CACHE)
        records.extend(suite_tangential(cfg))
    _report("2 tangentiality, Dirac-pair and ladder identities, n in {4,6}",
            records, 120, time.time() - t0)


def test_criterion_3_operator_identities_n4():
    t0 = time.time()
    cfg = SuiteConfig(n=4, seed=7, trials=8, cache_dir=CACHE)
    _report("3 operator identities at n = 4", suite_detour(cfg), 300,
            time.time() - t0)


@pytest.mark.slow
def test_criterion_4_operator_identities_n6():
    t0 = time.time()
    cfg = SuiteConfig(n=6, seed=7, trials=8, cache_dir=CACHE)
    _report("4 operator identities at n = 6", suite_detour(cfg), 1800,
            time.time() - t0)


@pytest.mark.slow
def test_criterion_5_and_6_conformal_laws_and_values():
    t0 = time.time()
    records = []
    for n in (4, 6):
        cfg = SuiteConfig(n=n, seed=7, trials=8, cache_dir=CACHE)
        records.extend(suite_q_operators(cfg))
    _report("5+6 conformal transformation laws and curvature values",
            records, None, time.time() - t0)


def test_criterion_7_symbol_grid():
    t0 = time.time()
    records = []
    for n in (4, 6):
        cfg = SuiteConfig(n=n, seed=7, trials=8, cache_dir=CACHE)
        records.extend(suite_symbols(cfg))
        records.extend(suite_star(cfg))
    _report("7 symbol grid, exactness ranks and ellipticity witnesses",
            records, 120, time.time() - t0)


@pytest.mark.slow
def test_criterion_8_order_n():
    t0 = time.time()
    cfg = SuiteConfig(n=4, seed=7, trials=8, cache_dir=CACHE)
    _report("8 order-n operator and splitting degeneracies at n = 4",
            suite_order_n(cfg), None, time.time() - t0)


def test_criterion_9_sphere_audit():
    t0 = time.time()
    cfg = SuiteConfig(n=4, seed=7, trials=8, cache_dir=CACHE,
                      sphere_ns=(4, 6, 8, 10, 12))
    _report("9 product-sphere eigenvalue audit, n in {4..12}",
            suite_sphere(cfg), 10, time.time() - t0)


def test_criterion_10_determinism(tmp_path, capsys):
    t0 = time.time()
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        code = cli_main(["verify", "--suite", "sphere-audit", "--format",
                         "json", "--seed", "7",
                         "--output", str(d / "report.json"),
                         "--cache-dir", str(d)])
        assert code == 0
        cli_main(["build", "--n", "4", "--k", "1", "--ell", "1",
                  "--cache-dir", str(d)])
        outs.append(d)
    capsys.readouterr()
    ra = (outs[0] / "report.json").read_bytes()
    rb = (outs[1] / "report.json").read_bytes()
    ok = ra == rb
    ca = next(outs[0].glob("L_*.json"))
    cb = outs[1] / ca.name
    ok = ok and ca.read_bytes() == cb.read_bytes()
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {status}: 10 byte-identical reports and cache files "
          f"({time.time() - t0:.0f}s)")
    assert ok
