import time

from coneforms.suites import (SuiteConfig, suite_detour, suite_q_operators,
                              suite_star, suite_symbols)

cfg = SuiteConfig(n=6, seed=7, trials=8, cache_dir=".coneforms-cache")
for name, fn in [("detour", suite_detour), ("q-operators", suite_q_operators),
                 ("symbols", suite_symbols), ("star", suite_star)]:
    t0 = time.time()
    try:
        recs = fn(cfg)
    except Exception as e:
        print(f"== {name}: EXCEPTION {type(e).__name__}: {e}", flush=True)
        import traceback
        traceback.print_exc()
        continue
    bad = [r for r in recs if not r.passed]
    print(f"== {name}: {len(recs)} checks, {len(bad)} failed, "
          f"{time.time()-t0:.0f}s", flush=True)
    for r in bad:
        print("   FAIL", r.check_id, "|", (r.witness or "")[:160], "|",
              r.constants, flush=True)
