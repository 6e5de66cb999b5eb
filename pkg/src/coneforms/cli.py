"""Command-line entry point.

Subcommands:
  verify  run one or more verification suites and emit a report
  build   build one operator, cache it and print its normal form
  report  re-render a saved JSON report as text
  cache   list or clear the operator cache

Configuration comes from an optional UTF-8 key=value file with [section]
headers; every key can be overridden by the command-line flag of the same
name.  Only the cache directory may come from the environment
(CONEFORMS_CACHE_DIR).  Exit codes: 0 all checks passed, 1 at least one
check failed, 2 configuration or environment error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from fractions import Fraction
from pathlib import Path

from .cache import OperatorCache, default_cache_dir
from .errors import ConfigError, EngineError
from .factory import (OperatorSpec, build_G, build_L, build_M, build_Q,
                      build_order_n, build_star_conjugate, get_context)
from .report import ReportDocument
from .suites import SUITES, SuiteConfig, run_suites

FAMILIES = {
    "L": build_L,
    "G": build_G,
    "Q": build_Q,
    "M": build_M,
    "order-n": build_order_n,
    "star": build_star_conjugate,
}


def _read_config_file(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    parser = configparser.ConfigParser()
    parser.optionxform = str
    target = Path(path)
    if not target.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with target.open(encoding="utf-8") as fh:
            parser.read_string("[default]\n" + fh.read())
    except (configparser.Error, UnicodeDecodeError) as e:
        raise ConfigError(f"malformed config file: {e}")
    merged: dict[str, str] = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            merged[key] = value
    return merged


def _parse_signature(text: str, n: int) -> tuple[int, int]:
    try:
        p, q = (int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"bad signature {text!r}; expected 'p,q'")
    if p + q != n or p < 0 or q < 0:
        raise ConfigError(f"signature {p},{q} incompatible with n={n}")
    return p, q


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="coneforms",
        description="Exact verification engine for conformally invariant "
                    "operators on differential forms.")
    ap.add_argument("--config", default=None,
                    help="key=value configuration file")
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="key=value configuration file")
    common.add_argument("--n", type=int, default=None)
    common.add_argument("--signature", default=None,
                        help="slice signature as 'p,q' (default n,0)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--cache-dir", default=None)
    common.add_argument("--format", choices=("text", "json"), default=None)

    vp = sub.add_parser("verify", parents=[common],
                        help="run verification suites")
    vp.add_argument("--suite", action="append", default=None,
                    choices=sorted(SUITES) + ["all"],
                    help="suite name (repeatable); default all")
    vp.add_argument("--sphere-ns", default=None,
                    help="comma-separated n values for the sphere audit")
    vp.add_argument("--scales", default=None,
                    help="scale registry file with 'id = c' entries, "
                         "validated on load")
    vp.add_argument("--output", default=None,
                    help="write the report to this path as well")

    bp = sub.add_parser("build", parents=[common],
                        help="build one operator and print its normal form")
    bp.add_argument("--family", choices=sorted(FAMILIES), default="L")
    bp.add_argument("--k", type=int, required=True)
    bp.add_argument("--ell", type=int, required=True)
    bp.add_argument("--scale", default="flat")

    rp = sub.add_parser("report", help="render a saved JSON report as text")
    rp.add_argument("path")

    cp = sub.add_parser("cache", parents=[common],
                        help="inspect or clear the operator cache")
    cp.add_argument("action", choices=("list", "clear"))
    return ap


def _setting(args, file_cfg: dict[str, str], key: str, default, cast):
    cli = getattr(args, key.replace("-", "_"), None)
    if cli is not None:
        return cli
    if key in file_cfg:
        raw = file_cfg[key]
        try:
            return cast(raw)
        except ValueError:
            raise ConfigError(f"bad value for {key!r}: {raw!r}")
    return default


def _suite_config(args, file_cfg) -> SuiteConfig:
    n = _setting(args, file_cfg, "n", 4, int)
    sig = _setting(args, file_cfg, "signature", None, str)
    p = q = None
    if sig:
        p, q = _parse_signature(sig, n)
    seed = _setting(args, file_cfg, "seed", 7, int)
    trials = _setting(args, file_cfg, "trials", 8, int)
    cache_dir = _setting(args, file_cfg, "cache-dir", None, str)
    if cache_dir is None:
        cache_dir = str(default_cache_dir())
    sphere_raw = _setting(args, file_cfg, "sphere-ns", "4,6,8,10,12", str)
    try:
        sphere_ns = tuple(int(x) for x in str(sphere_raw).split(","))
    except ValueError:
        raise ConfigError(f"bad sphere-ns value {sphere_raw!r}")
    if seed < 0 or seed >= 2 ** 64:
        raise ConfigError("seed must fit in 64 bits")
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    return SuiteConfig(n=n, p=p, q=q, seed=seed, trials=trials,
                       cache_dir=cache_dir, sphere_ns=sphere_ns)


def cmd_verify(args, file_cfg) -> int:
    cfg = _suite_config(args, file_cfg)
    suites = args.suite or ["all"]
    fmt = _setting(args, file_cfg, "format", "text", str)
    config_echo = {
        "n": cfg.n, "signature": f"{cfg.signature()[0]},{cfg.signature()[1]}",
        "seed": cfg.seed, "trials": cfg.trials,
        "suites": ",".join(suites), "sphere_ns":
        ",".join(str(x) for x in cfg.sphere_ns),
    }
    scales_path = getattr(args, "scales", None) or file_cfg.get("scales")
    if scales_path:
        from .cone import load_scale_registry
        from .factory import get_context
        try:
            load_scale_registry(scales_path,
                                get_context(cfg.n, *cfg.signature()))
        except (OSError, ValueError) as e:
            raise ConfigError(f"scale registry: {e}")
    try:
        records = run_suites(suites, cfg)
    except KeyError as e:
        raise ConfigError(f"unknown suite {e}")
    doc = ReportDocument(config_echo, records)
    rendered = doc.to_json() if fmt == "json" else doc.to_text()
    sys.stdout.write(rendered)
    output = getattr(args, "output", None)
    if output:
        out_path = Path(output)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(doc.to_json(), encoding="utf-8")
    return 0 if not doc.failed else 1


def cmd_build(args, file_cfg) -> int:
    n = _setting(args, file_cfg, "n", 4, int)
    sig = _setting(args, file_cfg, "signature", None, str)
    p = q = None
    if sig:
        p, q = _parse_signature(sig, n)
    cache_dir = _setting(args, file_cfg, "cache-dir", None, str) or \
        str(default_cache_dir())
    spec = OperatorSpec(n, args.k, args.ell, p, q, scale_id=args.scale)
    ctx = get_context(n, *spec.signature)
    builder = FAMILIES[args.family]
    cache = OperatorCache(cache_dir)
    key = spec.cache_key(args.family)
    op = cache.load_or_build(key, ctx, lambda: builder(spec))
    print(f"# {args.family} n={n} k={args.k} ell={args.ell} "
          f"scale={args.scale}")
    print(f"# order {op.order()}, cache key {key}")
    print(op.render())
    return 0


def cmd_report(args) -> int:
    path = Path(args.path)
    if not path.exists():
        raise ConfigError(f"no such report: {args.path}")
    data = json.loads(path.read_text())
    doc = ReportDocument(data.get("config", {}))
    from .report import CheckRecord
    for c in data.get("checks", []):
        doc.checks.append(CheckRecord(
            c["id"], c["anchor"], c.get("params", {}), c["status"],
            c.get("constants", {}), c.get("witness"), c.get("trials", 0)))
    sys.stdout.write(doc.to_text())
    return 0 if not doc.failed else 1


def cmd_cache(args, file_cfg) -> int:
    cache_dir = _setting(args, file_cfg, "cache-dir", None, str) or \
        str(default_cache_dir())
    cache = OperatorCache(cache_dir)
    if args.action == "list":
        for key in cache.list_keys():
            print(key)
        return 0
    removed = cache.clear()
    print(f"removed {removed} entries")
    return 0


def main(argv: list[str] | None = None) -> int:
    ap = build_arg_parser()
    args = ap.parse_args(argv)
    try:
        file_cfg = _read_config_file(getattr(args, "config", None))
        if args.command == "verify":
            return cmd_verify(args, file_cfg)
        if args.command == "build":
            return cmd_build(args, file_cfg)
        if args.command == "report":
            return cmd_report(args)
        if args.command == "cache":
            return cmd_cache(args, file_cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except EngineError as e:
        print(f"engine error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
