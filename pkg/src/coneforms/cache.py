"""Disk cache of built operators.

Each entry is one JSON file whose payload carries the operator normal
form in both structured form (for reload) and canonical text (for
byte-stable diffing), plus engine/convention versions and a content
hash.  Writes are atomic (write to a temp name, then rename); a hash
mismatch on read raises so callers rebuild instead of silently reusing a
damaged entry.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

from .ambient import AmbientContext
from .errors import CacheCorruption
from .poly import MultiPoly
from .ratfunc import RationalFunction
from .report import CONVENTION_VERSION, ENGINE_VERSION
from .sliceops import SliceOperator

CACHE_SCHEMA = "coneforms-cache/1"
CACHE_ENV_VAR = "CONEFORMS_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV_VAR)
    if env:
        return Path(env)
    return Path(".coneforms-cache")


def _rf_to_jsonable(c: RationalFunction) -> list:
    num = sorted((list(e), str(v)) for e, v in c.num.terms.items())
    den = sorted((f, e) for f, e in c.den.items())
    return [num, den]


def _rf_from_jsonable(ctx: AmbientContext, data: list) -> RationalFunction:
    num_terms, den = data
    terms = {tuple(e): Fraction(v) for e, v in num_terms}
    num = MultiPoly(ctx.nvars, terms)
    return RationalFunction(ctx.table, num, {f: e for f, e in den},
                            reduce=False)


def operator_to_jsonable(op: SliceOperator) -> dict:
    entries = []
    for (kj, ki) in sorted(op.entries):
        ops = op.entries[(kj, ki)]
        rows = []
        for alpha in sorted(ops, key=lambda a: (sum(a), a)):
            rows.append([list(alpha), _rf_to_jsonable(ops[alpha])])
        entries.append([list(kj), list(ki), rows])
    return {
        "k_in": op.k_in, "k_out": op.k_out,
        "w_in": op.w_in, "w_out": op.w_out,
        "entries": entries,
    }


def operator_from_jsonable(ctx: AmbientContext, data: dict) -> SliceOperator:
    entries = {}
    for kj, ki, rows in data["entries"]:
        tgt = {}
        for alpha, rf in rows:
            tgt[tuple(alpha)] = _rf_from_jsonable(ctx, rf)
        entries[(tuple(kj), tuple(ki))] = tgt
    return SliceOperator(ctx, data["k_in"], data["k_out"], entries,
                         data.get("w_in"), data.get("w_out"))


def _payload_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class OperatorCache:
    def __init__(self, directory: Path | str | None = None):
        self.dir = Path(directory) if directory else default_cache_dir()

    def path(self, key: str) -> Path:
        return self.dir / f"{key}.json"

    def store(self, key: str, op: SliceOperator,
              constants: dict | None = None) -> Path:
        payload = {
            "schema": CACHE_SCHEMA,
            "engine": ENGINE_VERSION,
            "conventions": CONVENTION_VERSION,
            "key": key,
            "operator": operator_to_jsonable(op),
            "render": op.render(),
            "constants": {k: str(v) for k, v in (constants or {}).items()},
        }
        doc = {"payload": payload, "hash": _payload_hash(payload)}
        self.dir.mkdir(parents=True, exist_ok=True)
        target = self.path(key)
        fd, tmp = tempfile.mkstemp(dir=self.dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(doc, fh, sort_keys=True, indent=1)
                fh.write("\n")
            os.replace(tmp, target)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
        return target

    def load(self, key: str, ctx: AmbientContext) -> SliceOperator | None:
        """Cached operator, or None when absent; raises CacheCorruption on
        a hash or version mismatch (callers should rebuild)."""
        target = self.path(key)
        if not target.exists():
            return None
        try:
            doc = json.loads(target.read_text())
            payload = doc["payload"]
            if doc.get("hash") != _payload_hash(payload):
                raise CacheCorruption(f"hash mismatch for {key}")
            if payload.get("engine") != ENGINE_VERSION or \
                    payload.get("conventions") != CONVENTION_VERSION:
                raise CacheCorruption(f"version mismatch for {key}")
            return operator_from_jsonable(ctx, payload["operator"])
        except CacheCorruption:
            raise
        except Exception as e:  # malformed file counts as corruption
            raise CacheCorruption(f"unreadable cache entry {key}: {e}")

    def load_or_build(self, key: str, ctx: AmbientContext, builder):
        try:
            op = self.load(key, ctx)
        except CacheCorruption:
            op = None
        if op is None:
            op = builder()
            self.store(key, op)
        return op

    def list_keys(self) -> list[str]:
        if not self.dir.exists():
            return []
        return sorted(p.stem for p in self.dir.glob("*.json"))

    def clear(self) -> int:
        count = 0
        for p in list(self.dir.glob("*.json")) if self.dir.exists() else []:
            p.unlink()
            count += 1
        return count
