"""Check records and deterministic report documents.

Every verification emits ``CheckRecord`` rows.  A record's ``anchor`` is
the mathematical statement being verified, rendered in plain operator
notation, so a reader can trace any report line back to the identity it
certifies.  Reports are deterministic for a fixed configuration: no
timestamps, sorted JSON keys, exact rational constants rendered as
strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

ENGINE_VERSION = "0.1.0"
CONVENTION_VERSION = "C1"  # delta = -i(nabla); Lap = delta d + d delta;
# e(w) wedges in the first slot; i(w) contracts the first slot.

REPORT_SCHEMA = "coneforms-report/1"


@dataclass
class CheckRecord:
    check_id: str
    anchor: str
    params: dict
    status: str  # "PASS" | "FAIL"
    constants: dict = field(default_factory=dict)
    witness: str | None = None
    trials: int = 0

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def to_dict(self) -> dict:
        out = {
            "id": self.check_id,
            "anchor": self.anchor,
            "params": {k: str(v) for k, v in sorted(self.params.items())},
            "status": self.status,
            "constants": {k: str(v) for k, v in sorted(self.constants.items())},
            "trials": self.trials,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def passing(check_id: str, anchor: str, params: dict, *,
            constants: dict | None = None, trials: int = 0) -> CheckRecord:
    return CheckRecord(check_id, anchor, params, "PASS",
                       constants or {}, None, trials)


def failing(check_id: str, anchor: str, params: dict, witness: str, *,
            constants: dict | None = None, trials: int = 0) -> CheckRecord:
    return CheckRecord(check_id, anchor, params, "FAIL",
                       constants or {}, witness, trials)


def verdict(check_id: str, anchor: str, params: dict, ok: bool,
            witness: str = "", *, constants: dict | None = None,
            trials: int = 0) -> CheckRecord:
    if ok:
        return passing(check_id, anchor, params, constants=constants,
                       trials=trials)
    return failing(check_id, anchor, params, witness or "mismatch",
                   constants=constants, trials=trials)


@dataclass
class ReportDocument:
    config: dict
    checks: list[CheckRecord] = field(default_factory=list)

    def extend(self, records) -> None:
        self.checks.extend(records)

    @property
    def failed(self) -> list[CheckRecord]:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> dict:
        return {
            "total": len(self.checks),
            "passed": sum(1 for c in self.checks if c.passed),
            "failed": len(self.failed),
        }

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "engine": ENGINE_VERSION,
            "conventions": CONVENTION_VERSION,
            "config": {k: str(v) for k, v in sorted(self.config.items())},
            "checks": [c.to_dict() for c in self.checks],
            "summary": self.summary(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            consts = ""
            if c.constants:
                consts = "  [" + ", ".join(
                    f"{k}={v}" for k, v in sorted(c.constants.items())) + "]"
            lines.append(f"{c.status:4s}  {c.check_id:44s} {c.anchor}{consts}")
            if c.witness:
                lines.append(f"      witness: {c.witness}")
        s = self.summary()
        lines.append(f"{s['passed']}/{s['total']} checks passed, "
                     f"{s['failed']} failed")
        return "\n".join(lines) + "\n"
