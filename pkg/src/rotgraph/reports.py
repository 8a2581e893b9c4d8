"""Pass/fail records shared by the verification routines and the CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

SCHEMA = 1
MAX_WITNESSES = 20


@dataclass
class Report:
    check: str
    instance: str
    passed: bool = True
    witnesses: list[Any] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    def fail(self, witness: Any) -> None:
        self.passed = False
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append(witness)
        self.details["violations"] = self.details.get("violations", 0) + 1

    def require(self, ok: bool, witness: Any) -> bool:
        if not ok:
            self.fail(witness)
        return ok

    def merge(self, other: Report) -> Report:
        """Fold ``other`` into this report (associative)."""
        if not other.passed:
            self.passed = False
            room = MAX_WITNESSES - len(self.witnesses)
            self.witnesses.extend(other.witnesses[: max(room, 0)])
            self.details["violations"] = self.details.get("violations", 0) + other.details.get("violations", 1)
        return self

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "instance": self.instance,
            "passed": self.passed,
            "witnesses": _jsonable(self.witnesses),
            "details": _jsonable(self.details),
        }

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" witnesses={self.witnesses[:3]}" if not self.passed else ""
        return f"[{status}] {self.check} on {self.instance}{extra}"


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, bytes):
        return obj.hex()
    if hasattr(obj, "item") and callable(obj.item):
        return obj.item()
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def dumps(reports: list[Report], **extra: Any) -> str:
    body = {"schema": SCHEMA, "passed": all(r.passed for r in reports), "reports": [r.to_json() for r in reports]}
    body.update(_jsonable(extra))
    return json.dumps(body, indent=2)
