"""Verification reports and their deterministic JSON/CSV renderings."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .formal import format_scalar

# how many counterexamples a report keeps verbatim
MAX_WITNESSES = 20


def plain(obj: Any) -> Any:
    """Convert rationals, tuples and nested containers into JSON-ready values."""
    if isinstance(obj, Fraction):
        return format_scalar(obj)
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(x) for x in obj]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return obj


@dataclass
class Report:
    """Outcome of one suite: how many checks ran and which failed."""

    name: str
    property: str
    params: dict = field(default_factory=dict)
    checks: int = 0
    skipped: int = 0
    failure_count: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def ok(self, n: int = 1) -> None:
        self.checks += n

    def fail(self, **witness) -> None:
        self.checks += 1
        self.failure_count += 1
        if len(self.failures) < MAX_WITNESSES:
            self.failures.append(plain(witness))

    def record(self, condition: bool, **witness) -> bool:
        if condition:
            self.ok()
        else:
            self.fail(**witness)
        return condition

    def merge(self, other: "Report") -> None:
        self.checks += other.checks
        self.skipped += other.skipped
        self.failure_count += other.failure_count
        room = MAX_WITNESSES - len(self.failures)
        self.failures.extend(other.failures[: max(room, 0)])

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f", {self.skipped} skipped" if self.skipped else ""
        return f"{status} {self.name}: {self.checks} checks, {self.failure_count} failures{extra}"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "property": self.property,
            "passed": self.passed,
            "params": plain(self.params),
            "checks": self.checks,
            "skipped": self.skipped,
            "failure_count": self.failure_count,
            "failures": self.failures,
            "details": plain(self.details),
        }


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(plain(obj), sort_keys=True, indent=2) + "\n"


def reports_to_csv(reports: list[Report]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "property", "passed", "checks", "skipped", "failures"])
    for r in reports:
        writer.writerow([r.name, r.property, str(r.passed).lower(), r.checks, r.skipped, r.failure_count])
    return buf.getvalue()


def table_to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_scalar(x) if isinstance(x, Fraction) else x for x in row])
    return buf.getvalue()
