"""Check reports shared by the operad, algebra and segment validators."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Report:
    subject: str
    checks: int
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return "%s: ok (%d checks)" % (self.subject, self.checks)
        lines = ["%s: %d violation(s) in %d checks"
                 % (self.subject, len(self.violations), self.checks)]
        lines.extend("  - " + v for v in self.violations)
        return "\n".join(lines)

    def to_payload(self) -> dict:
        return {"subject": self.subject, "checks": self.checks,
                "ok": self.ok, "violations": list(self.violations)}


def from_payload(payload: dict) -> Report:
    return Report(payload["subject"], payload["checks"],
                  tuple(payload["violations"]))
