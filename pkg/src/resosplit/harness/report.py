"""Check results and the report that collects them."""

from __future__ import annotations

from dataclasses import dataclass, field

STATUSES = ("pass", "fail", "skipped", "reported")


@dataclass(frozen=True)
class Check:
    """One named check. ``anchor`` says in a few words which claim it tests."""

    name: str
    status: str
    measured: float | None
    threshold: float | None
    anchor: str
    detail: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}, got {self.status!r}")

    @property
    def failed(self) -> bool:
        return self.status == "fail"

    def line(self) -> str:
        m = "" if self.measured is None else f"{self.measured:.6g}"
        t = "" if self.threshold is None else f"{self.threshold:.6g}"
        return f"{self.status.upper():8s} {self.name:34s} measured={m:12s} threshold={t:12s} {self.detail}"

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "measured": self.measured,
            "threshold": self.threshold,
            "anchor": self.anchor,
            "detail": self.detail,
        }


def verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


@dataclass
class VerificationReport:
    conventions: dict
    checks: list = field(default_factory=list)

    def add(self, check: Check) -> None:
        if any(c.name == check.name for c in self.checks):
            raise ValueError(f"duplicate check name {check.name!r}")
        self.checks.append(check)

    def extend(self, checks) -> None:
        for c in checks:
            self.add(c)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return not any(c.failed for c in self.checks)

    @property
    def exit_status(self) -> int:
        return 0 if self.passed else 1

    def counts(self) -> dict:
        return {s: sum(c.status == s for c in self.checks) for s in STATUSES}

    def as_dict(self) -> dict:
        return {
            "conventions": self.conventions,
            "passed": self.passed,
            "counts": self.counts(),
            "checks": [c.as_dict() for c in self.checks],
        }

    def render(self) -> str:
        lines = ["conventions:"]
        lines += [f"  {k}: {v}" for k, v in self.conventions.items()]
        lines += [c.line() for c in self.checks]
        counts = ", ".join(f"{v} {k}" for k, v in self.counts().items())
        lines.append(f"{'PASSED' if self.passed else 'FAILED'}: {counts}")
        return "\n".join(lines)
